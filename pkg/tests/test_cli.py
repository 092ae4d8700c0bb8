import json
import os

import numpy as np
import pytest

from harmconv.cli import main
from harmconv.convolve import ParamSet
from harmconv.verify import verify


def _json(capsys):
    return json.loads(capsys.readouterr().out)


class TestCohnCommand:
    def test_counts(self, capsys):
        assert main(["cohn", "--coeffs=-0.5,0,0.5,1"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "inside=3 on=0 outside=0"
        assert out[1].startswith("step 1:")

    def test_zeros_on_circle(self, capsys):
        assert main(["cohn", "--coeffs", "1,0,1", "--format", "json"]) == 0
        report = _json(capsys)
        assert report["zero_count"] == {"inside": 0, "on": 2, "outside": 0}

    def test_complex_literals(self, capsys):
        assert main(["cohn", "--coeffs", "1j,0,1", "--format", "json"]) == 0
        assert _json(capsys)["zero_count"] == {"inside": 0, "on": 2, "outside": 0}

    @pytest.mark.parametrize("coeffs", ["1,abc", "3", ""])
    def test_bad_coefficients(self, capsys, coeffs):
        assert main(["cohn", "--coeffs", coeffs]) == 2
        assert "error" in capsys.readouterr().err

    def test_output_file(self, tmpdir):
        path = os.path.join(tmpdir, "count.txt")
        assert main(["cohn", "--coeffs=-0.5,0,0.5,1", "-o", path]) == 0
        with open(path) as f:
            assert f.readline().strip() == "inside=3 on=0 outside=0"


class TestVerifyCommand:
    def test_passing(self, capsys):
        assert main(["verify", "--n", "1", "--a", "0", "--beta", "1.5707963", "--theta", "0",
                     "--format", "json"]) == 0
        report = _json(capsys)
        assert report["passed"] is True
        assert report["trace"]["z0"]["re"] == pytest.approx(-0.5, abs=1e-6)
        assert report["params"]["n"] == 1

    def test_json_floats_read_back_exactly(self, capsys):
        assert main(["verify", "--n", "1", "--a", "0.2", "--beta", "1.0", "--theta", "0.5", "--format", "json"]) == 0
        report = _json(capsys)
        expected = verify(ParamSet(0.2, 1.0, 0.5, 1))
        assert report["max_abs_dilatation"] == expected.max_abs_dilatation
        assert complex(report["trace"]["z0"]["re"], report["trace"]["z0"]["im"]) == expected.trace.z0
        assert report["trace"]["gates"]["z0_modulus"] == abs(expected.trace.z0) - 1
        assert report["trace"]["gates"]["z0_modulus"] < 0

    def test_failing_with_witness(self, capsys):
        assert main(["verify", "--n", "3", "--a", "0", "--beta", "1.0", "--theta", "0.5", "--format", "json"]) == 1
        report = _json(capsys)
        assert report["passed"] is False
        assert report["witness"] is not None

    def test_constant_modulus(self, capsys):
        assert main(["verify", "--n", "1", "--a=-0.33333333333333", "--beta-deg", "60"]) == 0
        assert "special case a=-1/3" in capsys.readouterr().out

    def test_out_of_range(self, capsys):
        assert main(["verify", "--n", "1", "--a", "1.5", "--beta", "1.0"]) == 2

    def test_missing_beta(self, capsys):
        assert main(["verify", "--n", "1", "--a", "0"]) == 2


class TestLemmaCommand:
    @pytest.mark.parametrize("beta, theta", [("1.5707963", "0"), ("1", "1")])
    def test_part_a(self, capsys, beta, theta):
        assert main(["lemma", "--part", "a", "--beta", beta, "--theta", theta]) == 0
        assert "holds=True" in capsys.readouterr().out

    def test_part_c_precondition(self, capsys):
        assert main(["lemma", "--part", "c", "--beta", "1.5707963", "--theta", "0"]) == 2

    def test_json(self, capsys):
        assert main(["lemma", "--part", "b", "--beta", "0.4", "--theta", "2.0", "--format", "json"]) == 0
        report = _json(capsys)
        assert report["holds"] is True
        assert report["gap"]["residual"] < 1e-10


class TestRenderCommand:
    def test_half_plane_svg(self, capsys, svg_path):
        assert main(["render", "--half-plane-a", "0", "--rings", "3", "--rays", "4", "--samples", "16",
                     "-o", svg_path]) == 0
        assert capsys.readouterr().out.startswith(f"wrote {svg_path}")
        with open(svg_path) as f:
            assert f.read().startswith("<svg")

    def test_convolution_csv(self, csv_path):
        assert main(["render", "--conv", "--a", "0", "--n", "1", "--beta-deg", "135", "--rings", "4", "--rays", "6",
                     "--samples", "32", "-o", csv_path]) == 0
        rows = np.loadtxt(csv_path, delimiter=",")
        assert rows.shape == (324, 3)

    def test_unwritable(self, capsys, missing_dir_path):
        assert main(["render", "--half-plane-a", "0", "--samples", "8", "-o", missing_dir_path]) == 3
        assert missing_dir_path in capsys.readouterr().err

    def test_strip_needs_beta(self, capsys, svg_path):
        assert main(["render", "--strip", "-o", svg_path]) == 2


class TestScanCommand:
    def test_small_scan(self, capsys, tmpdir):
        curve_path = os.path.join(tmpdir, "curve.csv")
        assert main(["scan", "--n", "2", "--a-min=-0.02", "--a-max", "0.02", "--a-step", "0.01",
                     "--beta-samples", "3", "--theta-samples", "3", "--workers", "1",
                     "--curve", curve_path, "--format", "json"]) == 0
        report = _json(capsys)
        assert abs(report["a_star"]) <= 0.01
        assert report["threshold"] == 0
        rows = np.loadtxt(curve_path, delimiter=",")
        assert rows.shape == (5, 4)


class TestMisc:
    def test_property(self, capsys):
        assert main(["property", "--seed", "1", "--count", "50"]) == 0
        assert "mismatches=0" in capsys.readouterr().out

    def test_help(self, capsys):
        assert main(["--help"]) == 0
        assert "harmconv" in capsys.readouterr().out

    def test_no_command(self, capsys):
        assert main([]) == 2
