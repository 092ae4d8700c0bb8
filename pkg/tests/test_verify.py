import itertools
import logging
import math

import numpy as np
import pytest

from harmconv import config
from harmconv.convolve import ParamSet, build_p, build_q, threshold
from harmconv.errors import ParameterError
from harmconv.polytools import cohn_reduce, count_zeros_unit_circle, find_roots
from harmconv.verify import CurvePoint, Witness, conjecture_scan, counterexample_search, dilatation_grid_max, \
    lemma22_gap, lemma_holds, printed_p1, printed_p2, printed_q1, printed_q2, printed_q3, printed_z0, verify, \
    verify_general, verify_n1, verify_n2
from tests.conftest import BETAS, THETAS

SMALL_GRID = config.GridSpec(radii=20, angles=40)
FINE_GRID = config.GridSpec(radii=50, angles=100, max_radius=0.99)


def _random_case(rng, a_range=(-0.9, 0.9)):
    return rng.uniform(*a_range), rng.uniform(0.05, math.pi - 0.05), rng.uniform(0, 2 * math.pi)


class TestCubicTranscript:
    def test_worked_example(self):
        report = verify_n1(0.0, math.pi / 2, 0.0)
        steps = report.trace.steps
        assert steps[0].reduced.allclose([0.25, 0.5, 0.75])
        assert steps[1].reduced.allclose([0.25, 0.5])
        assert report.trace.z0 == pytest.approx(-0.5)
        assert report.trace.gates["lemma_a"] == pytest.approx(-12)
        assert report.zero_count.inside == 3
        assert report.passed
        assert report.witness is None

    def test_constant_modulus(self):
        report = verify_n1(-1 / 3, 1.0, 2.0)
        assert report.trace.special_case == "a=-1/3"
        assert report.method == "special"
        assert report.passed
        assert report.max_abs_dilatation == pytest.approx(config.VERIFY_GRID.max_radius)

    def test_factor_at_one_third(self):
        report = verify_n1(1 / 3, 0.8, 2.5)
        assert report.trace.special_case == "a=1/3"
        assert report.zero_count.inside + report.zero_count.on == 3
        assert report.passed

    def test_zero_on_circle_when_angles_agree(self):
        report = verify_n1(0.2, 1.0, 1.0)
        assert abs(report.trace.z0) == pytest.approx(1, abs=1e-9)
        assert report.zero_count.outside == 0

    def test_z0_modulus_gate(self):
        assert verify_n1(0.0, math.pi / 2, 0.0).trace.gates["z0_modulus"] == pytest.approx(-0.5)
        assert verify_n1(0.2, 1.0, 1.0).trace.gates["z0_modulus"] == pytest.approx(0, abs=1e-9)

    @pytest.mark.parametrize("a", [-1 / 3, -0.2, 0.0, 1 / 3, 0.6, 0.95])
    def test_acceptance_grid(self, a):
        for beta, theta in itertools.product(BETAS, THETAS):
            report = verify_n1(a, beta, theta)
            assert report.passed, (a, beta, theta)
            assert report.zero_count.outside == 0
            for residual in report.trace.printed_residuals.values():
                assert residual < 1e-10

    def test_below_threshold_fails(self):
        report = verify_n1(-0.6, math.pi / 2, 0.0)
        assert not report.passed
        assert report.zero_count.outside >= 1

    def test_dispatch(self):
        report = verify(ParamSet(0.0, math.pi / 2, 0.0, 1))
        assert report.method == "transcript"
        assert report.trace.z0 == pytest.approx(-0.5)


class TestQuarticTranscript:
    def test_symmetric_case(self):
        report = verify_n2(0.25, math.pi / 2, 0.0)
        assert report.trace.special_case == "beta=pi/2,theta=2k*pi"
        assert report.trace.printed_residuals["q2_symmetric"] < 1e-10
        roots = sorted(report.trace.terminal_roots, key=lambda z: z.imag)
        np.testing.assert_allclose(roots, [-1j, 1j], atol=1e-12)
        assert report.zero_count.on == 2
        assert report.passed

    def test_factor_at_one_half(self):
        report = verify_n2(0.5, 1.2, 0.3)
        assert report.trace.special_case == "a=1/2"
        assert report.passed

    def test_zero_left_to_oracle(self):
        report = verify_n2(0.0, 1.2, 0.3)
        assert report.trace.special_case == "a=0"
        assert report.method == "numeric"
        assert report.passed

    def test_full_chain(self):
        report = verify_n2(0.7, 1.2, 2.0)
        residuals = report.trace.printed_residuals
        assert residuals["q1"] < 1e-10
        assert residuals["q2"] < 1e-10
        assert "q3" in residuals
        assert len(report.trace.steps) == 3
        assert lemma_holds("c", report.trace.gates["lemma_c"])
        assert lemma_holds("b", report.trace.gates["lemma_b"])
        assert report.passed

    @pytest.mark.parametrize("a", [0.0, 0.25, 0.5, 0.8])
    def test_acceptance_grid(self, a):
        for beta, theta in itertools.product(BETAS, THETAS):
            report = verify_n2(a, beta, theta)
            assert report.passed, (a, beta, theta)
            assert report.zero_count.outside == 0

    def test_below_threshold_fails(self):
        report = verify(ParamSet(-0.3, 1.0, 0.5, 2))
        assert not report.passed
        assert report.zero_count.outside >= 1


class TestNumericPipeline:
    @pytest.mark.parametrize("a", [0.2, 0.5, 0.9])
    def test_above_threshold(self, a):
        for beta, theta in [(0.3, 1.0), (math.pi / 2, math.pi), (2.5, 5.0)]:
            report = verify_general(ParamSet(a, beta, theta, 3), grid=SMALL_GRID)
            assert report.passed, (a, beta, theta)
            assert report.method == "numeric"

    def test_degenerate_threshold(self):
        report = verify(ParamSet(threshold(4), 0.7, 1.1, 4))
        assert report.trace.special_case == "constant-modulus"
        assert report.passed

    def test_witness(self):
        params = ParamSet(0.0, 1.0, 0.5, 3)
        report = verify(params)
        assert not report.passed
        assert report.witness is not None
        assert abs(report.witness) < 1

        found = counterexample_search(params, fine_grid=FINE_GRID)
        assert isinstance(found, Witness)
        assert found.value > 1
        assert abs(found.z) < 1

    @pytest.mark.parametrize("params", [ParamSet(0.0, 3 * math.pi / 4, 1.0, 1), ParamSet(0.5, 1.0, 2.0, 2)])
    def test_no_witness(self, params):
        assert counterexample_search(params, fine_grid=FINE_GRID) is None

    def test_grid_max(self):
        value, point = dilatation_grid_max(lambda z: z, SMALL_GRID)
        assert value == pytest.approx(SMALL_GRID.max_radius)
        assert abs(point) == pytest.approx(SMALL_GRID.max_radius)


class TestLemma:
    @pytest.mark.parametrize("part", ["a", "b", "c"])
    def test_factored_form_and_direction(self, rng, part):
        for _ in range(10000):
            _, beta, theta = _random_case(rng)
            gap = lemma22_gap(part, beta, theta)
            assert gap.residual < 1e-10
            assert lemma_holds(part, gap.gap)

    def test_equality_when_angles_agree(self):
        gap = lemma22_gap("a", 1.0, 1.0)
        assert abs(gap.gap) < 1e-12
        assert gap.factored == pytest.approx(0, abs=1e-15)
        assert lemma_holds("a", gap.gap)

    def test_right_angle(self):
        assert lemma22_gap("a", math.pi / 2, 0.0).factored == pytest.approx(-12)

    @pytest.mark.parametrize("beta, theta", [(math.pi / 2, 1.0), (1.0, 0.0), (1.0, 2 * math.pi)])
    def test_part_c_precondition(self, beta, theta):
        with pytest.raises(ParameterError):
            lemma22_gap("c", beta, theta)

    def test_invalid(self):
        with pytest.raises(ParameterError):
            lemma22_gap("d", 1.0, 1.0)
        with pytest.raises(ParameterError):
            lemma22_gap("a", 0.0, 1.0)


class TestPrintedFormulas:
    def test_cubic_chain(self, rng):
        for _ in range(200):
            a, beta, theta = _random_case(rng, (-0.3, 0.9))
            p1 = cohn_reduce(build_p(a, beta, theta)).reduced
            assert p1.allclose(printed_p1(a, beta, theta))
            p2 = cohn_reduce(p1).reduced
            assert p2.allclose(printed_p2(a, beta, theta))
            z0 = -p2.coeffs[0] / p2.coeffs[1]
            assert z0 == pytest.approx(printed_z0(beta, theta), abs=1e-9)

    def test_quartic_chain(self, rng):
        for _ in range(200):
            a, beta, theta = _random_case(rng, (0.05, 0.95))
            q1 = cohn_reduce(build_q(a, beta, theta)).reduced
            assert q1.allclose(printed_q1(a, beta, theta))
            assert cohn_reduce(q1).reduced.allclose(printed_q2(a, beta, theta))

    def test_last_quartic_step_at_zero_angle(self, rng):
        for _ in range(50):
            a, beta, _ = _random_case(rng, (0.05, 0.95))
            q2 = printed_q2(a, beta, 0.0)
            assert cohn_reduce(q2).reduced.allclose(printed_q3(a, beta, 0.0))

    def test_last_quartic_root_modulus(self, rng):
        for _ in range(50):
            a, beta, theta = _random_case(rng, (0.05, 0.95))
            c, lam_bar = math.cos(beta), np.exp(-1j * theta)
            expected = abs(c * (lam_bar - 5)) / abs(6 - c ** 2 + 2 * lam_bar - 3 * lam_bar * c ** 2)
            root = find_roots(printed_q3(a, beta, theta))[0]
            assert abs(root) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_gate_implies_applicable_step(self, rng):
        for _ in range(200):
            a, beta, theta = _random_case(rng, (0.05, 0.95))
            gap = lemma22_gap("c", beta, theta)
            if gap.gap < -1e-6:
                assert cohn_reduce(printed_q2(a, beta, theta)).applicable


class TestChainAgreesWithOracle:
    @staticmethod
    def _off_circle(p):
        return np.all(np.abs(np.abs(find_roots(p)) - 1) > 1e-6)

    @pytest.mark.parametrize("n, a_range, build", [(1, (-0.3, 0.9), build_p), (2, (0.05, 0.95), build_q)])
    def test_random_transcripts(self, rng, caplog, n, a_range, build):
        checked = 0
        with caplog.at_level(logging.WARNING, logger="harmconv.verify"):
            for _ in range(300):
                a, beta, theta = _random_case(rng, a_range)
                p = build(a, beta, theta)
                if not self._off_circle(p):
                    continue
                report = verify(ParamSet(a, beta, theta, n), grid=SMALL_GRID)
                if report.trace.special_case or report.trace.fallback:
                    continue
                assert report.zero_count == count_zeros_unit_circle(p), (a, beta, theta)
                checked += 1

        assert checked > 200
        assert not [r for r in caplog.records if "differs" in r.getMessage()]


class TestConjectureScan:
    @pytest.mark.parametrize("n, a_min, a_max, expected", [(1, -0.40, -0.25, -0.33),
                                                          (2, -0.05, 0.06, 0.0),
                                                          (3, 0.15, 0.26, 0.2)])
    def test_thresholds(self, n, a_min, a_max, expected):
        curve = conjecture_scan(n, a_step=0.01, beta_samples=6, theta_samples=6, a_min=a_min, a_max=a_max,
                                max_workers=1)
        assert curve.a_star == pytest.approx(expected)
        assert curve.threshold == pytest.approx((n - 2) / (n + 2))
        assert curve.violations == ()
        assert not curve.curve[0].passed
        assert curve.curve[0].worst_outside >= 1

    def test_fourth_power(self):
        curve = conjecture_scan(4, a_step=0.01, beta_samples=6, theta_samples=6, a_min=0.28, a_max=0.40,
                                max_workers=1)
        assert abs(curve.a_star - 1 / 3) <= 0.02

    def test_no_passing_value(self):
        curve = conjecture_scan(3, a_step=0.05, beta_samples=4, theta_samples=4, a_min=-0.2, a_max=0.1,
                                max_workers=1)
        assert curve.a_star is None

    def test_workers_do_not_change_the_result(self):
        kwargs = dict(a_step=0.02, beta_samples=3, theta_samples=3, a_min=-0.04, a_max=0.04)
        serial = conjecture_scan(2, max_workers=1, **kwargs)
        parallel = conjecture_scan(2, max_workers=2, **kwargs)
        assert serial == parallel

    def test_invalid(self):
        with pytest.raises(ParameterError):
            conjecture_scan(0)
        with pytest.raises(ParameterError):
            conjecture_scan(1, a_step=0.5)

    def test_violations_are_reported(self, monkeypatch, caplog):
        def fake_scan(args):
            a = args[1]
            return CurvePoint(a=float(a), worst_outside=0, worst_max_abs=0.5, passed=round(a, 2) not in (0.0, 0.02))

        monkeypatch.setattr("harmconv.verify._scan_a", fake_scan)
        with caplog.at_level(logging.WARNING, logger="harmconv.verify"):
            curve = conjecture_scan(1, a_step=0.01, a_min=0.0, a_max=0.04, beta_samples=2, theta_samples=2,
                                    max_workers=1)

        assert curve.a_star == pytest.approx(0.03)
        assert curve.violations == pytest.approx((0.01,))
        assert [point.passed for point in curve.curve] == [False, True, False, True, True]
        assert any("passes at a=0.01" in r.getMessage() for r in caplog.records)
