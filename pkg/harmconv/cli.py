"""
harmconv command line: zero counting, theorem verification, conjecture scans, lemma gaps,
figure rendering and the Cohn/oracle property check.

Exit codes: 0 ok, 1 verification failed, 2 usage or parameter error, 3 I/O error.
"""
import argparse
import dataclasses
import json
import logging
import math
import sys

import numpy as np

from harmconv import config
from harmconv.__version__ import __version__
from harmconv.convolve import ParamSet, convolve_half_plane
from harmconv.errors import DomainError, HarmconvError, OutputError, ParameterError
from harmconv.geom import image_grid, render
from harmconv.harmonic import Moebius, RotatedPower, make_half_plane, make_strip
from harmconv.polytools import CPoly, classify_roots, cohn_chain, count_zeros_unit_circle, root_finders
from harmconv.utils import parse_complex_list, random_polynomial
from harmconv.verify import conjecture_scan, lemma22_gap, lemma_holds, verify

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def to_jsonable(obj):
    """
    Plain JSON structure of a report: dataclass fields in declaration order, complex numbers
    as {"re", "im"}, polynomials as coefficient lists and non-finite floats as null. Finite floats
    keep their shortest repr, which reads back to the same double.
    """
    if isinstance(obj, CPoly):
        return [to_jsonable(complex(c)) for c in obj.coeffs]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(float(obj.real)), "im": to_jsonable(float(obj.imag))}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    return obj


def emit(payload, args, text):
    """ Print (or write with -o) the report as JSON or as the given text lines. """
    out = json.dumps(to_jsonable(payload), indent=2) if args.format == "json" else "\n".join(text)
    path = getattr(args, "output", None)
    if path:
        try:
            with open(path, "w") as f:
                f.write(out + "\n")
        except OSError as e:
            raise OutputError(path, e.strerror or str(e)) from e
    else:
        print(out)


def _angle(args, name):
    deg = getattr(args, f"{name}_deg")
    return math.radians(deg) if deg is not None else getattr(args, name)


def _fmt(z):
    return f"{z.real:.12g}{z.imag:+.12g}j"


def cmd_cohn(args):
    coeffs = parse_complex_list(args.coeffs)
    if len(coeffs) < 2:
        raise ParameterError("cohn needs at least 2 coefficients")
    p = CPoly(coeffs)
    count = count_zeros_unit_circle(p, method=args.method)
    steps, terminal = cohn_chain(p, normalize=False)

    text = [f"inside={count.inside} on={count.on} outside={count.outside}"]
    for i, step in enumerate(steps, 1):
        flag = "" if step.applicable else " (inapplicable)"
        text.append(f"step {i}{flag}: " + " ".join(_fmt(c) for c in step.reduced.coeffs))
    emit({"zero_count": count, "steps": steps, "terminal": terminal}, args, text)
    return EXIT_OK


def cmd_verify(args):
    params = ParamSet(args.a, _angle(args, "beta"), _angle(args, "theta"), args.n)
    report = verify(params)

    text = [f"n={params.n} a={params.a:.12g} beta={params.beta:.12g} theta={params.theta:.12g}",
            f"zero_count inside={report.zero_count.inside} on={report.zero_count.on} "
            f"outside={report.zero_count.outside}",
            f"max|dilatation|={report.max_abs_dilatation:.12g}",
            f"passed={report.passed}"]
    if report.trace is not None and report.trace.special_case:
        text.append(f"special case {report.trace.special_case}")
    if report.trace is not None and report.trace.z0 is not None:
        text.append(f"z0={_fmt(report.trace.z0)}")
    if report.witness is not None:
        text.append(f"witness z={_fmt(report.witness)}")
    emit(report, args, text)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_scan(args):
    curve = conjecture_scan(args.n, a_step=args.a_step, beta_samples=args.beta_samples,
                            theta_samples=args.theta_samples, a_min=args.a_min, a_max=args.a_max,
                            max_workers=args.workers)
    if args.curve:
        rows = np.array([[p.a, p.worst_outside, p.worst_max_abs, p.passed] for p in curve.curve], dtype=float)
        try:
            np.savetxt(args.curve, rows, fmt="%.17g,%d,%.17g,%d")
        except OSError as e:
            raise OutputError(args.curve, e.strerror or str(e)) from e

    a_star = "none" if curve.a_star is None else f"{curve.a_star:.6g}"
    text = [f"n={curve.n} a_star={a_star} (n-2)/(n+2)={curve.threshold:.6g}"]
    if curve.violations:
        text.append("monotonicity violations at a=" + ",".join(f"{a:.6g}" for a in curve.violations))
    emit(curve, args, text)
    return EXIT_OK


def _render_map(args):
    if args.half_plane_a is not None:
        return make_half_plane(args.half_plane_a)

    beta, theta = _angle(args, "beta"), _angle(args, "theta")
    omega = Moebius(args.moebius) if args.moebius is not None else RotatedPower(theta, args.n)
    strip = make_strip(beta, omega)
    if args.conv:
        return convolve_half_plane(args.a, strip)
    return strip


def cmd_render(args):
    fmt = args.format or ("csv" if args.output.lower().endswith(".csv") else "svg")
    grid = image_grid(_render_map(args), rings=args.rings, rays=args.rays, samples=args.samples, rmax=args.rmax)
    render(grid, fmt, args.output)
    print(f"wrote {args.output} ({len(grid.polylines)} polylines, {grid.num_points} points)")
    return EXIT_OK


def cmd_lemma(args):
    beta, theta = _angle(args, "beta"), _angle(args, "theta")
    gap = lemma22_gap(args.part, beta, theta)
    holds = lemma_holds(args.part, gap.gap)
    text = [f"gap={gap.gap:.17g}", f"factored={gap.factored:.17g}", f"residual={gap.residual:.3e}",
            f"holds={holds}"]
    emit({"part": args.part, "beta": beta, "theta": theta, "gap": gap, "holds": holds}, args, text)
    return EXIT_OK if holds else EXIT_FAILED


def cmd_property(args):
    rng = np.random.default_rng(args.seed)
    mismatches = []
    for i in range(args.count):
        degree = int(rng.integers(1, args.max_degree + 1))
        coeffs, roots = random_polynomial(rng, degree)
        p = CPoly(coeffs)
        expected = classify_roots(roots)
        got = count_zeros_unit_circle(p)
        if got != expected:
            mismatches.append({"index": i, "coeffs": p, "expected": expected, "got": got})

    text = [f"seed={args.seed} polynomials={args.count} mismatches={len(mismatches)}"]
    emit({"seed": args.seed, "count": args.count, "mismatches": mismatches}, args, text)
    return EXIT_OK if not mismatches else EXIT_FAILED


def _add_angles(parser, required=True):
    for name, default in (("beta", None), ("theta", 0.0)):
        group = parser.add_mutually_exclusive_group(required=required and default is None)
        group.add_argument(f"--{name}", type=float, default=default, help=f"{name} in radians")
        group.add_argument(f"--{name}-deg", type=float, default=None, help=f"{name} in degrees")


def _add_report(parser):
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("-o", "--output", default=None, help="write the report to this file")


def build_parser():
    parser = argparse.ArgumentParser(prog="harmconv", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    subparsers = parser.add_subparsers(dest="cmd", required=True)

    cohn = subparsers.add_parser("cohn", help="count zeros inside/on/outside the unit circle")
    cohn.add_argument("--coeffs", required=True, help="comma-separated complex literals, lowest degree first")
    cohn.add_argument("--method", choices=sorted(root_finders), default=config.ROOT_METHOD)
    _add_report(cohn)

    ver = subparsers.add_parser("verify", help="verify local univalence of F_a * f_beta")
    ver.add_argument("--n", type=int, required=True)
    ver.add_argument("--a", type=float, required=True)
    _add_angles(ver)
    _add_report(ver)

    scan = subparsers.add_parser("scan", help="scan a for the threshold of a dilatation power")
    scan.add_argument("--n", type=int, required=True)
    scan.add_argument("--a-step", type=float, default=0.01)
    scan.add_argument("--a-min", type=float, default=None)
    scan.add_argument("--a-max", type=float, default=None)
    scan.add_argument("--beta-samples", type=int, default=config.BETA_SAMPLES)
    scan.add_argument("--theta-samples", type=int, default=config.THETA_SAMPLES)
    scan.add_argument("--workers", type=int, default=None, help="worker processes (default HARMCONV_THREADS)")
    scan.add_argument("--curve", default=None, help="write the scan curve as csv rows a,outside,max,passed")
    _add_report(scan)

    rend = subparsers.add_parser("render", help="render the image grid of a map as svg or csv")
    source = rend.add_mutually_exclusive_group(required=True)
    source.add_argument("--half-plane-a", type=float, default=None)
    source.add_argument("--strip", action="store_true", help="strip shear f_beta")
    source.add_argument("--conv", action="store_true", help="convolution F_a * f_beta")
    rend.add_argument("--a", type=float, default=0.0)
    rend.add_argument("--n", type=int, default=1)
    rend.add_argument("--moebius", type=float, default=None, help="use the dilatation (m - z)/(1 - m z)")
    _add_angles(rend, required=False)
    rend.add_argument("--rings", type=int, default=12)
    rend.add_argument("--rays", type=int, default=24)
    rend.add_argument("--samples", type=int, default=256)
    rend.add_argument("--rmax", type=float, default=0.99)
    rend.add_argument("-o", "--output", required=True)
    rend.add_argument("--format", choices=("svg", "csv"), default=None, help="default from the file extension")

    lemma = subparsers.add_parser("lemma", help="squared-modulus gaps of the chain inequalities")
    lemma.add_argument("--part", choices=("a", "b", "c"), required=True)
    _add_angles(lemma)
    _add_report(lemma)

    prop = subparsers.add_parser("property", help="Cohn counts against root classification on random polynomials")
    prop.add_argument("--seed", type=int, default=0)
    prop.add_argument("--count", type=int, default=1000)
    prop.add_argument("--max-degree", type=int, default=8)
    _add_report(prop)

    return parser


commands = {"cohn": cmd_cohn,
            "verify": cmd_verify,
            "scan": cmd_scan,
            "render": cmd_render,
            "lemma": cmd_lemma,
            "property": cmd_property
            }


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")

    if args.cmd == "render" and args.half_plane_a is None and args.beta is None and args.beta_deg is None:
        print("harmconv: error: render --strip/--conv needs --beta or --beta-deg", file=sys.stderr)
        return EXIT_USAGE

    try:
        return commands[args.cmd](args)
    except (ParameterError, DomainError) as e:
        print(f"harmconv: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OutputError as e:
        print(f"harmconv: error: {e}", file=sys.stderr)
        return EXIT_IO
    except HarmconvError as e:
        print(f"harmconv: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
