"""
Proof transcripts and numerical verification of the convolutions F_a * f_beta.

For omega = e^{i theta} z^n the convolution's dilatation is z^n t / t* (up to a unimodular
factor), so it maps the disk into itself exactly when the bracket polynomial t has all of its
zeros in the closed unit disk. The n = 1 and n = 2 routines replay the reduction chains
p -> p1 -> p2 and q -> q1 -> q2 -> q3 and compare every step with its expanded form; the
general routine counts zeros numerically and scans |dilatation| on a polar grid.
"""
import logging
import math
import warnings
from concurrent import futures
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.optimize as spo

from harmconv import config
from harmconv.convolve import ParamSet, build_p, build_q, threshold, tilde_omega_closed
from harmconv.errors import ConvergenceError, ParameterError
from harmconv.polytools import CPoly, ZeroCount, classify_roots, cohn_reduce, count_zeros_unit_circle, find_roots
from harmconv.utils import a_grid, angle_close, beta_theta_grid, polar_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CohnChainTrace:
    """
    Reduction chain of a proof transcript. ``printed_residuals`` holds the coefficientwise
    distance of each computed reduction to its expanded formula, ``gates`` the lemma gaps
    checked before a reduction and, for the cubic, |z0| - 1 (nonpositive means the gate holds).
    """
    steps: tuple = ()
    terminal_roots: tuple = ()
    z0: Optional[complex] = None
    special_case: Optional[str] = None
    fallback: bool = False
    printed_residuals: dict = field(default_factory=dict)
    gates: dict = field(default_factory=dict)

    def __post_init__(self):
        for step in self.steps:
            if step.applicable:
                assert step.reduced.degree == step.input.degree - 1


@dataclass(frozen=True)
class VerificationReport:
    params: ParamSet
    zero_count: ZeroCount
    max_abs_dilatation: float
    grid_spec: config.GridSpec
    passed: bool
    witness: Optional[complex] = None
    trace: Optional[CohnChainTrace] = None
    method: str = "transcript"


@dataclass(frozen=True)
class LemmaGap:
    gap: float
    factored: float
    residual: float


@dataclass(frozen=True)
class Witness:
    """ A point with |dilatation(z)| > 1. """
    z: complex
    value: float


@dataclass(frozen=True)
class CurvePoint:
    a: float
    worst_outside: int
    worst_max_abs: float
    passed: bool


@dataclass(frozen=True)
class ConjectureCurve:
    n: int
    a_star: Optional[float]
    threshold: float
    curve: tuple
    violations: tuple = ()


# lemma inequalities, x = cos(beta), y = cos(theta)

def _lemma_sides(part, beta, theta):
    c, lam = math.cos(beta), complex(np.exp(1j * theta))
    lam_bar = lam.conjugate()
    if part == "a":
        return abs(-2 * c + 4 * lam_bar * c ** 2 - 3 * lam_bar + lam), abs(4 - 2 * c ** 2 - 2 * c * math.cos(theta))
    if part == "b":
        return abs(c * (lam_bar - 5)), abs(6 - c ** 2 + 2 * lam_bar - 3 * lam_bar * c ** 2)
    return abs(2 * (1 + lam_bar) - 3 * lam_bar * c ** 2), abs(4 - c ** 2)


def _lemma_factored(part, beta, theta):
    x, y = math.cos(beta), math.cos(theta)
    if part == "a":
        return -12 * (1 - x ** 2) * (x - y) ** 2
    if part == "b":
        return -2 * (x ** 2 - 4) * (x ** 2 - 1) * (5 + 3 * y)
    return 4 * (2 * (x ** 2 - 1) * (x ** 2 + 1 - y) - x ** 2 * (y + 1))


def _lemma_gap(part, beta, theta):
    lhs, rhs = _lemma_sides(part, beta, theta)
    gap = lhs ** 2 - rhs ** 2
    factored = _lemma_factored(part, beta, theta)
    return LemmaGap(gap=gap, factored=factored, residual=abs(gap - factored))


def lemma22_gap(part, beta, theta):
    """
    Squared-modulus gap LHS^2 - RHS^2 of one of the three inequalities behind the n = 1
    and n = 2 chains, next to its factored closed form:

        (a) |-2c + 4 e^{-it} c^2 - 3 e^{-it} + e^{it}|  <=  |4 - 2c^2 - 2c cos t|      -12 (1-x^2)(x-y)^2
        (b) |c (e^{-it} - 5)|                             <   |6 - c^2 + 2e^{-it} - 3e^{-it} c^2|
                                                                                        -2 (x^2-4)(x^2-1)(5+3y)
        (c) |2 (1 + e^{-it}) - 3 e^{-it} c^2|             <   |4 - c^2|              4 [2 (x^2-1)(x^2+1-y) - x^2 (y+1)]

    with c = x = cos(beta), y = cos(t). Part (c) is stated for beta != pi/2 and t != 2k pi.
    """
    if part not in ("a", "b", "c"):
        raise ParameterError(f"unknown lemma part {part!r}, choose from a, b, c")
    if not 0 < beta < math.pi:
        raise ParameterError(f"beta={beta} outside (0, pi)")
    if not math.isfinite(theta):
        raise ParameterError("theta must be finite")
    if part == "c" and (angle_close(beta, math.pi / 2) or angle_close(theta, 0.0)):
        raise ParameterError("part (c) needs beta != pi/2 and theta != 2k pi")
    return _lemma_gap(part, beta, theta)


def lemma_holds(part, gap, tol=1e-12):
    """ Direction of the inequality: <= for (a), strict for (b) and (c). """
    return gap <= tol if part == "a" else gap < 0


# expanded reductions of the proof chains

def _rotations(beta, theta):
    lam = complex(np.exp(1j * theta))
    return math.cos(beta), lam, lam.conjugate()


def printed_p1(a, beta, theta):
    """ (1 + 2a - 3a^2)/4 [3 z^2 + 2 (2c + e^{-it}) z + (2c e^{-it} + 1)]. """
    c, _, lam_bar = _rotations(beta, theta)
    k = (1 + 2 * a - 3 * a ** 2) / 4
    return CPoly(k * np.array([2 * c * lam_bar + 1, 2 * (2 * c + lam_bar), 3.0]))


def printed_p2(a, beta, theta):
    """ (1 + 2a - 3a^2)^2/16 [(9 - |2c + e^{it}|^2) z + 6 (2c + e^{-it}) - 2 e^{-it} (2c + e^{it})^2]. """
    c, lam, lam_bar = _rotations(beta, theta)
    k = (1 + 2 * a - 3 * a ** 2) ** 2 / 16
    return CPoly(k * np.array([6 * (2 * c + lam_bar) - 2 * lam_bar * (2 * c + lam) ** 2,
                               9 - abs(2 * c + lam) ** 2]))


def printed_z0(beta, theta):
    """ Zero of p2: (-2c + 4 e^{-it} c^2 - 3 e^{-it} + e^{it}) / (4 - 2c^2 - 2c cos t). """
    c, lam, lam_bar = _rotations(beta, theta)
    return (-2 * c + 4 * lam_bar * c ** 2 - 3 * lam_bar + lam) / (4 - 2 * c ** 2 - 2 * c * math.cos(theta))


def printed_q1(a, beta, theta):
    """ 2a (1 - a) (2 z^3 + 3c z^2 + (1 + e^{-it}) z + e^{-it} c). """
    c, _, lam_bar = _rotations(beta, theta)
    return CPoly(2 * a * (1 - a) * np.array([lam_bar * c, 1 + lam_bar, 3 * c, 2.0]))


def printed_q2(a, beta, theta):
    """ 4 (a (1 - a))^2 [(4 - c^2) z^2 + c (5 - e^{-it}) z + 2 (1 + e^{-it}) - 3 e^{-it} c^2]. """
    c, _, lam_bar = _rotations(beta, theta)
    return CPoly(4 * (a * (1 - a)) ** 2 * np.array([2 * (1 + lam_bar) - 3 * lam_bar * c ** 2,
                                                    c * (5 - lam_bar),
                                                    4 - c ** 2]))


def printed_q3(a, beta, theta):
    """
    16 (a (1 - a))^4 {[(4 - c^2)^2 - (2 (1 + e^{-it}) - 3 e^{-it} c^2)^2] z
                      + c (5 - e^{-it}) [(4 - c^2) - 2 (1 + e^{-it}) + 3 e^{-it} c^2]}.

    Written with real-coefficient algebra: it equals the computed reduction of q2 for
    theta = 0 (mod 2 pi) only. Its zero has modulus |c (e^{-it} - 5)| / |6 - c^2 + 2 e^{-it} - 3 e^{-it} c^2|.
    """
    c, _, lam_bar = _rotations(beta, theta)
    c0 = 2 * (1 + lam_bar) - 3 * lam_bar * c ** 2
    c2 = 4 - c ** 2
    return CPoly(16 * (a * (1 - a)) ** 4 * np.array([c * (5 - lam_bar) * (c2 - c0), c2 ** 2 - c0 ** 2]))


def _residual(p, q):
    length = max(p.coeffs.shape[0], q.coeffs.shape[0])
    return float(np.abs(p.padded(length) - q.padded(length)).max(initial=0.0))


def _roots(p):
    """ Roots by the default oracle, retried with the companion matrix. """
    if p.degree < 1:
        return np.zeros(0, dtype=np.complex128)
    try:
        return find_roots(p)
    except ConvergenceError as e:
        logger.debug("%s, retrying with companion matrix", e)
        return find_roots(p, method="companion")


def _transcribe(p, depth):
    """
    Up to ``depth`` unnormalized Cohn steps. Returns the steps, the polynomial reached and
    whether every step was applicable.
    """
    steps, current = [], p
    while len(steps) < depth and current.degree >= 1:
        step = cohn_reduce(current)
        steps.append(step)
        if not step.applicable:
            return tuple(steps), current, False
        current = step.reduced
    return tuple(steps), current, True


def _chain_count(steps, terminal):
    """ Zero count of a completed chain: one inside per step plus the terminal roots. """
    roots = _roots(terminal)
    rest = classify_roots(roots)
    reduced = sum(1 for s in steps if s.applicable)
    return ZeroCount(inside=reduced + rest.inside, on=rest.on, outside=rest.outside), tuple(complex(r) for r in roots)


def _special(value, target, tol=config.SPECIAL_CASE_TOL):
    return abs(value - target) <= tol


# grid evaluation and witnesses

def dilatation_grid_max(dilatation, grid=config.VERIFY_GRID):
    """
    Largest |dilatation| over a polar grid and the first point attaining it
    (row-major order: radius, then angle). Poles evaluate to inf.
    """
    z = polar_grid(grid)
    values = np.abs(dilatation(z))
    values = np.where(np.isfinite(values), values, np.inf)
    idx = np.unravel_index(np.argmax(values), values.shape)
    return float(values[idx]), complex(z[idx])


def _pole_neighbours(dilatation, offset=1e-6):
    """ Points just inside the disk next to each pole of the dilatation in |z| < 1. """
    if dilatation.den.degree < 1:
        return []
    poles = [p for p in _roots(dilatation.den) if abs(p) < 1]
    return [p * (1 - offset / abs(p)) if abs(p) > offset else p + offset for p in poles]


def _witness(dilatation, value, point):
    if value > 1 + config.DELTA_GRID:
        return point
    for z in _pole_neighbours(dilatation):
        if abs(dilatation(z)) > 1 + config.DELTA_GRID:
            return complex(z)
    return None


def _report(params, zero_count, dilatation, grid, trace, method):
    value, point = dilatation_grid_max(dilatation, grid)
    passed = zero_count.outside == 0 and value < 1 + config.DELTA_GRID
    witness = None if passed else _witness(dilatation, value, point)
    if not passed:
        logger.info("verification failed at %s: outside=%d max|w|=%.6g", params, zero_count.outside, value)
    return VerificationReport(params=params, zero_count=zero_count, max_abs_dilatation=value, grid_spec=grid,
                              passed=passed, witness=witness, trace=trace, method=method)


def _fallback_trace(steps, current, **kwargs):
    roots = _roots(current)
    logger.debug("reduction chain stopped at degree %d, counting by root oracle", current.degree)
    return CohnChainTrace(steps=steps, terminal_roots=tuple(complex(r) for r in roots), fallback=True, **kwargs)


# verification pipelines

def verify_n1(a, beta, theta, grid=config.VERIFY_GRID):
    """
    Dilatation e^{i theta} z: replay p -> p1 -> p2 and locate the zero z0 of p2.

    a = -1/3 collapses the dilatation to -e^{i theta} z; at a = 1/3 the cubic p has the
    factor z and the chain runs on the remaining quadratic.
    """
    params = ParamSet(a, beta, theta, 1)
    dilatation = tilde_omega_closed(params)

    if _special(a, -1 / 3):
        logger.debug("a = -1/3: constant-modulus dilatation")
        trace = CohnChainTrace(special_case="a=-1/3")
        return _report(params, count_zeros_unit_circle(dilatation.num), dilatation, grid, trace, "special")

    p = build_p(a, beta, theta)

    if _special(a, 1 / 3):
        c, _, lam_bar = _rotations(beta, theta)
        quadratic = CPoly([2 * c * lam_bar + 1, 2 * (2 * c + lam_bar), 3.0])
        steps, current, complete = _transcribe(quadratic, 1)
        if not complete:
            trace = _fallback_trace(steps, current, special_case="a=1/3")
            return _report(params, count_zeros_unit_circle(p), dilatation, grid, trace, "transcript")
        count, roots = _chain_count(steps, current)
        count = ZeroCount(inside=count.inside + 1, on=count.on, outside=count.outside)
        trace = CohnChainTrace(steps=steps, terminal_roots=roots, special_case="a=1/3")
        return _report(params, count, dilatation, grid, trace, "transcript")

    steps, current, complete = _transcribe(p, 2)
    if not complete:
        trace = _fallback_trace(steps, current)
        return _report(params, count_zeros_unit_circle(p), dilatation, grid, trace, "transcript")

    p1, p2 = steps[0].reduced, steps[1].reduced
    z0 = printed_z0(beta, theta)
    residuals = {"p1": _residual(p1, printed_p1(a, beta, theta)),
                 "p2": _residual(p2, printed_p2(a, beta, theta)),
                 "z0": abs(z0 + p2.coeffs[0] / p2.coeffs[1])}

    count, roots = _chain_count(steps, p2)
    oracle = count_zeros_unit_circle(p)
    if count != oracle:
        logger.warning("chain count %s differs from oracle count %s at %s", count, oracle, params)
    if abs(z0) > 1 + config.DELTA_ON:
        logger.warning("|z0| = %.12g exceeds 1 at %s", abs(z0), params)

    trace = CohnChainTrace(steps=steps, terminal_roots=roots, z0=complex(z0), printed_residuals=residuals,
                           gates={"lemma_a": _lemma_gap("a", beta, theta).gap,
                                  "z0_modulus": abs(z0) - 1})
    return _report(params, count, dilatation, grid, trace, "transcript")


def verify_n2(a, beta, theta, grid=config.VERIFY_GRID):
    """
    Dilatation e^{i theta} z^2: replay q -> q1 -> q2 -> q3.

    a = 0 is left to the oracle and the grid; at a = 1/2 the quartic has the factor z; for
    beta = pi/2 and theta = 2k pi the chain stops at q2 = 16 (a (1 - a))^2 (z^2 + 1). The
    reduction of q2 is gated by inequality (c) and the zero of q3 is compared with (b).
    """
    params = ParamSet(a, beta, theta, 2)
    dilatation = tilde_omega_closed(params)

    if _special(a, 0.0):
        logger.debug("a = 0: oracle and grid only")
        trace = CohnChainTrace(special_case="a=0")
        return _report(params, count_zeros_unit_circle(dilatation.num), dilatation, grid, trace, "numeric")

    q = build_q(a, beta, theta)

    if _special(a, 0.5):
        c, _, lam_bar = _rotations(beta, theta)
        cubic = CPoly([lam_bar * c, 1 + lam_bar, 3 * c, 2.0])
        steps, current, complete = _transcribe(cubic, 3)
        if not complete:
            trace = _fallback_trace(steps, current, special_case="a=1/2")
            return _report(params, count_zeros_unit_circle(q), dilatation, grid, trace, "transcript")
        count, roots = _chain_count(steps, current)
        count = ZeroCount(inside=count.inside + 1, on=count.on, outside=count.outside)
        trace = CohnChainTrace(steps=steps, terminal_roots=roots, special_case="a=1/2")
        return _report(params, count, dilatation, grid, trace, "transcript")

    symmetric = angle_close(beta, math.pi / 2) and angle_close(theta, 0.0)
    steps, current, complete = _transcribe(q, 2)
    if not complete:
        trace = _fallback_trace(steps, current)
        return _report(params, count_zeros_unit_circle(q), dilatation, grid, trace, "transcript")

    q1, q2 = steps[0].reduced, steps[1].reduced
    residuals = {"q1": _residual(q1, printed_q1(a, beta, theta)),
                 "q2": _residual(q2, printed_q2(a, beta, theta))}

    if symmetric:
        residuals["q2_symmetric"] = _residual(q2, CPoly(16 * (a * (1 - a)) ** 2 * np.array([1.0, 0.0, 1.0])))
        count, roots = _chain_count(steps, q2)
        trace = CohnChainTrace(steps=steps, terminal_roots=roots, special_case="beta=pi/2,theta=2k*pi",
                               printed_residuals=residuals)
        return _report(params, count, dilatation, grid, trace, "transcript")

    gates = {"lemma_c": _lemma_gap("c", beta, theta).gap, "lemma_b": _lemma_gap("b", beta, theta).gap}
    step3 = cohn_reduce(q2)
    if not step3.applicable:
        trace = _fallback_trace(steps + (step3,), q2, printed_residuals=residuals, gates=gates)
        return _report(params, count_zeros_unit_circle(q), dilatation, grid, trace, "transcript")

    steps = steps + (step3,)
    q3 = step3.reduced
    residuals["q3"] = _residual(q3, printed_q3(a, beta, theta))

    count, roots = _chain_count(steps, q3)
    oracle = count_zeros_unit_circle(q)
    if count != oracle:
        logger.warning("chain count %s differs from oracle count %s at %s", count, oracle, params)

    trace = CohnChainTrace(steps=steps, terminal_roots=roots, printed_residuals=residuals, gates=gates)
    return _report(params, count, dilatation, grid, trace, "transcript")


def verify_general(params, grid=config.VERIFY_GRID):
    """
    Numeric pipeline for any n: zero count of the bracket polynomial (Cohn's rule with the
    root oracle as fallback) and the grid maximum of |dilatation|.
    """
    dilatation = tilde_omega_closed(params)
    t = dilatation.num
    if t.degree < 1:
        trace = CohnChainTrace(special_case="constant-modulus")
        return _report(params, ZeroCount(0, 0, 0), dilatation, grid, trace, "numeric")

    count = count_zeros_unit_circle(t)
    trace = CohnChainTrace(terminal_roots=tuple(complex(r) for r in _roots(t)))
    return _report(params, count, dilatation, grid, trace, "numeric")


def verify(params, grid=config.VERIFY_GRID):
    """ Dispatch by n: transcripts for n = 1, 2, the numeric pipeline otherwise. """
    if params.n == 1:
        return verify_n1(params.a, params.beta, params.theta, grid=grid)
    if params.n == 2:
        return verify_n2(params.a, params.beta, params.theta, grid=grid)
    return verify_general(params, grid=grid)


def counterexample_search(params, fine_grid=config.WITNESS_GRID):
    """
    Point maximizing |dilatation| for one parameter set: the fine grid's maximum, points next
    to poles inside the disk, and an L-BFGS-B refinement over (radius, angle) of the grid
    maximum. Returns a Witness when the value exceeds 1 + DELTA_GRID, otherwise None.
    """
    dilatation = tilde_omega_closed(params)
    value, point = dilatation_grid_max(dilatation, fine_grid)

    def objective(x):
        v = abs(dilatation(x[0] * np.exp(1j * x[1])))
        return -min(v, 1e300) if np.isfinite(v) else -1e300

    if np.isfinite(value):
        result = spo.minimize(objective, x0=[abs(point), np.angle(point)], method="L-BFGS-B",
                              bounds=[(0.0, fine_grid.max_radius), (None, None)])
        refined = -float(result.fun)
        if refined > value:
            value, point = refined, complex(result.x[0] * np.exp(1j * result.x[1]))

    for z in _pole_neighbours(dilatation):
        v = float(abs(dilatation(z)))
        if np.isfinite(v) and (v > value or not np.isfinite(value)):
            value, point = v, complex(z)

    if np.isfinite(value) and value > 1 + config.DELTA_GRID:
        return Witness(z=point, value=value)
    return None


def _scan_a(args):
    """ Worst case over the (beta, theta) grid for one value of a. """
    n, a, betas, thetas, grid = args
    worst_outside, worst_value, passed = 0, 0.0, True

    for beta in betas:
        for theta in thetas:
            params = ParamSet(float(a), float(beta), float(theta), n)
            dilatation = tilde_omega_closed(params)
            count = count_zeros_unit_circle(dilatation.num)
            value, _ = dilatation_grid_max(dilatation, grid)

            worst_outside = max(worst_outside, count.outside)
            worst_value = max(worst_value, value)
            passed = passed and count.outside == 0 and value < 1 + config.DELTA_GRID

    return CurvePoint(a=float(a), worst_outside=worst_outside, worst_max_abs=worst_value, passed=passed)


def _map(function, iterator, max_workers):
    if max_workers == 1:
        return list(map(function, iterator))
    try:
        with futures.ProcessPoolExecutor(max_workers=max_workers) as executor:
            return list(executor.map(function, iterator))
    except (OSError, BrokenProcessPool) as e:
        warnings.warn(f"Process pool unavailable ({e}). Reverting to serial scan.")
        return list(map(function, iterator))


def conjecture_scan(n,
                    a_step=0.01,
                    beta_samples=config.BETA_SAMPLES,
                    theta_samples=config.THETA_SAMPLES,
                    a_min=None,
                    a_max=None,
                    grid=config.SCAN_GRID,
                    max_workers=None):
    """
    Scan a over a grid and report the smallest a from which every larger grid value passes
    on the whole (beta, theta) grid.

    Parameters
    ----------
    n (int): dilatation power.
    a_step (float): a-grid resolution, in (0, 0.1].
    beta_samples, theta_samples (int): (beta, theta) grid size.
    a_min, a_max (float): optional a-range, default the whole interval (-1, 1).
    grid (GridSpec): polar grid of the |dilatation| scan.
    max_workers (int): worker processes; defaults to HARMCONV_THREADS or all cores.

    Returns
    -------
    ConjectureCurve; a_star is None when the largest scanned a fails.
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"n={n} must be a positive integer")

    values = a_grid(a_step, a_min=a_min, a_max=a_max)
    betas, thetas = beta_theta_grid(beta_samples, theta_samples)
    iterator = [(int(n), a, betas, thetas, grid) for a in values]

    workers = config.num_workers(max_workers)
    logger.info("scanning n=%d over %d values of a on %d workers", n, len(iterator), workers)
    curve = _map(_scan_a, iterator, workers)

    a_star, failed_above, violations = None, False, []
    for point in reversed(curve):
        if point.passed and not failed_above:
            a_star = point.a
        elif point.passed:
            violations.append(point.a)
        else:
            failed_above = True

    for a in sorted(violations):
        logger.warning("n=%d passes at a=%g but fails for a larger grid value", n, a)

    return ConjectureCurve(n=int(n), a_star=a_star, threshold=threshold(n), curve=tuple(curve),
                           violations=tuple(sorted(violations)))
