"""
Hadamard convolution of harmonic maps with the half-plane maps F_a, and the
dilatation of F_a * f_beta computed three independent ways: the expanded closed
form, the pointwise H'/G' form and the quotient of the convolved series.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from harmconv import config
from harmconv.errors import EvaluationError, ParameterError, StructuralError
from harmconv.harmonic import HalfPlane, HarmonicMap, RotatedPower, SeriesMap, StripShear, dilatation_of, \
    make_half_plane
from harmconv.polytools import CPoly, RationalFn, conj_reciprocal
from harmconv.utils import disk_points

logger = logging.getLogger(__name__)

__all__ = ["ParamSet", "RationalFn", "HalfPlaneConvolution", "hadamard", "convolve_half_plane",
           "build_numerator_general", "tilde_omega_closed", "tilde_omega_HG", "tilde_omega_series",
           "build_p", "build_q", "threshold"]


@dataclass(frozen=True)
class ParamSet:
    """ Half-plane parameter a, strip angle beta, rotation theta and dilatation power n. """
    a: float
    beta: float
    theta: float = 0.0
    n: int = 1

    def __post_init__(self):
        if not -1 < self.a < 1:
            raise ParameterError(f"a={self.a} outside (-1, 1)")
        if not 0 < self.beta < math.pi:
            raise ParameterError(f"beta={self.beta} outside (0, pi)")
        if not math.isfinite(self.theta):
            raise ParameterError("theta must be finite")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n={self.n} must be a positive integer")
        object.__setattr__(self, "n", int(self.n))

    @property
    def rotation(self):
        return complex(np.exp(1j * self.theta))

    @property
    def cos_beta(self):
        return math.cos(self.beta)


def threshold(n):
    """ a = (n - 2) / (n + 2): the bracket polynomial's constant term (n + 2) a - n has modulus 2 here. """
    return (n - 2) / (n + 2)


def hadamard(F, f, N=config.DEFAULT_TRUNCATION):
    """
    Hadamard product of two harmonic maps, truncated at order N:

        (F * f)(z) = sum a_k A_k z^k + conj(sum b_k B_k z^k).
    """
    if N < 2:
        raise ParameterError("truncation N must be >= 2")
    A, B = F.coefficients(N)
    a, b = f.coefficients(N)
    return SeriesMap(A * a, B * b)


@dataclass(frozen=True, eq=False)
class HalfPlaneConvolution(HarmonicMap):
    """
    Exact convolution F_a * f. With k = (1 - a)/(1 + a) the half-plane coefficients are
    A_j = (1 + j k)/2 and B_j = (1 - j k)/2, so

        H = (h + k z h') / 2,   G = (g - k z g') / 2.

    Derivatives need the closed-form second derivatives of f.
    """
    F: HalfPlane
    f: HarmonicMap

    @property
    def kappa(self):
        return self.F.kappa

    @property
    def truncation(self):
        return getattr(self.f, "truncation", config.DEFAULT_TRUNCATION)

    def h(self, z):
        z = disk_points(z)
        return ((self.f.h(z) + self.kappa * z * self.f.dh(z)) / 2)[()]

    def g(self, z):
        z = disk_points(z)
        return ((self.f.g(z) - self.kappa * z * self.f.dg(z)) / 2)[()]

    def dh(self, z):
        z = disk_points(z)
        return (((1 + self.kappa) * self.f.dh(z) + self.kappa * z * self.f.d2h(z)) / 2)[()]

    def dg(self, z):
        z = disk_points(z)
        return (((1 - self.kappa) * self.f.dg(z) - self.kappa * z * self.f.d2g(z)) / 2)[()]

    def coefficients(self, order):
        A, B = self.F.coefficients(order)
        a, b = self.f.coefficients(order)
        return A * a, B * b

    def dilatation(self):
        f = self.f
        if isinstance(f, StripShear) and isinstance(f.omega, RotatedPower):
            return tilde_omega_closed(ParamSet(self.F.a, f.beta, f.omega.theta, f.omega.n))
        return None

    def describe(self):
        return {"type": "HalfPlaneConvolution", "a": self.F.a, "f": self.f.describe()}


def convolve_half_plane(a, f):
    return HalfPlaneConvolution(make_half_plane(a), f)


def build_numerator_general(params):
    """
    Expand the dilatation of F_a * f_beta with omega = e^{i theta} z^n as polynomials in z.

    The numerator 2 w (1 + w)(a + (a + 1) c z + z^2) - z w' (1 - a)(1 + 2 c z + z^2) carries the
    factor e^{i theta} z^n; what is left is the bracket polynomial t of degree n + 2. The
    denominator 2 (1 + (1 + a) c z + a z^2)(1 + w) - z w' (1 - a)(1 + 2 c z + z^2) equals
    e^{i theta} t*, so that the dilatation is z^n t / t*.

    Returns
    -------
    RationalFn(num=t, den=denominator, prefactor=e^{i theta}, power=n)
    """
    a, c, n, lam = params.a, params.cos_beta, params.n, params.rotation

    w = CPoly.monomial(n, lam)
    z_dw = CPoly.monomial(n, n * lam)
    one_plus_w = 1.0 + w
    quadratic = CPoly([1.0, 2 * c, 1.0])

    num = 2.0 * w * one_plus_w * CPoly([a, (a + 1) * c, 1.0]) - (1 - a) * z_dw * quadratic
    den = 2.0 * CPoly([1.0, (1 + a) * c, a]) * one_plus_w - (1 - a) * z_dw * quadratic

    coeffs = num.padded(n + 1)
    if np.abs(coeffs[:n]).max(initial=0.0) > config.SELF_INVERSIVE_TOL * num.scale:
        raise StructuralError(f"numerator does not carry the factor z^{n}")
    t = CPoly(coeffs[n:] / lam)
    assert t.degree == n + 2

    reciprocal = conj_reciprocal(t)
    length = n + 3
    if not np.allclose(den.padded(length), lam * reciprocal.padded(length),
                       rtol=0, atol=config.SELF_INVERSIVE_TOL * max(t.scale, 1.0)):
        raise StructuralError(f"denominator is not e^(i theta) t* for {params}")

    return RationalFn(num=t, den=den, prefactor=lam, power=n)


def _proportionality(t, d):
    """ Least-squares k with t ~ k d and the relative misfit. """
    length = max(t.coeffs.shape[0], d.coeffs.shape[0])
    tv, dv = t.padded(length), d.padded(length)
    k = np.vdot(dv, tv) / np.vdot(dv, dv)
    misfit = np.abs(tv - k * dv).max() / max(t.scale, 1e-300)
    return k, misfit


def tilde_omega_closed(params, tol=config.DEGENERATE_TOL):
    """
    Closed-form dilatation of F_a * f_beta for omega = e^{i theta} z^n.

    When the bracket polynomial is proportional to the denominator (a = (n - 2)/(n + 2),
    where t = -e^{i theta} t*) the dilatation is the monomial -e^{i theta} z^n and is returned
    as such, with trivial numerator and denominator.
    """
    closed = build_numerator_general(params)
    k, misfit = _proportionality(closed.num, closed.den)
    if misfit <= tol:
        logger.debug("degenerate dilatation at %s: constant ratio %s", params, k)
        return RationalFn(num=CPoly([1.0]), den=CPoly([1.0]),
                          prefactor=closed.prefactor * k / abs(k), power=closed.power)
    return closed


def tilde_omega_HG(a, f, tol=config.EVAL_DENOMINATOR_TOL):
    """
    Pointwise dilatation of F_a * f from the derivatives of f:

        (2 a g' - (1 - a) z g'') / (2 h' + (1 - a) z h'').

    Raises EvaluationError (with the point) where the denominator modulus is below tol.
    """
    if not -1 < a < 1:
        raise ParameterError(f"a={a} outside (-1, 1)")

    def evaluate(z):
        z = disk_points(z)
        dh, d2h = f.dh(z), f.d2h(z)
        dg, d2g = f.dg(z), f.d2g(z)
        den = np.asarray(2 * dh + (1 - a) * z * d2h)

        small = np.abs(den) < tol
        if np.any(small):
            point = complex(np.asarray(z)[small].flat[0]) if np.ndim(z) else complex(z)
            raise EvaluationError(f"vanishing denominator at z={point}", point=point)
        return ((2 * a * dg - (1 - a) * z * d2g) / den)[()]

    return evaluate


def tilde_omega_series(a, f, N=config.SERIES_ORACLE_ORDER):
    """ Taylor polynomial (order N - 1) of the dilatation of the truncated series F_a * f. """
    return dilatation_of(hadamard(make_half_plane(a), f, N))


def build_p(a, beta, theta):
    """
    Cubic of the n = 1 case: dilatation = z p / p* with

        p(z) = e^{i theta} z^3 + (1/2 + a e^{i theta} c + e^{i theta} c + a/2) z^2
               + a (2c + e^{i theta}) z + (3a - 1)/2,   c = cos(beta).
    """
    ParamSet(a, beta, theta, 1)
    c, lam = math.cos(beta), complex(np.exp(1j * theta))
    p = CPoly([(3 * a - 1) / 2, a * (2 * c + lam), 0.5 + a * lam * c + lam * c + a / 2, lam])

    printed_reciprocal = np.array([lam.conjugate(),
                                   lam.conjugate() * c + a * lam.conjugate() * c + 0.5 + a / 2,
                                   a * (lam.conjugate() + 2 * c),
                                   (3 * a - 1) / 2])
    if not conj_reciprocal(p).allclose(printed_reciprocal):
        raise StructuralError("conj_reciprocal(p) differs from the expanded p*")

    if a == 1 / 3:
        factor = CPoly([2 * c * lam.conjugate() + 1, 2 * (2 * c + lam.conjugate()), 3.0])
        assert p.allclose(CPoly.monomial(1, lam / 3) * factor)
    return p


def build_q(a, beta, theta):
    """
    Quartic of the n = 2 case: dilatation = e^{2 i theta} z^2 q / q* with

        q(z) = z^4 + c (a + 1) z^3 + a (1 + e^{-i theta}) z^2 + e^{-i theta} c (3a - 1) z
               + e^{-i theta} (2a - 1).
    """
    ParamSet(a, beta, theta, 2)
    c, lam_bar = math.cos(beta), complex(np.exp(-1j * theta))
    q = CPoly([lam_bar * (2 * a - 1), lam_bar * c * (3 * a - 1), a * (1 + lam_bar), c * (a + 1), 1.0])

    lam = lam_bar.conjugate()
    printed_reciprocal = np.array([1.0, c * (a + 1), a * (1 + lam), lam * c * (3 * a - 1), lam * (2 * a - 1)])
    if not conj_reciprocal(q).allclose(printed_reciprocal):
        raise StructuralError("conj_reciprocal(q) differs from the expanded q*")

    if a == 0.5:
        cubic = CPoly([lam_bar * c, 1 + lam_bar, 3 * c, 2.0])
        assert q.allclose(CPoly.monomial(1, 0.5) * cubic)
    return q
