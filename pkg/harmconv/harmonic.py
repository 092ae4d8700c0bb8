"""
Planar harmonic mappings f = h + conj(g) of the unit disk.

Three variants share one interface: the right half-plane maps F_a = H_a + conj(G_a)
with dilatation (a - z)/(1 - az), the vertical-strip shears f_beta = h_beta + conj(g_beta)
whose sum h_beta + g_beta is the strip map, and maps given by truncated Taylor series.
Closed forms are evaluated directly; series are handled with formal power-series
algebra (division through ``scipy.signal.lfilter``), never numeric differentiation.
"""
import abc
import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from harmconv import config
from harmconv.errors import ParameterError
from harmconv.polytools import CPoly, RationalFn
from harmconv.utils import disk_points, pad, polar_grid, series_integrate, series_quotient, series_ratio, \
    truncation_for_radius


class Dilatation(abc.ABC):
    """ Analytic self-map of the disk used as a prescribed dilatation. """

    @abc.abstractmethod
    def __call__(self, z):
        pass

    @abc.abstractmethod
    def derivative(self, z):
        pass

    @abc.abstractmethod
    def polynomials(self):
        """ (P, Q) with omega = P / Q and Q(0) != 0. """

    @abc.abstractmethod
    def as_rational(self):
        pass

    def series(self, order):
        p, q = self.polynomials()
        return series_ratio(p.coeffs, q.coeffs, order)


@dataclass(frozen=True)
class Moebius(Dilatation):
    """ omega(z) = (a - z) / (1 - a z), |a| < 1. """
    a: float

    def __post_init__(self):
        if not -1 < self.a < 1:
            raise ParameterError(f"Moebius parameter a={self.a} outside (-1, 1)")

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return ((self.a - z) / (1 - self.a * z))[()]

    def derivative(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return ((self.a ** 2 - 1) / (1 - self.a * z) ** 2)[()]

    def polynomials(self):
        return CPoly([self.a, -1.0]), CPoly([1.0, -self.a])

    def as_rational(self):
        num, den = self.polynomials()
        return RationalFn(num=num, den=den)


@dataclass(frozen=True)
class RotatedPower(Dilatation):
    """ omega(z) = e^{i theta} z^n, n >= 1. """
    theta: float
    n: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"power n={self.n} must be a positive integer")
        if not math.isfinite(self.theta):
            raise ParameterError("theta must be finite")
        object.__setattr__(self, "n", int(self.n))

    @property
    def rotation(self):
        return complex(np.exp(1j * self.theta))

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return (self.rotation * z ** self.n)[()]

    def derivative(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return (self.n * self.rotation * z ** (self.n - 1))[()]

    def polynomials(self):
        return CPoly.monomial(self.n, self.rotation), CPoly([1.0])

    def as_rational(self):
        return RationalFn(num=CPoly([1.0]), den=CPoly([1.0]), prefactor=self.rotation, power=self.n)


@dataclass(frozen=True)
class TaylorPair:
    """ Coefficients a[0..N] of h and b[0..N] of g. """
    a: np.ndarray
    b: np.ndarray
    N: int


class HarmonicMap(abc.ABC):
    """
    f = h + conj(g) on the unit disk. Subclasses provide pointwise h, g and their
    derivatives plus Taylor coefficients to any order.
    """

    @abc.abstractmethod
    def h(self, z):
        pass

    @abc.abstractmethod
    def g(self, z):
        pass

    @abc.abstractmethod
    def dh(self, z):
        pass

    @abc.abstractmethod
    def dg(self, z):
        pass

    def d2h(self, z):
        raise NotImplementedError(f"{type(self).__name__} has no closed-form second derivative")

    def d2g(self, z):
        raise NotImplementedError(f"{type(self).__name__} has no closed-form second derivative")

    @abc.abstractmethod
    def coefficients(self, order):
        """ Taylor coefficients (a, b) of h and g, indices 0..order. """

    def dilatation(self):
        """ Closed-form dilatation as a RationalFn, or None when only the series is known. """
        return None

    def describe(self):
        return {"type": type(self).__name__}

    @property
    def normalized_sh0(self):
        """ g'(0) = 0. """
        return bool(abs(self.coefficients(1)[1][1]) < 1e-14)


@dataclass(frozen=True)
class HalfPlane(HarmonicMap):
    """
    Right half-plane map F_a = H_a + conj(G_a) with H_a + G_a = z / (1 - z):

        H_a(z) = (z/(1+a) - z^2/2) / (1-z)^2,   G_a(z) = (a z/(1+a) - z^2/2) / (1-z)^2.
    """
    a: float

    def __post_init__(self):
        if not -1 < self.a < 1:
            raise ParameterError(f"half-plane parameter a={self.a} outside (-1, 1)")

    def _z(self, z):
        return disk_points(z, pole_band=config.POLE_BAND)

    def h(self, z):
        z = self._z(z)
        return ((z / (1 + self.a) - z ** 2 / 2) / (1 - z) ** 2)[()]

    def g(self, z):
        z = self._z(z)
        return ((self.a * z / (1 + self.a) - z ** 2 / 2) / (1 - z) ** 2)[()]

    def dh(self, z):
        z = self._z(z)
        return ((1 - self.a * z) / ((1 + self.a) * (1 - z) ** 3))[()]

    def dg(self, z):
        z = self._z(z)
        return ((self.a - z) / ((1 + self.a) * (1 - z) ** 3))[()]

    def d2h(self, z):
        z = self._z(z)
        return ((3 - self.a - 2 * self.a * z) / ((1 + self.a) * (1 - z) ** 4))[()]

    def d2g(self, z):
        z = self._z(z)
        return ((3 * self.a - 1 - 2 * z) / ((1 + self.a) * (1 - z) ** 4))[()]

    def coefficients(self, order):
        k = np.arange(order + 1, dtype=np.float64)
        a = (k / (1 + self.a) - (k - 1) / 2).astype(np.complex128)
        b = (k * self.a / (1 + self.a) - (k - 1) / 2).astype(np.complex128)
        a[0] = b[0] = 0
        return a, b

    @property
    def kappa(self):
        """ (1 - a) / (1 + a), the weight of z h' in convolutions with F_a. """
        return (1 - self.a) / (1 + self.a)

    def dilatation(self):
        return Moebius(self.a).as_rational()

    def describe(self):
        return {"type": "HalfPlane", "a": self.a}


@functools.lru_cache(maxsize=64)
def _shear_coefficients(beta, omega, order):
    """
    Taylor coefficients of h and g with h' = s' Q / (Q + P), g' = s' P / (Q + P),
    s' = 1 / (1 + 2 z cos(beta) + z^2), omega = P / Q.
    """
    p, q = omega.polynomials()
    s_den = np.array([1.0, 2 * math.cos(beta), 1.0], dtype=np.complex128)
    den = npoly.polymul((q + p).coeffs, s_den)
    dh = series_ratio(q.coeffs, den, order - 1)
    dg = series_ratio(p.coeffs, den, order - 1)
    a, b = series_integrate(dh), series_integrate(dg)
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


@dataclass(frozen=True)
class StripShear(HarmonicMap):
    """
    Shear of the vertical-strip map with prescribed dilatation omega:

        h + g = log((1 + z e^{i beta}) / (1 + z e^{-i beta})) / (2 i sin(beta)),   g' = omega h'.

    Derivatives are exact; h and g are summed from Taylor coefficients at an order
    chosen from the largest |z| requested.
    """
    beta: float
    omega: Dilatation
    truncation: int = config.DEFAULT_TRUNCATION

    def __post_init__(self):
        if not 0 < self.beta < math.pi:
            raise ParameterError(f"beta={self.beta} outside (0, pi)")
        if not isinstance(self.omega, Dilatation):
            raise ParameterError("omega must be a Dilatation")

    @property
    def cos_beta(self):
        return math.cos(self.beta)

    def _quadratic(self, z):
        return 1 + 2 * self.cos_beta * z + z ** 2

    def _series(self, z):
        radius = float(np.abs(z).max(initial=0.0))
        order = max(self.truncation, truncation_for_radius(radius))
        return _shear_coefficients(self.beta, self.omega, order)

    def h(self, z):
        z = disk_points(z)
        return npoly.polyval(z, self._series(z)[0])[()]

    def g(self, z):
        z = disk_points(z)
        return npoly.polyval(z, self._series(z)[1])[()]

    def dh(self, z):
        z = disk_points(z)
        return (1 / ((1 + self.omega(z)) * self._quadratic(z)))[()]

    def dg(self, z):
        z = disk_points(z)
        return (self.omega(z) * self.dh(z))[()]

    def d2h(self, z):
        z = disk_points(z)
        w, dw, quad = self.omega(z), self.omega.derivative(z), self._quadratic(z)
        num = 2 * (self.cos_beta + z) * (1 + w) + dw * quad
        return (-num / ((1 + w) ** 2 * quad ** 2))[()]

    def d2g(self, z):
        z = disk_points(z)
        return (self.omega.derivative(z) * self.dh(z) + self.omega(z) * self.d2h(z))[()]

    def coefficients(self, order):
        a, b = _shear_coefficients(self.beta, self.omega, max(order, 2))
        return pad(a, order + 1), pad(b, order + 1)

    def dilatation(self):
        return self.omega.as_rational()

    def describe(self):
        return {"type": "StripShear", "beta": self.beta, "omega": _describe_omega(self.omega)}


def _describe_omega(omega):
    if isinstance(omega, Moebius):
        return {"type": "Moebius", "a": omega.a}
    return {"type": "RotatedPower", "theta": omega.theta, "n": omega.n}


@dataclass(frozen=True, eq=False)
class SeriesMap(HarmonicMap):
    """
    h(z) = sum a_k z^k, g(z) = sum b_k z^k, k = 0..N, with a_0 = b_0 = 0.
    """
    h_coeffs: np.ndarray
    g_coeffs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.h_coeffs, dtype=np.complex128).ravel()
        b = np.asarray(self.g_coeffs, dtype=np.complex128).ravel()
        length = max(a.shape[0], b.shape[0], 2)
        a, b = pad(a, length), pad(b, length)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ParameterError("series coefficients must be finite")
        if a[0] != 0 or b[0] != 0:
            raise ParameterError("series maps are normalized by h(0) = g(0) = 0")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "h_coeffs", a)
        object.__setattr__(self, "g_coeffs", b)

    @property
    def truncation(self):
        return self.h_coeffs.shape[0] - 1

    def h(self, z):
        return npoly.polyval(disk_points(z), self.h_coeffs)[()]

    def g(self, z):
        return npoly.polyval(disk_points(z), self.g_coeffs)[()]

    def dh(self, z):
        return npoly.polyval(disk_points(z), npoly.polyder(self.h_coeffs))[()]

    def dg(self, z):
        return npoly.polyval(disk_points(z), npoly.polyder(self.g_coeffs))[()]

    def d2h(self, z):
        return npoly.polyval(disk_points(z), npoly.polyder(self.h_coeffs, 2))[()]

    def d2g(self, z):
        return npoly.polyval(disk_points(z), npoly.polyder(self.g_coeffs, 2))[()]

    def coefficients(self, order):
        return pad(self.h_coeffs, order + 1), pad(self.g_coeffs, order + 1)

    def describe(self):
        return {"type": "Series", "N": self.truncation}


def make_half_plane(a):
    """
    Right half-plane map F_a; its dilatation is (a - z) / (1 - a z).
    """
    f = HalfPlane(float(a))

    if __debug__:
        z = 0.9 * np.exp(2j * np.pi * np.arange(16) / 16) * np.linspace(0.1, 1, 16)
        assert np.allclose(f.h(z) + f.g(z), z / (1 - z), atol=1e-10)
        assert np.allclose(f.dg(z) / f.dh(z), Moebius(f.a)(z), atol=1e-10)

    return f


def make_strip(beta, omega, N=config.DEFAULT_TRUNCATION):
    """
    Shear f_beta of the vertical-strip map with dilatation omega (h_beta + g_beta given by the
    strip map, g_beta' = omega h_beta').
    """
    if not 0 < beta < math.pi:
        raise ParameterError(f"beta={beta} outside (0, pi)")
    return StripShear(float(beta), omega, truncation=int(N))


def shear_from_sum(s_prime_coeffs, omega, N=config.DEFAULT_TRUNCATION):
    """
    Shear with prescribed (h + g)' = s' and dilatation omega, returned as a series map
    truncated at order N: h' = s' / (1 + omega), g' = omega h'.

    Parameters
    ----------
    s_prime_coeffs (array): Taylor coefficients of s', s'(0) = 1.
    omega (Dilatation): prescribed dilatation.
    N (int): truncation order of h and g.
    """
    if N < 2:
        raise ParameterError("truncation N must be >= 2")
    s_prime = np.asarray(s_prime_coeffs, dtype=np.complex128).ravel()
    if s_prime.size == 0 or abs(s_prime[0] - 1) > 1e-12:
        raise ParameterError("the prescribed sum must satisfy s'(0) = 1")

    p, q = omega.polynomials()
    den = (q + p).coeffs
    dh = series_ratio(q.coeffs, den, N - 1, x=s_prime)
    dg = series_ratio(p.coeffs, den, N - 1, x=s_prime)
    return SeriesMap(series_integrate(dh), series_integrate(dg))


def dilatation_of(f):
    """
    Dilatation g'/h' of f: an exact RationalFn for closed forms, otherwise the formal
    quotient series of g'/h' to order N - 1 (as a CPoly).
    """
    closed = f.dilatation()
    if closed is not None:
        return closed

    order = getattr(f, "truncation", config.DEFAULT_TRUNCATION)
    a, b = f.coefficients(order)
    dh, dg = a[1:] * np.arange(1, order + 1), b[1:] * np.arange(1, order + 1)
    if abs(dh[0]) == 0:
        raise ParameterError("degenerate map: h'(0) = 0")
    return CPoly(series_quotient(dg, dh, order - 1))


def eval_map(f, z):
    """ f(z) = h(z) + conj(g(z)) for |z| < 1. """
    return (np.asarray(f.h(z)) + np.conj(f.g(z)))[()]


def jacobian(f, z):
    """ J_f = |h'|^2 - |g'|^2. """
    return (np.abs(f.dh(z)) ** 2 - np.abs(f.dg(z)) ** 2)[()]


def taylor_coeffs(f, N=config.DEFAULT_TRUNCATION):
    if N < 2:
        raise ParameterError("truncation N must be >= 2")
    a, b = f.coefficients(N)
    return TaylorPair(a=a, b=b, N=N)


def strip_sum(z, beta):
    """
    h_beta + g_beta = log((1 + z e^{i beta}) / (1 + z e^{-i beta})) / (2 i sin(beta)).

    For |z| < 1 both 1 + z e^{+-i beta} have positive real part, so the principal logs
    of numerator and denominator have arguments in (-pi/2, pi/2) and their difference
    is the principal log of the ratio.
    """
    z = disk_points(z)
    upper = np.log(1 + z * np.exp(1j * beta))
    lower = np.log(1 + z * np.exp(-1j * beta))
    log_ratio = upper - lower
    assert np.all(np.abs(log_ratio.imag) < np.pi), "strip logarithm left the principal branch"
    return (log_ratio / (2j * math.sin(beta)))[()]


def strip_bounds(beta):
    """ The strip map's image: (beta - pi) / (2 sin beta) < Re w < beta / (2 sin beta). """
    s = 2 * math.sin(beta)
    return (beta - math.pi) / s, beta / s


def is_sense_preserving(f, radius=0.95, samples=100):
    """ Jacobian > 0 on a samples x samples polar grid of |z| <= radius. """
    grid = config.GridSpec(radii=samples, angles=samples, max_radius=radius)
    return bool(np.all(jacobian(f, polar_grid(grid)) > 0))
