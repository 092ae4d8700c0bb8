import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.cluster import hierarchy

from harmconv import config
from harmconv.errors import ParameterError, StructuralError

logger = logging.getLogger(__name__)


def _as_coeffs(coeffs):
    c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128)).ravel().copy()
    if not np.all(np.isfinite(c)):
        raise ParameterError("polynomial coefficients must be finite")
    return c


@dataclass(frozen=True, eq=False)
class CPoly:
    """
    Complex polynomial with ascending coefficients, c[0] + c[1] z + ... + c[n] z^n.

    Trailing coefficients with modulus <= trim_eps are dropped at construction;
    trim_eps defaults to TRIM_RELATIVE times the largest coefficient modulus.
    The zero polynomial has no coefficients and degree -1.
    """
    coeffs: np.ndarray
    trim_eps: Optional[float] = None

    def __post_init__(self):
        c = _as_coeffs(self.coeffs)
        scale = float(np.abs(c).max()) if c.size else 0.0
        eps = config.TRIM_RELATIVE * scale if self.trim_eps is None else float(self.trim_eps)

        keep = np.nonzero(np.abs(c) > eps)[0]
        c = c[:keep[-1] + 1] if keep.size else c[:0]
        c.setflags(write=False)

        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "trim_eps", eps)

    @classmethod
    def monomial(cls, k, value=1.0):
        c = np.zeros(k + 1, dtype=np.complex128)
        c[k] = value
        return cls(c)

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    @property
    def is_zero(self):
        return self.coeffs.shape[0] == 0

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs.size else 0j

    @property
    def scale(self):
        """ Largest coefficient modulus. """
        return float(np.abs(self.coeffs).max()) if self.coeffs.size else 0.0

    def padded(self, length):
        """ Coefficients zero-padded to ``length`` entries. """
        out = np.zeros(max(length, self.coeffs.shape[0]), dtype=np.complex128)
        out[:self.coeffs.shape[0]] = self.coeffs
        return out

    def allclose(self, other, tol=1e-10):
        """ Coefficientwise comparison, tolerance relative to the larger scale (absolute below 1). """
        other = other if isinstance(other, CPoly) else CPoly(other)
        length = max(self.coeffs.shape[0], other.coeffs.shape[0])
        diff = np.abs(self.padded(length) - other.padded(length))
        ref = max(self.scale, other.scale, 1.0)
        return bool(diff.max(initial=0.0) <= tol * ref)

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return subtract(self, other)

    def __rsub__(self, other):
        return subtract(other, self)

    def __mul__(self, other):
        return multiply(self, other)

    def __rmul__(self, other):
        return multiply(other, self)

    def __neg__(self):
        return scale(self, -1.0)

    def __truediv__(self, value):
        if isinstance(value, CPoly):
            return NotImplemented
        return scale(self, 1.0 / value)

    def __repr__(self):
        terms = ", ".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in self.coeffs)
        return f"CPoly([{terms}])"


def _lift(p):
    """ Scalars become constant polynomials. """
    if isinstance(p, CPoly):
        return p
    return CPoly(np.atleast_1d(np.asarray(p, dtype=np.complex128)))


def evaluate(p, z):
    """
    Evaluate p at z (scalar or array). The zero polynomial evaluates to 0.
    """
    z = np.asarray(z, dtype=np.complex128)
    if p.is_zero:
        return np.zeros_like(z)[()]
    return npoly.polyval(z, p.coeffs)[()]


def add(p, q):
    p, q = _lift(p), _lift(q)
    return CPoly(npoly.polyadd(p.padded(1), q.padded(1)))


def subtract(p, q):
    p, q = _lift(p), _lift(q)
    return CPoly(npoly.polysub(p.padded(1), q.padded(1)))


def multiply(p, q):
    if not isinstance(p, CPoly):
        return scale(q, p)
    if not isinstance(q, CPoly):
        return scale(p, q)
    if p.is_zero or q.is_zero:
        return CPoly([])
    return CPoly(npoly.polymul(p.coeffs, q.coeffs))


def scale(p, value):
    value = complex(value)
    if not np.isfinite(value):
        raise ParameterError("scalar factor must be finite")
    return CPoly(p.coeffs * value)


def derivative(p):
    """ Formal derivative; maps degree n to degree n - 1. """
    if p.degree < 1:
        return CPoly([])
    return CPoly(npoly.polyder(p.coeffs))


def conj_reciprocal(p):
    """
    Conjugate-reciprocal polynomial t*(z) = z^n conj(t(1/conj(z))), n = degree(t):
    coefficient k of t* is conj(coefficient n - k of t).
    """
    if p.is_zero:
        raise ParameterError("undefined reciprocal of the zero polynomial")
    return CPoly(np.conj(p.coeffs[::-1]))


@dataclass(frozen=True)
class ZeroCount:
    inside: int
    on: int
    outside: int

    @property
    def degree(self):
        return self.inside + self.on + self.outside


@dataclass(frozen=True)
class CohnStep:
    """
    One application of Cohn's rule: reduced = (conj(a_n) input - a_0 reciprocal) / z.
    ``applicable`` records whether |a_0| < |a_n| held with the strictness margin.
    """
    input: CPoly
    reciprocal: CPoly
    reduced: CPoly
    applicable: bool


def cohn_reduce(p, delta=config.DELTA_COHN):
    """
    Cohn reduction step of a polynomial of degree >= 1.

    Parameters
    ----------
    p (CPoly): polynomial t of degree n >= 1.
    delta (float): strictness margin, relative to the largest coefficient modulus.

    Returns
    -------
    CohnStep; when applicable the reduced polynomial has degree n - 1, one zero
    fewer inside the unit circle and the same zeros on it.
    """
    if p.degree < 1:
        raise ParameterError("Cohn reduction needs degree >= 1")

    a = p.coeffs
    n = p.degree
    reciprocal = np.conj(a[::-1])
    numerator = np.conj(a[n]) * a - a[0] * reciprocal

    # the constant term cancels identically; the division by z is exact
    if abs(numerator[0]) >= config.COHN_DIVISION_TOL * max(p.scale ** 2, 1e-300):
        raise StructuralError(f"non-exact Cohn division, residual {abs(numerator[0]):.3e}")

    applicable = bool(abs(a[0]) < abs(a[n]) - delta * p.scale)
    return CohnStep(input=p,
                    reciprocal=CPoly(reciprocal),
                    reduced=CPoly(numerator[1:]),
                    applicable=applicable)


def cohn_chain(p, normalize=True, delta=config.DELTA_COHN):
    """
    Apply Cohn's rule while it is applicable.

    Returns
    -------
    steps (tuple of CohnStep): every step attempted; only the last one may be inapplicable.
    terminal (CPoly): the polynomial the chain stopped at (degree 0, or the input of
                      the inapplicable step).
    """
    steps, current = [], p
    while current.degree >= 1:
        step = cohn_reduce(current, delta=delta)
        steps.append(step)
        if not step.applicable:
            break

        current = step.reduced
        if normalize and current.scale > 0:
            current = current / current.scale

    return tuple(steps), current


def find_roots(p, method=config.ROOT_METHOD, **kwargs):
    """
    All complex roots of p (degree >= 1), using one of ``polytools.root_finders``.
    Raises ConvergenceError with the best iterate when the residual target is missed.
    """
    from harmconv.polytools import root_finders

    p = _lift(p)
    if p.degree < 1:
        raise ParameterError("find_roots needs degree >= 1")
    if method not in root_finders:
        raise ParameterError(f"unknown root finder {method!r}, choose from {sorted(root_finders)}")
    return root_finders[method](p, **kwargs)


def merge_clusters(roots, tol=config.ROOT_CLUSTER_TOL):
    """
    Replace every group of roots within tol * max(1, max |root|) of each other
    (single linkage) by the group centroid.

    A root of multiplicity m comes back from the oracle spread over about eps**(1/m);
    the centroid of the spread is accurate to about eps.
    """
    roots = np.asarray(roots, dtype=np.complex128).ravel()
    if roots.shape[0] < 2:
        return roots

    scale = max(1.0, float(np.abs(roots).max()))
    links = hierarchy.linkage(np.column_stack([roots.real, roots.imag]), method="single")
    labels = hierarchy.fcluster(links, t=tol * scale, criterion="distance")
    merged = roots.copy()
    for label in np.unique(labels):
        members = labels == label
        if np.count_nonzero(members) > 1:
            merged[members] = roots[members].mean()
    return merged


def classify_roots(roots, delta_on=config.DELTA_ON, cluster_tol=config.ROOT_CLUSTER_TOL):
    moduli = np.abs(merge_clusters(roots, tol=cluster_tol))
    inside = int(np.sum(moduli < 1 - delta_on))
    outside = int(np.sum(moduli > 1 + delta_on))
    return ZeroCount(inside=inside, on=int(moduli.shape[0]) - inside - outside, outside=outside)


def count_zeros_unit_circle(p,
                            delta=config.DELTA_COHN,
                            delta_on=config.DELTA_ON,
                            method=config.ROOT_METHOD):
    """
    Count zeros of p inside, on and outside |z| = 1.

    Each applicable Cohn step removes one zero inside the circle and keeps the ones
    on it; when a step is inapplicable the terminal polynomial's roots are found by
    the root oracle and classified with the band delta_on.
    """
    if p.is_zero:
        raise ParameterError("zero polynomial has no zero count")

    steps, terminal = cohn_chain(p, normalize=True, delta=delta)
    reduced = sum(1 for s in steps if s.applicable)

    if terminal.degree < 1:
        return ZeroCount(inside=reduced, on=0, outside=0)

    logger.debug("Cohn rule inapplicable at degree %d, classifying by %s", terminal.degree, method)
    rest = classify_roots(find_roots(terminal, method=method), delta_on=delta_on)
    return ZeroCount(inside=reduced + rest.inside, on=rest.on, outside=rest.outside)


@dataclass(frozen=True, eq=False)
class RationalFn:
    """
    z^power * prefactor * num(z) / den(z), with |prefactor| = 1.
    """
    num: CPoly
    den: CPoly
    prefactor: complex = 1.0 + 0j
    power: int = 0

    def __post_init__(self):
        if self.den.is_zero:
            raise ParameterError("rational function with zero denominator")
        if abs(abs(self.prefactor) - 1.0) > 1e-12:
            raise ParameterError(f"prefactor {self.prefactor} is not unimodular")
        if self.power < 0:
            raise ParameterError("power must be nonnegative")
        object.__setattr__(self, "prefactor", complex(self.prefactor))

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = self.prefactor * z ** self.power * evaluate(self.num, z) / evaluate(self.den, z)
        return np.asarray(value)[()]

    @property
    def is_constant_ratio(self):
        return self.num.degree <= 0 and self.den.degree <= 0
