import math
import warnings

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import lfilter

from harmconv import config
from harmconv.errors import DomainError, ParameterError


def series_ratio(num, den, order, x=None):
    """
    Taylor coefficients 0..order of x(z) * num(z) / den(z).

    Parameters
    ----------
    num (array): ascending coefficients of the numerator polynomial.
    den (array): ascending coefficients of the denominator, den[0] != 0.
    order (int): last coefficient index returned.
    x (array): optional series multiplied in; defaults to 1.

    Returns
    -------
    coefficients (array order + 1)
    """
    den = np.asarray(den, dtype=np.complex128)
    if den.size == 0 or den[0] == 0:
        raise ParameterError("series division needs a nonzero constant term")

    impulse = np.zeros(order + 1, dtype=np.complex128)
    if x is None:
        impulse[0] = 1.0
    else:
        x = np.asarray(x, dtype=np.complex128)[:order + 1]
        impulse[:x.shape[0]] = x

    # lfilter solves den * y = num * x term by term, i.e. it divides power series
    return lfilter(np.asarray(num, dtype=np.complex128), den, impulse)


def series_quotient(num, den, order):
    """ Taylor coefficients of the quotient of two power series (den[0] != 0). """
    return series_ratio([1.0], den, order, x=num)


def series_integrate(coeffs):
    """ Term-wise antiderivative vanishing at 0; one order longer than the input. """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    out = np.zeros(coeffs.shape[0] + 1, dtype=np.complex128)
    out[1:] = coeffs / np.arange(1, coeffs.shape[0] + 1)
    return out


def series_derivative(coeffs):
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape[0] < 2:
        return np.zeros(1, dtype=np.complex128)
    return npoly.polyder(coeffs)


def pad(coeffs, length):
    coeffs = np.asarray(coeffs, dtype=np.complex128)[:length]
    out = np.zeros(length, dtype=np.complex128)
    out[:coeffs.shape[0]] = coeffs
    return out


def truncation_for_radius(radius, tol=config.SERIES_EVAL_TOL, growth=2, minimum=config.DEFAULT_TRUNCATION):
    """
    Smallest power-of-two order N with N^growth * radius^N < tol.

    The Taylor coefficients of the maps handled here grow at most polynomially
    (poles of order <= 2 on the unit circle, times the half-plane factor k), so
    this bounds the truncation tail at |z| <= radius.
    """
    if not 0 <= radius < 1:
        raise DomainError(f"truncation order undefined for radius {radius}")
    if radius == 0:
        return minimum

    n = minimum
    log_r, log_tol = math.log(radius), math.log(tol)
    while growth * math.log(n) + n * log_r >= log_tol:
        if n >= config.MAX_EVAL_ORDER:
            warnings.warn(f"truncation capped at {config.MAX_EVAL_ORDER} for radius {radius}, "
                          f"series tail may exceed {tol:g}")
            return config.MAX_EVAL_ORDER
        n *= 2
    return n


def disk_points(z, pole_band=None):
    """
    Validate points of the open unit disk; returns a complex array.
    With ``pole_band`` set, points within that distance of z = 1 are refused too.
    """
    z = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(z)):
        raise DomainError("points must be finite")
    if np.any(np.abs(z) >= 1):
        raise DomainError("points must lie in the open unit disk |z| < 1")
    if pole_band is not None and np.any(np.abs(1 - z) < pole_band):
        raise DomainError(f"points within {pole_band} of the pole z = 1")
    return z


def polar_grid(grid):
    """
    Points of a polar grid: ``grid.radii`` radii up to ``grid.max_radius`` (the
    origin excluded) times ``grid.angles`` equispaced angles. Shape (radii, angles).
    """
    radii = np.linspace(grid.max_radius / grid.radii, grid.max_radius, grid.radii)
    angles = 2 * np.pi * np.arange(grid.angles) / grid.angles
    return radii[:, None] * np.exp(1j * angles)[None, :]


def beta_theta_grid(beta_samples=config.BETA_SAMPLES, theta_samples=config.THETA_SAMPLES):
    """ Default (beta, theta) scan grid: beta in [0.1, pi - 0.1], theta in [0, 2 pi). """
    betas = np.linspace(0.1, np.pi - 0.1, beta_samples)
    thetas = 2 * np.pi * np.arange(theta_samples) / theta_samples
    return betas, thetas


def a_grid(a_step, a_min=None, a_max=None):
    """
    Grid of the half-plane parameter, rounded so that thresholds such as 0 and 0.2
    are hit exactly.
    """
    if not 0 < a_step <= 0.1:
        raise ParameterError("a_step must lie in (0, 0.1]")
    a_min = -1 + a_step if a_min is None else a_min
    a_max = 1 - a_step if a_max is None else a_max
    count = int(math.floor((a_max - a_min) / a_step + 1e-9)) + 1
    values = np.round(a_min + a_step * np.arange(count), 12)
    return values[(values > -1) & (values < 1)]


def angle_close(x, y, tol=1e-9):
    """ True when x and y agree modulo 2 pi. """
    d = math.remainder(x - y, 2 * math.pi)
    return abs(d) <= tol


def parse_complex_list(text):
    """
    Parse a comma-separated list of complex literals ("1", "-0.5", "2j", "1-3j").
    """
    tokens = [t.strip() for t in text.split(",")]
    if any(t == "" for t in tokens):
        raise ParameterError(f"empty coefficient in {text!r}")
    try:
        values = [complex(t.replace(" ", "")) for t in tokens]
    except ValueError as e:
        raise ParameterError(f"malformed complex literal in {text!r}") from e
    if not all(np.isfinite(v) for v in values):
        raise ParameterError("coefficients must be finite")
    return values


def random_polynomial(rng, degree, band=1e-3, radius_range=(0.05, 2.0)):
    """
    Coefficients (ascending) of a polynomial with random roots whose moduli stay out of the
    band 1 - band < |z| < 1 + band, scaled by a random complex factor.

    Returns
    -------
    coeffs (array degree + 1), roots (array degree)
    """
    low, high = radius_range
    radii = rng.uniform(low, high, degree)
    while np.any(np.abs(radii - 1) < band):
        radii = np.where(np.abs(radii - 1) < band, rng.uniform(low, high, degree), radii)
    roots = radii * np.exp(2j * np.pi * rng.uniform(0, 1, degree))
    scale = rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform())
    return scale * npoly.polyfromroots(roots), roots
