import logging

import numpy as np
from numpy.polynomial import polynomial as npoly

from harmconv import config
from harmconv.errors import ConvergenceError, ParameterError
from harmconv.polytools.numba_roots import _aberth, _durand_kerner, fujiwara_radius, residuals

logger = logging.getLogger(__name__)


def _leading_coeffs(p):
    coeffs = np.ascontiguousarray(getattr(p, "coeffs", p), dtype=np.complex128)
    if coeffs.shape[0] < 2:
        raise ParameterError("root finding needs a polynomial of degree >= 1")
    return coeffs


def initial_guesses(coeffs):
    """
    Deterministic starting points: the roots of unity scaled to the Fujiwara radius,
    rotated off the real axis so that real-coefficient inputs do not start symmetric.
    """
    n = coeffs.shape[0] - 1
    radius = fujiwara_radius(coeffs)
    if radius == 0.0:
        radius = 1.0
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    return radius * np.exp(1j * angles)


def _check_residual(coeffs, roots, method, iterations, residual_tol):
    scale = np.abs(coeffs).max()
    res = residuals(coeffs, roots)
    worst = float(res.max())
    if worst >= residual_tol * scale:
        raise ConvergenceError(f"{method} did not converge in {iterations} sweeps "
                               f"(residual {worst:.3e})", best=roots.copy(), residual=worst)
    return roots


def aberth_roots(p,
                 tol=config.ROOT_STEP_TOL,
                 max_iteration=config.ROOT_MAX_ITERATION,
                 residual_tol=config.ROOT_RESIDUAL):
    """
    All complex roots by the Aberth-Ehrlich iteration.

    Parameters
    ----------
    p (CPoly or array): polynomial, ascending coefficients.
    tol (float): stop when every relative correction falls below tol.
    max_iteration (int): sweep budget.
    residual_tol (float): accepted |p(root)| relative to the largest coefficient modulus.

    Returns
    -------
    roots (array n): complex roots in iteration order.
    """
    coeffs = _leading_coeffs(p)
    roots = initial_guesses(coeffs)
    iterations = _aberth(coeffs, roots, tol, max_iteration)
    return _check_residual(coeffs, roots, "aberth", iterations, residual_tol)


def durand_kerner_roots(p,
                        tol=config.ROOT_STEP_TOL,
                        max_iteration=4 * config.ROOT_MAX_ITERATION,
                        residual_tol=config.ROOT_RESIDUAL):
    """ Same contract as aberth_roots, with the (slower) Weierstrass correction. """
    coeffs = _leading_coeffs(p)
    roots = initial_guesses(coeffs)
    iterations = _durand_kerner(coeffs, roots, tol, max_iteration)
    return _check_residual(coeffs, roots, "durand_kerner", iterations, residual_tol)


def companion_roots(p, residual_tol=config.ROOT_RESIDUAL, **kwargs):
    """ Eigenvalues of the companion matrix, via numpy. """
    coeffs = _leading_coeffs(p)
    roots = np.ascontiguousarray(npoly.polyroots(coeffs), dtype=np.complex128)
    return _check_residual(coeffs, roots, "companion", 1, residual_tol)
