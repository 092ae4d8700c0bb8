import math

import numba
import numpy as np


@numba.njit(nogil=True)
def horner(coeffs, z):
    """
    Evaluate a polynomial with ascending complex coefficients at z.
    """
    acc = 0j
    for k in range(coeffs.shape[0] - 1, -1, -1):
        acc = acc * z + coeffs[k]
    return acc


@numba.njit(nogil=True)
def derivative_coeffs(coeffs):
    n = coeffs.shape[0] - 1
    d = np.zeros(max(n, 1), dtype=np.complex128)
    for k in range(n):
        d[k] = (k + 1) * coeffs[k + 1]
    return d


@numba.njit(nogil=True)
def residuals(coeffs, roots):
    res = np.empty(roots.shape[0])
    for k in range(roots.shape[0]):
        res[k] = abs(horner(coeffs, roots[k]))
    return res


@numba.njit(nogil=True)
def _aberth(coeffs, roots, tol, max_iteration):
    """
    Aberth-Ehrlich simultaneous iteration, Gauss-Seidel style (updated roots are
    used as soon as they are available). ``roots`` is updated in place.
    Returns the number of sweeps performed.
    """
    n = roots.shape[0]
    dcoeffs = derivative_coeffs(coeffs)

    for it in range(max_iteration):
        max_step = 0.0
        for k in range(n):
            zk = roots[k]
            pk = horner(coeffs, zk)
            if pk == 0j:
                continue

            dpk = horner(dcoeffs, zk)
            s = 0j
            for j in range(n):
                if j != k:
                    s += 1.0 / (zk - roots[j])

            denom = dpk / pk - s
            if denom == 0j:
                w = 1e-8 * (1.0 + abs(zk)) + 0j  # kick off a stationary point
            else:
                w = 1.0 / denom

            roots[k] = zk - w
            step = abs(w) / (1.0 + abs(zk))
            if step > max_step:
                max_step = step

        if max_step < tol:
            return it + 1

    return max_iteration


@numba.njit(nogil=True)
def _durand_kerner(coeffs, roots, tol, max_iteration):
    """
    Durand-Kerner (Weierstrass) iteration, updated in place.
    """
    n = roots.shape[0]
    lead = coeffs[coeffs.shape[0] - 1]

    for it in range(max_iteration):
        max_step = 0.0
        for k in range(n):
            zk = roots[k]
            pk = horner(coeffs, zk)
            if pk == 0j:
                continue

            prod = lead
            for j in range(n):
                if j != k:
                    prod *= zk - roots[j]

            if prod == 0j:
                w = 1e-8 * (1.0 + abs(zk)) + 0j
            else:
                w = pk / prod

            roots[k] = zk - w
            step = abs(w) / (1.0 + abs(zk))
            if step > max_step:
                max_step = step

        if max_step < tol:
            return it + 1

    return max_iteration


@numba.njit(nogil=True)
def fujiwara_radius(coeffs):
    """
    Fujiwara bound: every root satisfies |z| <= 2 max_k |a_{n-k}/a_n|^(1/k).
    """
    n = coeffs.shape[0] - 1
    lead = abs(coeffs[n])
    bound = 0.0
    for k in range(1, n + 1):
        c = abs(coeffs[n - k]) / lead
        if k == n:
            c = c / 2.0
        if c > 0.0:
            r = math.pow(c, 1.0 / k)
            if r > bound:
                bound = r
    return 2.0 * bound
