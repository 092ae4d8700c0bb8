import math

import numpy as np
import pytest

from harmconv.errors import ConvergenceError, ParameterError
from harmconv.polytools import CPoly, find_roots, root_finders
from harmconv.polytools.numba_roots import fujiwara_radius, horner
from harmconv.polytools.roots import aberth_roots, durand_kerner_roots, initial_guesses
from harmconv.utils import random_polynomial
from harmconv.verify import printed_q2


def _sorted(roots):
    return sorted(roots, key=lambda z: (round(z.real, 8), round(z.imag, 8)))


class TestRootFinders:
    @pytest.mark.parametrize("method", sorted(root_finders))
    def test_quadratic(self, method):
        roots = _sorted(find_roots(CPoly([1, 0, 1]), method=method))
        np.testing.assert_allclose(roots, [-1j, 1j], atol=1e-12)

    @pytest.mark.parametrize("method", sorted(root_finders))
    def test_cube_roots_of_unity(self, method):
        roots = find_roots(CPoly([-1, 0, 0, 1]), method=method)
        assert roots.shape == (3,)
        np.testing.assert_allclose(np.abs(roots), 1, atol=1e-10)
        np.testing.assert_allclose(roots ** 3, 1, atol=1e-10)

    def test_symmetric_quadratic_of_the_quartic_chain(self):
        q2 = printed_q2(0.25, math.pi / 2, 0.0)
        roots = _sorted(find_roots(q2))
        np.testing.assert_allclose(roots, [-1j, 1j], atol=1e-12)
        assert np.abs(np.abs(roots) - 1).max() < 1e-12

    def test_residual_contract(self, rng):
        for _ in range(50):
            degree = int(rng.integers(1, 17))
            coeffs, _ = random_polynomial(rng, degree)
            methods = ("aberth", "durand_kerner") if degree <= 10 else ("aberth",)
            for method in methods:
                roots = find_roots(CPoly(coeffs), method=method)
                residual = max(abs(horner(coeffs.astype(np.complex128), z)) for z in roots)
                assert residual < 1e-10 * np.abs(coeffs).max()

    def test_deterministic(self, rng):
        coeffs, _ = random_polynomial(rng, 7)
        np.testing.assert_array_equal(aberth_roots(coeffs), aberth_roots(coeffs))

    def test_initial_guesses_on_fujiwara_circle(self):
        coeffs = np.array([2, -3, 0, 1], dtype=np.complex128)
        guesses = initial_guesses(coeffs)
        np.testing.assert_allclose(np.abs(guesses), fujiwara_radius(coeffs))
        assert np.all(np.abs(guesses.imag) > 0)

    def test_convergence_error(self, rng):
        coeffs, _ = random_polynomial(rng, 8)
        for finder in (aberth_roots, durand_kerner_roots):
            with pytest.raises(ConvergenceError) as e:
                finder(coeffs, max_iteration=1)
            assert e.value.best.shape == (8,)
            assert e.value.residual > 0

    def test_unknown_method(self):
        with pytest.raises(ParameterError):
            find_roots(CPoly([1, 1]), method="newton")

    def test_degree_zero(self):
        with pytest.raises(ParameterError):
            find_roots(CPoly([1]))
