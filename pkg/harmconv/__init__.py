from harmconv.polytools import CPoly, ZeroCount, cohn_reduce, count_zeros_unit_circle, find_roots, conj_reciprocal
from harmconv.harmonic import HalfPlane, StripShear, SeriesMap, Moebius, RotatedPower, make_half_plane, make_strip, \
    shear_from_sum, dilatation_of, eval_map, jacobian, taylor_coeffs
from harmconv.convolve import ParamSet, RationalFn, hadamard, convolve_half_plane, tilde_omega_closed, \
    tilde_omega_HG, tilde_omega_series, build_p, build_q, build_numerator_general
from harmconv.verify import lemma22_gap, verify_n1, verify_n2, verify_general, conjecture_scan, \
    counterexample_search
from harmconv.geom import image_grid, cid_real_check, render
from harmconv.__version__ import __version__
