from harmconv.polytools.roots import aberth_roots, durand_kerner_roots, companion_roots

root_finders = {"aberth": aberth_roots,
                "durand_kerner": durand_kerner_roots,
                "companion": companion_roots
                }

from harmconv.polytools.cpoly import CPoly, ZeroCount, CohnStep, RationalFn, \
    evaluate, conj_reciprocal, cohn_reduce, cohn_chain, count_zeros_unit_circle, classify_roots, merge_clusters, \
    find_roots, add, subtract, multiply, scale, derivative
