import time

import numpy as np

from harmconv.polytools import CPoly, count_zeros_unit_circle, find_roots, root_finders
from harmconv.utils import random_polynomial

all_degrees = 2 ** np.arange(1, 7)
print(all_degrees)

rng = np.random.default_rng(0)
t_degree = {}
for degree in all_degrees:
    t_method = {}
    for method in sorted(root_finders) + ["cohn"]:
        lap, i = 0, 0
        for i in range(1, 200):
            coeffs, _ = random_polynomial(rng, int(degree))
            p = CPoly(coeffs)

            timer = time.time()
            try:
                if method == "cohn":
                    count_zeros_unit_circle(p)
                else:
                    find_roots(p, method=method)
                lap += time.time() - timer
            except Exception as e:
                print(f"degree: {degree} {method} failed: {e}")
                lap = np.nan
                break

            if lap > 1:
                break
        print(f"degree: {degree} {method} time/polynomial: {lap / i:.2e}")
        t_method[method] = (i, lap)
    t_degree[int(degree)] = t_method
    np.save('roots.npy', t_degree)
