import time

import numpy as np

from harmconv.verify import conjecture_scan

all_workers = [1, 2, 4, 8]
print(all_workers)

t_n = {}
for n in [1, 2, 3, 4]:
    t_workers = {}
    for workers in all_workers:
        timer = time.time()
        curve = conjecture_scan(n, a_step=0.01, beta_samples=12, theta_samples=12, max_workers=workers)
        lap = time.time() - timer
        print(f"n: {n} workers: {workers} a_star: {curve.a_star} time: {lap:.3f} "
              f"time/a: {lap / len(curve.curve):.3f}")
        t_workers[workers] = lap
    t_n[n] = t_workers
    np.save('scan.npy', t_n)
