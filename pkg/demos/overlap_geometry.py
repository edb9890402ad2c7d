"""
Asynchronous grids and overlap sums
===================================

Intervals are half-open, so intervals that only touch do not overlap.
Every overlapping pair meets in exactly one segment of the merged grid.
"""

import numpy as np

from cojump import ObservationScheme, TestInputs, gn_hn, merge, overlap_pairs, v_cross
from cojump.sampling import gen_poisson_scheme

s = ObservationScheme(np.array([0.0, 2.0, 5.0]), np.array([0.0, 3.0, 6.0]), T=5.0, n=1.0)
i, j = overlap_pairs(s)
print("overlapping interval pairs:", list(zip(i.tolist(), j.tolist())))

g = merge(s)
print("merged times:", g.merged_times)
print("distance back/forward to series 1:", g.back1, g.fwd1)

inp = TestInputs(s, np.array([1.0, 2.0]), np.array([3.0, 1.0]))
print("V(f) =", v_cross(inp))

# G_n and H_n for Poisson sampling with intensities 1 and 2
rng = np.random.default_rng(0)
vals = np.array([gn_hn(gen_poisson_scheme(5000, 1.0, 2.0, 1.0, rng), 1.0) for _ in range(50)])
print("mean G_n(1), H_n(1):", vals.mean(axis=0), "limits 2/3 and 3")
