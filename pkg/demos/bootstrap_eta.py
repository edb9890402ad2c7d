"""
Resampling the local sampling geometry
======================================

The bootstrap replaces the Brownian increments around a jump by
sqrt(|I|) * U and picks the interval around the jump among its neighbours,
proportionally to length. On Poisson grids the draws should look like the
limit law of n * eta.
"""

import numpy as np

from cojump import BootstrapConfig, eta_direct_poisson, sample_eta_hat
from cojump.sampling import gen_equidistant_scheme, gen_poisson_scheme

rng = np.random.default_rng(3)

sync = sample_eta_hat(gen_equidistant_scheme(400), 0.5, 1, BootstrapConfig(5, 1), rng, size=100_000)
print("equidistant: mean", sync.mean(), "var", sync.var(), "(chi-square(1): 1, 2)")

n = 2000
cfg = BootstrapConfig.for_n(n)
pooled = np.concatenate(
    [sample_eta_hat(gen_poisson_scheme(n, 1.0, 2.0, 1.0, rng), 0.5, 1, cfg, rng, size=5000) for _ in range(20)]
)
direct = eta_direct_poisson(1.0, 2.0, rng, size=100_000)
q = [0.1, 0.25, 0.5, 0.75, 0.9]
print("bootstrap quantiles:", np.round(np.quantile(pooled, q), 3))
print("limit quantiles:    ", np.round(np.quantile(direct, q), 3))
