"""
Rejection curves
================

Small Monte Carlo runs of the benchmark scenarios. The full study uses
10,000 paths per curve; a few hundred already show level and power.
"""

import sys

from cojump import curves_to_csv, run_scenario

alphas = [0.01, 0.05, 0.1, 0.25, 0.5]
curves = [
    run_scenario("II-d0", 400, 300, alphas, master_seed=2024),
    run_scenario("I-j", 400, 300, alphas, master_seed=2024),
]
sys.stdout.write(curves_to_csv(curves))

# the same run from the shell:
#   cojump mc --scenario II-d0,I-j --n 400 --paths 300 --seed 2024
