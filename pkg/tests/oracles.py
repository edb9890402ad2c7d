"""Slow, direct implementations used as independent references."""

import math

import numpy as np


def intervals(times):
    return [(times[k], times[k + 1]) for k in range(len(times) - 1)]


def pairs_naive(times1, times2, T):
    out = set()
    for i, (a, b) in enumerate(intervals(times1)):
        for j, (c, d) in enumerate(intervals(times2)):
            if a < d and c < b and min(b, d) <= T:
                out.add((i, j))
    return out


def v_cross_naive(times1, times2, T, x1, x2):
    total = 0.0
    for i, (a, b) in enumerate(intervals(times1)):
        for j, (c, d) in enumerate(intervals(times2)):
            if a < d and c < b and min(b, d) <= T:
                total += (x1[i] * x2[j]) ** 2
    return total


def v_fourth_naive(times, T, x):
    return sum(x[i] ** 4 for i, (_, b) in enumerate(intervals(times)) if b <= T)


def a_trunc_naive(times1, times2, T, n, x1, x2, beta, varpi):
    total = 0.0
    for i, (a, b) in enumerate(intervals(times1)):
        for j, (c, d) in enumerate(intervals(times2)):
            if not (a < d and c < b and min(b, d) <= T):
                continue
            small1 = abs(x1[i]) <= beta * (b - a) ** varpi
            small2 = abs(x2[j]) <= beta * (d - c) ** varpi
            if small1 and small2:
                total += (x1[i] * x2[j]) ** 2
    return n * total


def phi_naive(times1, times2, T, x1, x2):
    den = math.sqrt(v_fourth_naive(times1, T, x1) * v_fourth_naive(times2, T, x2))
    return v_cross_naive(times1, times2, T, x1, x2) / den


def kth_largest(samples, alpha):
    """Full-sort reference for the rank-based quantile."""
    xs = sorted(samples, reverse=True)
    r = int(math.floor(alpha * len(xs) + 1e-9))
    return xs[0] if r == 0 else xs[r - 1]


def binomial_se(p, n):
    return math.sqrt(max(p * (1 - p), 1e-12) / n)


def ecdf_ks(a, b):
    """Two-sample Kolmogorov-Smirnov distance by direct ECDF evaluation."""
    a, b = np.sort(a), np.sort(b)
    grid = np.concatenate((a, b))
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))
