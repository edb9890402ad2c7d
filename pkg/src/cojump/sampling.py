"""Observation schemes and their interval geometry.

Intervals are half-open, ``(t[k], t[k+1]]``, and are numbered from 0 in code:
interval ``k`` of a component ends at ``times[k + 1]``. Two half-open
intervals ``(a, b]`` and ``(c, d]`` overlap iff ``a < d`` and ``c < b``;
intervals that only touch at an endpoint do not overlap.

A useful fact used throughout: the nonempty intersection of an interval of
component 1 with one of component 2 contains no observation time of either
component in its interior, so it is exactly one segment of the merged grid.
Overlapping pairs are therefore in one-to-one correspondence with merged-grid
segments.
"""

import csv
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, ParameterError


@dataclass(frozen=True, eq=False)
class ObservationScheme:
    """Two observation grids on ``[0, T]``.

    Each grid starts at 0, is strictly increasing and retains exactly one time
    ``>= T`` so that every point of ``[0, T]`` lies in some interval; later
    times are discarded on construction. ``n`` only labels the asymptotic
    scale and is used by statistics that are multiplied by it.
    """

    times1: np.ndarray
    times2: np.ndarray
    T: float
    n: float

    def __post_init__(self):
        if self.T <= 0:
            raise ParameterError(f"horizon must be positive, got T={self.T}")
        if self.n <= 0:
            raise ParameterError(f"scale n must be positive, got n={self.n}")
        for name in ("times1", "times2"):
            t = np.asarray(getattr(self, name), dtype=float)
            if t.ndim != 1 or t.size < 2:
                raise ParameterError(f"{name} needs at least two observation times")
            if t[0] != 0.0:
                raise ParameterError(f"{name} must start at 0")
            if np.any(np.diff(t) <= 0):
                raise ParameterError(f"{name} must be strictly increasing")
            if t[-1] < self.T:
                raise ParameterError(f"{name} ends at {t[-1]} before T={self.T}")
            last = np.searchsorted(t, self.T, side="left")
            t = t[: last + 1].copy()
            t.flags.writeable = False
            object.__setattr__(self, name, t)

    def times(self, l: int) -> np.ndarray:
        return self.times1 if l == 1 else self.times2

    def lengths(self, l: int) -> np.ndarray:
        return np.diff(self.times(l))

    def n_intervals(self, l: int) -> int:
        return len(self.times(l)) - 1

    @property
    def end(self) -> float:
        """Largest time covered by both grids."""
        return min(self.times1[-1], self.times2[-1])

    @property
    def mesh(self) -> float:
        """Largest interval length after intersecting with ``[0, T]``."""
        return max(
            float(np.max(np.diff(np.minimum(self.times(l), self.T)))) for l in (1, 2)
        )

    @cached_property
    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        return overlap_pairs(self)

    @cached_property
    def index(self) -> "IntervalIndex":
        return IntervalIndex(self)


def gen_poisson_scheme(
    n: float, lambda1: float, lambda2: float, T: float, rng: np.random.Generator
) -> ObservationScheme:
    """Observation times at the arrivals of independent Poisson processes with
    rates ``n * lambda1`` and ``n * lambda2``."""
    if n < 1 or lambda1 <= 0 or lambda2 <= 0:
        raise ParameterError("need n >= 1 and positive intensities")
    grids = []
    for lam in (lambda1, lambda2):
        rate = n * lam
        chunk = int(rate * T + 10 * np.sqrt(rate * T) + 10)
        t = np.cumsum(rng.exponential(1.0 / rate, size=chunk))
        while t[-1] < T:
            t = np.concatenate((t, t[-1] + np.cumsum(rng.exponential(1.0 / rate, size=chunk))))
        grids.append(np.concatenate(([0.0], t)))
    return ObservationScheme(grids[0], grids[1], T=T, n=n)


def gen_equidistant_scheme(n: int, T: float = 1.0) -> ObservationScheme:
    """Both components observed synchronously at ``i * T / n``, ``i = 0..n``."""
    if n < 1:
        raise ParameterError("need n >= 1")
    t = np.arange(n + 1) * (T / n)
    t[-1] = T
    return ObservationScheme(t, t.copy(), T=T, n=n)


@dataclass(frozen=True)
class MergedGrid:
    """Merged observation times ``T_k`` and distances to neighbouring observations.

    All arrays are indexed by ``k = 0..K`` and aligned with ``merged_times``;
    ``deltas[0]`` is 0. ``back[l-1][k]`` is the distance from ``T_k`` back to the
    last observation of component ``l`` at or before it, ``fwd[l-1][k]`` the
    distance forward to the first one at or after it.
    """

    merged_times: np.ndarray
    deltas: np.ndarray
    back1: np.ndarray
    back2: np.ndarray
    fwd1: np.ndarray
    fwd2: np.ndarray

    def back(self, l: int) -> np.ndarray:
        return self.back1 if l == 1 else self.back2

    def fwd(self, l: int) -> np.ndarray:
        return self.fwd1 if l == 1 else self.fwd2


def merge(scheme: ObservationScheme) -> MergedGrid:
    """Merged grid over the sorted union of both components' times.

    Past the last observation of a component there is no next observation,
    and ``fwd`` is ``inf`` there. This only happens beyond ``T``.
    """
    merged = np.union1d(scheme.times1, scheme.times2)
    out = {}
    for l in (1, 2):
        t = scheme.times(l)
        out[f"back{l}"] = merged - t[np.searchsorted(t, merged, side="right") - 1]
        pos = np.searchsorted(t, merged, side="left")
        out[f"fwd{l}"] = np.where(pos < len(t), t[np.minimum(pos, len(t) - 1)] - merged, np.inf)
    return MergedGrid(merged_times=merged, deltas=np.diff(merged, prepend=0.0), **out)


def overlap_pairs(scheme: ObservationScheme) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs ``(i, j)`` of overlapping intervals with ``min(t1[i+1], t2[j+1]) <= T``.

    Every overlapping pair intersects in exactly one merged-grid segment whose
    right endpoint is ``min(t1[i+1], t2[j+1])``, so one pass over the merged
    grid enumerates all pairs, ordered by that endpoint.
    """
    merged = np.union1d(scheme.times1, scheme.times2)
    right = merged[(merged > 0) & (merged <= scheme.T)]
    i = np.searchsorted(scheme.times1, right, side="left") - 1
    j = np.searchsorted(scheme.times2, right, side="left") - 1
    return i, j


def gn_hn(scheme: ObservationScheme, t: float) -> tuple[float, float]:
    """The interval functionals G_n(t) and H_n(t).

    ``G_n(t) = n * sum_{k >= 1, T_k <= t} delta_k**2`` and H_n replaces
    ``delta_k**2`` by the product, over both components, of the length of the
    interval of that component which contains the k-th merged segment.
    """
    if not 0 <= t <= scheme.T:
        raise DomainError(f"t must lie in [0, {scheme.T}]")
    g = merge(scheme)
    k = np.nonzero((g.merged_times <= t) & (np.arange(len(g.merged_times)) >= 1))[0]
    d = g.deltas[k]
    spans = [g.back(l)[k - 1] + d + g.fwd(l)[k] for l in (1, 2)]
    return float(scheme.n * np.sum(d * d)), float(scheme.n * np.sum(spans[0] * spans[1]))


class IntervalIndex:
    """Locates observation intervals around arbitrary times for one scheme."""

    def __init__(self, scheme: ObservationScheme):
        self.scheme = scheme

    def containing(self, s, l: int):
        """0-based index of the interval ``(t[k], t[k+1]]`` of component ``l`` containing ``s``."""
        t = self.scheme.times(l)
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr <= 0) or np.any(s_arr > t[-1]):
            raise DomainError(f"s must lie in (0, {t[-1]}]")
        k = np.searchsorted(t, s_arr, side="left") - 1
        return int(k) if np.ndim(k) == 0 else k

    def tau_plus(self, s, l: int):
        """First observation time of component ``l`` at or after ``s``."""
        t = self.scheme.times(l)
        return t[np.searchsorted(t, s, side="left")]

    def tau_minus(self, s, l: int):
        """Last observation time of component ``l`` at or before ``s``."""
        t = self.scheme.times(l)
        return t[np.searchsorted(t, s, side="right") - 1]

    def overlap_range(self, k, m: int, l: int):
        """Inclusive range ``(lo, hi)`` of component-``l`` intervals overlapping
        interval ``k`` of component ``m``."""
        tm, tl = self.scheme.times(m), self.scheme.times(l)
        a, b = tm[k], tm[np.asarray(k) + 1]
        lo = np.searchsorted(tl, a, side="right") - 1
        hi = np.minimum(np.searchsorted(tl, b, side="left") - 1, len(tl) - 2)
        return lo, hi

    def overlap_span(self, s, l: int):
        """Total length of component-``l`` intervals overlapping the
        component-``(3 - l)`` interval that contains ``s``."""
        m = 3 - l
        k = self.containing(s, m)
        lo, hi = self.overlap_range(k, m, l)
        tl = self.scheme.times(l)
        return tl[np.asarray(hi) + 1] - tl[lo]


def eta_n(scheme: ObservationScheme, w_increments, s: float, l: int) -> float:
    """Sum of squared Brownian increments of component ``l`` over the
    component-``l`` intervals overlapping the other component's interval at ``s``.

    ``w_increments[k]`` is the Brownian increment over interval ``k`` of
    component ``l``.
    """
    w = np.asarray(w_increments, dtype=float)
    if len(w) != scheme.n_intervals(l):
        raise ParameterError("increments must align with the component's intervals")
    idx = scheme.index
    k = idx.containing(s, 3 - l)
    lo, hi = idx.overlap_range(k, 3 - l, l)
    return float(np.sum(w[lo : hi + 1] ** 2))


def eta_direct_poisson(
    lambda_own: float, lambda_other: float, rng: np.random.Generator, size: int | None = None
):
    """Draws from the limit law of ``n * eta_n`` under Poisson sampling.

    The other component's interval around ``s`` has length ``E1' + E2'``
    (two Exp(lambda_other) waiting times). Inside it the own component has a
    Poisson(lambda_own * span) number of observations placed uniformly, and
    the own intervals reach ``E1`` before and ``E2`` after it (Exp(lambda_own)).
    Each resulting spacing is weighted by an independent squared normal.
    """
    if lambda_own <= 0 or lambda_other <= 0:
        raise ParameterError("intensities must be positive")
    m = 1 if size is None else int(size)
    e_own = rng.exponential(1.0 / lambda_own, size=(m, 2))
    e_other = rng.exponential(1.0 / lambda_other, size=(m, 2))
    span = e_other.sum(axis=1)
    p = rng.poisson(lambda_own * span)
    width = int(p.max()) if m else 0
    u = rng.random((m, width))
    inner = e_own[:, :1] + u * span[:, None]
    # unused slots coincide with the origin and only add zero-length spacings
    inner[np.arange(width)[None, :] >= p[:, None]] = 0.0
    right = (e_own[:, 0] + span + e_own[:, 1])[:, None]
    points = np.sort(np.concatenate((np.zeros((m, 1)), inner, right), axis=1), axis=1)
    spacings = np.diff(points, axis=1)
    eta = np.sum(spacings * rng.standard_normal(spacings.shape) ** 2, axis=1)
    return float(eta[0]) if size is None else eta


def write_scheme_csv(path, times) -> None:
    """Write one component's observation times as ``index,time`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "time"])
        for k, t in enumerate(times):
            w.writerow([k, repr(float(t))])


def read_scheme_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index", "time"]:
            raise ParameterError(f"{path}: expected header 'index,time', got {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ParameterError(f"{path}:{lineno}: expected 2 columns")
            if int(row[0]) != len(rows):
                raise ParameterError(f"{path}:{lineno}: index out of sequence")
            rows.append(float(row[1]))
    return np.array(rows)
