"""Observable statistics built from asynchronously observed increments.

All cross statistics sum over pairs of overlapping observation intervals in
the Hayashi-Yoshida style, so no synchronization of the two series is needed.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ParameterError
from .model import PathRecord
from .sampling import ObservationScheme


@dataclass(frozen=True)
class TruncationConfig:
    """Increments with ``|dX| <= beta * |I|**varpi`` count as continuous."""

    beta: float = 0.03
    varpi: float = 0.49

    def __post_init__(self):
        if self.beta <= 0:
            raise ParameterError(f"beta must be positive, got {self.beta}")
        if not 0 < self.varpi < 0.5:
            raise ParameterError(f"varpi must lie in (0, 1/2), got {self.varpi}")


@dataclass(frozen=True)
class SpotVolConfig:
    """Window half-width ``b_n`` and whether to truncate increments."""

    b_n: float
    truncated: bool = False

    def __post_init__(self):
        if self.b_n <= 0:
            raise ParameterError(f"b_n must be positive, got {self.b_n}")

    @classmethod
    def for_n(cls, n: float, truncated: bool = False) -> "SpotVolConfig":
        return cls(b_n=1.0 / np.sqrt(n), truncated=truncated)


@dataclass(frozen=True, eq=False)
class TestInputs:
    """Increments of both components over their observation intervals."""

    __test__ = False  # not a pytest class

    scheme: ObservationScheme
    incr1: np.ndarray
    incr2: np.ndarray

    def __post_init__(self):
        for l in (1, 2):
            x = np.asarray(getattr(self, f"incr{l}"), dtype=float)
            if x.shape != (self.scheme.n_intervals(l),):
                raise ParameterError(
                    f"incr{l} has {x.size} entries, scheme has {self.scheme.n_intervals(l)} intervals"
                )
            object.__setattr__(self, f"incr{l}", x)

    @property
    def lens1(self) -> np.ndarray:
        return self.scheme.lengths(1)

    @property
    def lens2(self) -> np.ndarray:
        return self.scheme.lengths(2)

    def incr(self, l: int) -> np.ndarray:
        return self.incr1 if l == 1 else self.incr2

    def lens(self, l: int) -> np.ndarray:
        return self.scheme.lengths(l)

    @classmethod
    def from_prices(cls, scheme: ObservationScheme, prices1, prices2) -> "TestInputs":
        """Increments from prices observed at the scheme's times."""
        return cls(scheme, np.diff(np.asarray(prices1, float)), np.diff(np.asarray(prices2, float)))

    @classmethod
    def from_path(cls, path: PathRecord, scheme: ObservationScheme) -> "TestInputs":
        x1 = path.at(scheme.times1)[:, 0]
        x2 = path.at(scheme.times2)[:, 1]
        return cls.from_prices(scheme, x1, x2)


def _in_horizon(inputs: TestInputs, l: int) -> np.ndarray:
    return inputs.scheme.times(l)[1:] <= inputs.scheme.T


def _small(inputs: TestInputs, l: int, cfg: TruncationConfig) -> np.ndarray:
    return np.abs(inputs.incr(l)) <= cfg.beta * inputs.lens(l) ** cfg.varpi


def v_cross(inputs: TestInputs) -> float:
    """``sum (dX1_i)^2 (dX2_j)^2`` over overlapping interval pairs."""
    i, j = inputs.scheme.pairs
    return float(np.sum(inputs.incr1[i] ** 2 * inputs.incr2[j] ** 2))


def v_fourth(inputs: TestInputs, l: int) -> float:
    """Fourth-power variation of component ``l`` over intervals ending by T."""
    x = inputs.incr(l)[_in_horizon(inputs, l)]
    return float(np.sum(x**4))


def phi_tilde(inputs: TestInputs) -> float | None:
    """Estimated squared-jump correlation; ``None`` if a fourth-power variation vanishes."""
    denom = v_fourth(inputs, 1) * v_fourth(inputs, 2)
    if denom == 0:
        return None
    return v_cross(inputs) / np.sqrt(denom)


def a_trunc(inputs: TestInputs, cfg: TruncationConfig | None = None) -> float:
    """n times the cross sum restricted to pairs where both increments are small."""
    cfg = cfg or TruncationConfig()
    i, j = inputs.scheme.pairs
    keep = _small(inputs, 1, cfg)[i] & _small(inputs, 2, cfg)[j]
    return float(inputs.scheme.n * np.sum((inputs.incr1[i] ** 2 * inputs.incr2[j] ** 2)[keep]))


def spot_vols(
    inputs: TestInputs,
    s,
    l: int,
    cfg: SpotVolConfig,
    trunc: TruncationConfig | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Local realized variance of component ``l`` at each time in ``s``.

    Sums squared increments whose right endpoint falls in
    ``[s - b_n, s + b_n]`` clipped to ``[0, T]``, divided by the clipped
    window length. With ``cfg.truncated`` only small increments enter.

    Returns the estimates and a mask of windows that contained no increment
    (estimate 0).
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    T = inputs.scheme.T
    if np.any(s < 0) or np.any(s > T):
        raise DomainError(f"s must lie in [0, {T}]")
    ends = inputs.scheme.times(l)[1:]
    sq = inputs.incr(l) ** 2
    if cfg.truncated:
        sq = np.where(_small(inputs, l, trunc or TruncationConfig()), sq, 0.0)
    keep = ends <= T
    ends, sq = ends[keep], sq[keep]
    csum = np.concatenate(([0.0], np.cumsum(sq)))
    lo_t = np.maximum(s - cfg.b_n, 0.0)
    hi_t = np.minimum(s + cfg.b_n, T)
    lo = np.searchsorted(ends, lo_t, side="left")
    hi = np.searchsorted(ends, hi_t, side="right")
    est = (csum[hi] - csum[lo]) / (hi_t - lo_t)
    return est, hi == lo


def spot_vol(
    inputs: TestInputs,
    s: float,
    l: int,
    cfg: SpotVolConfig,
    trunc: TruncationConfig | None = None,
) -> float:
    est, _ = spot_vols(inputs, s, l, cfg, trunc)
    return float(est[0])


class DetectedJumps(NamedTuple):
    index: np.ndarray  # 0-based interval index
    time: np.ndarray  # right endpoint of the interval
    size: np.ndarray  # the increment, used as jump estimate


def detect_jumps(inputs: TestInputs, l: int, trunc: TruncationConfig | None = None) -> DetectedJumps:
    """Intervals ending by T whose increment exceeds ``beta * |I|**varpi``."""
    trunc = trunc or TruncationConfig()
    flagged = ~_small(inputs, l, trunc) & _in_horizon(inputs, l)
    idx = np.nonzero(flagged)[0]
    return DetectedJumps(idx, inputs.scheme.times(l)[idx + 1], inputs.incr(l)[idx])
