"""Exact simulation of the bivariate multiplicative jump-diffusion benchmark.

Each component follows

    dX_t = X_t sigma dW_t + alpha_i X_{t-} x mu_i(dt, dx) + alpha_3 X_{t-} x mu_3(dt, dx)

with correlated Brownian drivers and three independent compound Poisson
drivers: driver 1 moves X1 only, driver 2 moves X2 only and driver 3 moves
both with the same mark. Marks are uniform on ``[-h, -l] U [l, h]``.

Coefficients are constant between events, so the path is simulated exactly
at any set of times: geometric Brownian factors across gaps and
multiplicative jump factors at jump times.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class JumpDriverSpec:
    """One compound Poisson jump driver.

    Attributes
    ----------
    alpha : float
        Jump scale; a mark ``x`` multiplies the affected component by ``1 + alpha * x``.
    kappa : float
        Jump intensity per unit time. ``kappa = 0`` switches the driver off.
    l, h : float
        Mark magnitudes are uniform on ``[l, h]`` with ``0 < l < h``.
    """

    alpha: float = 0.0
    kappa: float = 0.0
    l: float = 0.05
    h: float = 0.1

    def __post_init__(self):
        if not 0 < self.l < self.h:
            raise ParameterError(f"jump driver needs 0 < l < h, got l={self.l}, h={self.h}")
        if self.kappa < 0:
            raise ParameterError(f"jump intensity must be >= 0, got kappa={self.kappa}")

    @property
    def active(self) -> bool:
        return self.kappa > 0


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of the benchmark model.

    ``sigma1`` and ``sigma2`` are the diffusion coefficients (not variances),
    ``rho`` the Brownian correlation. ``driver1`` hits X1 only, ``driver2`` hits
    X2 only, ``driver3`` hits both.
    """

    sigma1: float
    sigma2: float
    rho: float = 0.0
    driver1: JumpDriverSpec = field(default_factory=JumpDriverSpec)
    driver2: JumpDriverSpec = field(default_factory=JumpDriverSpec)
    driver3: JumpDriverSpec = field(default_factory=JumpDriverSpec)
    x0: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ParameterError(f"rho must lie in [-1, 1], got {self.rho}")
        if min(self.x0) <= 0:
            raise ParameterError(f"initial values must be positive, got {self.x0}")

    @property
    def drivers(self) -> tuple[JumpDriverSpec, JumpDriverSpec, JumpDriverSpec]:
        return (self.driver1, self.driver2, self.driver3)


# components hit by each driver
_AFFECTS = {1: (0,), 2: (1,), 3: (0, 1)}


@dataclass(frozen=True)
class JumpEvent:
    time: float
    driver: int
    mark: float


@dataclass(frozen=True)
class PathRecord:
    """Exact realization of X at a set of event times.

    Attributes
    ----------
    event_times : ndarray, shape (E,)
        Strictly increasing union of the evaluation times and jump times.
    values : ndarray, shape (E, 2)
        X at each event time (right-continuous, i.e. after any jump).
    jump_event_times : ndarray, shape (J,)
        Times of all jump events, in order.
    left_limits : ndarray, shape (J, 2)
        X_{s-} at each jump event.
    jumps : tuple of two ndarrays, each shape (k_l, 2)
        Per component, rows ``(time, jump size)`` of every jump of that component.
    """

    event_times: np.ndarray
    values: np.ndarray
    jump_event_times: np.ndarray
    left_limits: np.ndarray
    jumps: tuple[np.ndarray, np.ndarray]

    def at(self, times) -> np.ndarray:
        """Values at times that belong to ``event_times`` (exact lookup)."""
        times = np.asarray(times, dtype=float)
        idx = np.searchsorted(self.event_times, times)
        idx = np.minimum(idx, len(self.event_times) - 1)
        if not np.array_equal(self.event_times[idx], times):
            raise DomainError("requested times were not simulated")
        return self.values[idx]


def simulate_jumps(params: ModelParams, T: float, rng: np.random.Generator) -> list[JumpEvent]:
    """Draw all jump events of the three drivers on ``(0, T]``, sorted by time."""
    if T <= 0:
        raise DomainError(f"horizon must be positive, got T={T}")
    events = []
    for d, spec in enumerate(params.drivers, start=1):
        if not spec.active:
            continue
        count = rng.poisson(spec.kappa * T)
        # uniform on (0, T]
        times = T - rng.random(count) * T
        signs = np.where(rng.random(count) < 0.5, -1.0, 1.0)
        marks = signs * rng.uniform(spec.l, spec.h, size=count)
        events.extend(JumpEvent(float(t), d, float(x)) for t, x in zip(times, marks))
    events.sort(key=lambda e: (e.time, e.driver))
    return events


def _separate_jump_times(jump_times: np.ndarray, eval_times: np.ndarray) -> np.ndarray:
    """Move jump times that coincide with an evaluation time (or an earlier jump)
    one ulp towards the interior of the enclosing half-open interval."""
    out = jump_times.copy()
    taken = set(eval_times.tolist())
    for k, t in enumerate(out):
        while t in taken:
            t = np.nextafter(t, -np.inf)
        out[k] = t
        taken.add(t)
    return out


def simulate_path(
    params: ModelParams,
    T: float,
    eval_times,
    jumps: list[JumpEvent],
    rng: np.random.Generator,
) -> PathRecord:
    """Simulate X exactly at ``eval_times`` and at every jump time.

    ``T`` is the simulation horizon: all evaluation and jump times must lie in
    ``[0, T]``.
    """
    eval_times = np.asarray(eval_times, dtype=float)
    if eval_times.size and (eval_times[0] < 0 or eval_times[-1] > T):
        raise DomainError(f"evaluation times must lie in [0, {T}]")
    if np.any(np.diff(eval_times) < 0):
        raise DomainError("evaluation times must be sorted")
    if any(not 0 < e.time <= T for e in jumps):
        raise DomainError(f"jump times must lie in (0, {T}]")

    eval_times = np.unique(eval_times)
    jump_times = _separate_jump_times(np.array([e.time for e in jumps], dtype=float), eval_times)
    order = np.argsort(jump_times, kind="stable")
    jump_times = jump_times[order]
    jumps = [jumps[k] for k in order]

    times = np.union1d(eval_times, jump_times)
    E = len(times)
    dt = np.diff(times, prepend=0.0)

    z = rng.standard_normal((E, 2))
    sq = np.sqrt(dt)
    rho = params.rho
    dw1 = sq * z[:, 0]
    dw2 = sq * (rho * z[:, 0] + np.sqrt(1.0 - rho * rho) * z[:, 1])
    s1, s2 = params.sigma1, params.sigma2
    diffusion = np.exp(
        np.column_stack((s1 * dw1 - 0.5 * s1 * s1 * dt, s2 * dw2 - 0.5 * s2 * s2 * dt))
    )

    jump_pos = np.searchsorted(times, jump_times)
    jump_factor = np.ones((E, 2))
    for pos, ev in zip(jump_pos, jumps):
        spec = params.drivers[ev.driver - 1]
        for c in _AFFECTS[ev.driver]:
            jump_factor[pos, c] *= 1.0 + spec.alpha * ev.mark

    # interleave so that the running product passes through X_{s-} then X_s
    factors = np.empty((2 * E, 2))
    factors[0::2] = diffusion
    factors[1::2] = jump_factor
    running = np.asarray(params.x0, dtype=float) * np.cumprod(factors, axis=0)
    left = running[0::2]
    values = running[1::2]

    per_component = ([], [])
    for pos, ev in zip(jump_pos, jumps):
        alpha = params.drivers[ev.driver - 1].alpha
        for c in _AFFECTS[ev.driver]:
            per_component[c].append((times[pos], left[pos, c] * alpha * ev.mark))
    jump_arrays = tuple(np.array(rows, dtype=float).reshape(-1, 2) for rows in per_component)

    return PathRecord(
        event_times=times,
        values=values,
        jump_event_times=times[jump_pos],
        left_limits=left[jump_pos],
        jumps=jump_arrays,
    )


def jump_correlation(path: PathRecord) -> float | None:
    """Correlation of squared jumps, ``B / sqrt(B1 * B2)``, from the true jumps.

    Returns ``None`` when either component has no jump (the statistic is not
    defined there).
    """
    return squared_jump_correlation(path.jumps[0], path.jumps[1])


def squared_jump_correlation(jumps1, jumps2) -> float | None:
    """Same as :func:`jump_correlation` for explicit ``(time, size)`` rows."""
    j1 = np.asarray(jumps1, dtype=float).reshape(-1, 2)
    j2 = np.asarray(jumps2, dtype=float).reshape(-1, 2)
    b1 = np.sum(j1[:, 1] ** 4)
    b2 = np.sum(j2[:, 1] ** 4)
    if b1 == 0 or b2 == 0:
        return None
    _, i1, i2 = np.intersect1d(j1[:, 0], j2[:, 0], return_indices=True)
    b = np.sum(j1[i1, 1] ** 2 * j2[i2, 1] ** 2)
    return float(b / np.sqrt(b1 * b2))
