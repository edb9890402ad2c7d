"""Bootstrap critical values and the test decision.

Under the null of disjoint jumps, ``n * V(f)`` is asymptotically the sum of a
continuous part, estimated by :func:`~cojump.statistics.a_trunc`, and a cross
part ``D`` mixing the jumps of one component with the Brownian increments of
the other. The law of ``D`` depends on the local sampling geometry around
each jump. It is simulated here by resampling the observation interval
around a detected jump among its ``K_n`` neighbours on each side (chosen with
probability proportional to length) and replacing Brownian increments with
``sqrt(|I|) * U``, ``U`` standard normal.
"""

import csv
import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import DomainError, ParameterError
from .sampling import ObservationScheme
from .statistics import (
    DetectedJumps,
    SpotVolConfig,
    TestInputs,
    TruncationConfig,
    a_trunc,
    detect_jumps,
    spot_vols,
    v_cross,
    v_fourth,
)


@dataclass(frozen=True)
class BootstrapConfig:
    """Local window half-width ``K_n`` (in intervals), replications ``M_n``, level ``alpha``."""

    K_n: int
    M_n: int
    alpha: float = 0.05

    def __post_init__(self):
        if self.K_n < 1 or self.M_n < 1:
            raise ParameterError("K_n and M_n must be at least 1")
        if not 0 <= self.alpha <= 1:
            raise ParameterError(f"alpha must lie in [0, 1], got {self.alpha}")

    @classmethod
    def for_n(cls, n: float, alpha: float = 0.05) -> "BootstrapConfig":
        return cls(K_n=max(1, math.floor(math.log(n))), M_n=max(1, int(n)), alpha=alpha)


@dataclass(frozen=True)
class _ShiftTable:
    """Resampling law for a batch of target times.

    ``probs[p, k]`` is the probability of shift ``k - K`` for target ``p``;
    ``lens[p, k, :]`` are the lengths of the intervals (of the component whose
    Brownian increments are replaced) overlapping the shifted interval, padded
    with zeros.
    """

    probs: np.ndarray
    lens: np.ndarray


def _shift_support(scheme: ObservationScheme, s, m: int, K: int):
    s = np.atleast_1d(np.asarray(s, dtype=float))
    k0 = scheme.index.containing(s, m)
    cand = np.asarray(k0)[:, None] + np.arange(-K, K + 1)[None, :]
    valid = (cand >= 0) & (cand < scheme.n_intervals(m))
    weights = np.where(valid, scheme.lengths(m)[np.clip(cand, 0, scheme.n_intervals(m) - 1)], 0.0)
    total = weights.sum(axis=1)
    if np.any(total <= 0):
        raise DomainError("no admissible shifted interval")
    return cand, valid, weights / total[:, None]


def _shift_table(scheme: ObservationScheme, s, l: int, K: int) -> _ShiftTable:
    m = 3 - l
    cand, valid, probs = _shift_support(scheme, s, m, K)
    safe = np.where(valid, cand, 0)
    lo, hi = scheme.index.overlap_range(safe, m, l)
    width = np.where(valid, hi - lo + 1, 0)
    R = max(int(width.max()), 1) if width.size else 1
    offs = np.arange(R)
    idx = lo[..., None] + offs
    use = offs < width[..., None]
    lens_l = scheme.lengths(l)
    lens = np.where(use, lens_l[np.clip(idx, 0, len(lens_l) - 1)], 0.0)
    return _ShiftTable(probs, lens)


def _concat_tables(tables: list[_ShiftTable]) -> _ShiftTable:
    R = max(t.lens.shape[2] for t in tables)
    lens = [np.pad(t.lens, ((0, 0), (0, 0), (0, R - t.lens.shape[2]))) for t in tables]
    return _ShiftTable(np.concatenate([t.probs for t in tables]), np.concatenate(lens))


def _draw_shifts(probs: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Column indices into ``probs`` drawn per row; shape ``(P, size)``."""
    cum = np.cumsum(probs, axis=1)
    cum[:, -1] = 1.0
    u = rng.random((probs.shape[0], size))
    return np.array([np.searchsorted(c, row, side="right") for c, row in zip(cum, u)]).reshape(
        probs.shape[0], size
    )


def _draw_eta(table: _ShiftTable, n: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """``n * sum |I| U^2`` for every target and replication; shape ``(P, size)``."""
    P = table.probs.shape[0]
    if P == 0:
        return np.zeros((0, size))
    choice = _draw_shifts(table.probs, size, rng)
    lens = np.take_along_axis(table.lens, choice[..., None], axis=1)
    u = rng.standard_normal(lens.shape)
    return n * np.sum(lens * u * u, axis=2)


def sample_shift_index(
    scheme: ObservationScheme, s: float, l: int, K_n: int, rng: np.random.Generator, size=None
):
    """Shift ``k`` in ``[-K_n, K_n]`` of the component-``l`` interval containing
    ``s``, drawn with probability proportional to the shifted interval's length.
    Shifts leaving the scheme are dropped and the rest renormalized."""
    _, _, probs = _shift_support(scheme, s, l, K_n)
    draws = _draw_shifts(probs, 1 if size is None else size, rng)[0] - K_n
    return int(draws[0]) if size is None else draws


def sample_eta_hat(
    scheme: ObservationScheme, s: float, l: int, cfg: BootstrapConfig, rng: np.random.Generator, size=None
):
    """Bootstrap draw(s) of ``n * eta`` for component ``l`` at time ``s``."""
    table = _shift_table(scheme, s, l, cfg.K_n)
    eta = _draw_eta(table, scheme.n, 1 if size is None else size, rng)[0]
    return float(eta[0]) if size is None else eta


def d_hat_weights(jumps1: DetectedJumps, jumps2: DetectedJumps, spot) -> np.ndarray:
    """``(jump estimate)^2 * (other component's spot variance)`` per detected jump,
    series-1 jumps first."""
    sv2, sv1 = spot
    return np.concatenate((jumps1.size**2 * np.asarray(sv2), jumps2.size**2 * np.asarray(sv1)))


def sample_d_hat(
    inputs: TestInputs,
    jumps1: DetectedJumps,
    jumps2: DetectedJumps,
    spot,
    cfg: BootstrapConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """``cfg.M_n`` bootstrap replications of the cross term.

    ``spot = (sv2, sv1)`` holds the spot variance of component 2 at the
    series-1 jump times and of component 1 at the series-2 jump times,
    computed once per path. Every replication draws fresh, independent shifts
    and normals for every detected jump.
    """
    scheme = inputs.scheme
    w = d_hat_weights(jumps1, jumps2, spot)
    if w.size == 0:
        return np.zeros(cfg.M_n)
    tables = []
    if len(jumps1.time):
        tables.append(_shift_table(scheme, jumps1.time, 2, cfg.K_n))
    if len(jumps2.time):
        tables.append(_shift_table(scheme, jumps2.time, 1, cfg.K_n))
    eta = _draw_eta(_concat_tables(tables), scheme.n, cfg.M_n, rng)
    return w @ eta


def quantile_hat(samples, alpha: float) -> float:
    """The ``floor(alpha * N)``-th largest sample; the maximum if that rank is 0."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise DomainError("quantile of an empty sample")
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    prod = alpha * x.size
    # absorb representation error such as 0.05 * 400 = 20.000000000000004
    rank = math.floor(round(prod) if abs(prod - round(prod)) < 1e-9 else prod)
    if rank == 0:
        return float(x.max())
    return float(np.partition(x, x.size - rank)[x.size - rank])


@dataclass(frozen=True)
class TestReport:
    """Outcome of one test.

    ``reject`` holds iff ``nVf > A + Q``, which is ``phi_tilde > c_n`` with
    both sides multiplied by the positive normalizer. The undivided form is
    the one evaluated, so a tie (for instance no detected jumps and no
    truncated pairs, where ``nVf == A`` and ``Q == 0``) does not reject on a
    rounding error. ``Q`` is the bootstrap cutoff exceeded by a fraction
    ``alpha`` of the draws.
    """

    __test__ = False

    phi_tilde: float | None
    nVf: float
    A: float
    Q: float
    c_n: float | None
    reject: bool
    alpha: float
    n: float
    d_hat_samples: np.ndarray = field(repr=False)
    diagnostics: dict = field(default_factory=dict)

    @property
    def undefined(self) -> bool:
        return self.phi_tilde is None

    def at_level(self, alpha: float) -> "TestReport":
        """The same test evaluated at another level, reusing the bootstrap draws."""
        Q = quantile_hat(self.d_hat_samples, alpha)
        c_n, reject = _decide(self.phi_tilde, self.nVf, self.A, Q, self.diagnostics["normalizer"])
        return replace(self, Q=Q, c_n=c_n, reject=reject, alpha=alpha)

    def to_dict(self, include_draws: bool = False) -> dict:
        out = asdict(self)
        out.pop("d_hat_samples")
        if include_draws:
            out["d_hat_samples"] = self.d_hat_samples.tolist()
        return out

    def to_json(self, include_draws: bool = False) -> str:
        return json.dumps(self.to_dict(include_draws), indent=2, sort_keys=True)

    def dump_draws(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "d_hat"])
            for m, d in enumerate(self.d_hat_samples, start=1):
                w.writerow([m, repr(float(d))])


def _decide(phi, nVf, A, Q, norm):
    if phi is None:
        return None, False
    return (A + Q) / norm, bool(nVf > A + Q)


def run_test(
    inputs: TestInputs,
    trunc: TruncationConfig | None = None,
    spot: SpotVolConfig | None = None,
    cfg: BootstrapConfig | None = None,
    rng: np.random.Generator | None = None,
) -> TestReport:
    """Test the null of no common jumps on one pair of observed series.

    Defaults: ``beta = 0.03``, ``varpi = 0.49``, ``b_n = 1/sqrt(n)``,
    ``K_n = floor(log n)``, ``M_n = n``, ``alpha = 0.05``, with ``n`` the
    scheme's label.
    """
    n = inputs.scheme.n
    trunc = trunc or TruncationConfig()
    spot = spot or SpotVolConfig.for_n(n)
    cfg = cfg or BootstrapConfig.for_n(n)
    rng = rng if rng is not None else np.random.default_rng()

    vf = v_cross(inputs)
    v1, v2 = v_fourth(inputs, 1), v_fourth(inputs, 2)
    phi = None if v1 * v2 == 0 else vf / math.sqrt(v1 * v2)
    nVf = n * vf
    A = a_trunc(inputs, trunc)

    j1 = detect_jumps(inputs, 1, trunc)
    j2 = detect_jumps(inputs, 2, trunc)
    sv2, empty2 = spot_vols(inputs, j1.time, 2, spot, trunc)
    sv1, empty1 = spot_vols(inputs, j2.time, 1, spot, trunc)
    draws = sample_d_hat(inputs, j1, j2, (sv2, sv1), cfg, rng)

    diag = {
        "n_jumps1": int(len(j1.index)),
        "n_jumps2": int(len(j2.index)),
        "empty_spot_windows": int(empty1.sum() + empty2.sum()),
        "phi_undefined": phi is None,
        "normalizer": n * math.sqrt(v1 * v2),
        "K_n": cfg.K_n,
        "M_n": cfg.M_n,
        "b_n": spot.b_n,
        "beta": trunc.beta,
        "varpi": trunc.varpi,
    }
    Q = quantile_hat(draws, cfg.alpha)
    c_n, reject = _decide(phi, nVf, A, Q, diag["normalizer"])
    return TestReport(
        phi_tilde=phi,
        nVf=nVf,
        A=A,
        Q=Q,
        c_n=c_n,
        reject=reject,
        alpha=cfg.alpha,
        n=n,
        d_hat_samples=draws,
        diagnostics=diag,
    )
