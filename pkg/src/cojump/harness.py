"""Monte Carlo rejection curves for the twelve benchmark scenarios.

Each path owns independent seeded streams derived from
``(master_seed, path_index)``, so the output does not depend on the number of
worker processes or the order in which paths finish.
"""

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bootstrap import BootstrapConfig, run_test
from .errors import ParameterError
from .model import JumpDriverSpec, ModelParams, PathRecord, simulate_jumps, simulate_path
from .sampling import ObservationScheme, gen_equidistant_scheme, gen_poisson_scheme
from .statistics import SpotVolConfig, TestInputs, TruncationConfig
from .streams import path_streams

logger = logging.getLogger(__name__)

SIGMA = math.sqrt(8e-5)
CSV_HEADER = ["scenario", "n", "alpha", "rejection_rate", "n_paths", "n_undefined", "master_seed"]

# (kappa, h) per jump regime; l = 0.05 and alpha = 0.01 throughout
_REGIMES = {"I": (1.0, 0.7484), "II": (5.0, 0.3187), "III": (25.0, 0.1238)}


@dataclass(frozen=True)
class Scenario:
    name: str
    params: ModelParams

    @property
    def requires_common_jump_filter(self) -> bool:
        return self.params.driver3.active


def scenario_registry() -> list[Scenario]:
    """The twelve parameter settings: common jumps only (``-j``), mixed (``-m``),
    disjoint with independent (``-d0``) or perfectly correlated (``-d1``) Brownian motions."""
    out = []
    for kind in ("j", "m", "d0", "d1"):
        for regime, (kappa, h) in _REGIMES.items():
            on = JumpDriverSpec(alpha=0.01, kappa=kappa, l=0.05, h=h)
            off = JumpDriverSpec()
            rho = {"j": 0.0, "m": 0.5, "d0": 0.0, "d1": 1.0}[kind]
            idio = on if kind != "j" else off
            common = on if kind in ("j", "m") else off
            params = ModelParams(SIGMA, SIGMA, rho=rho, driver1=idio, driver2=idio, driver3=common)
            out.append(Scenario(f"{regime}-{kind}", params))
    return out


def get_scenario(name: str) -> Scenario:
    reg = {s.name: s for s in scenario_registry()}
    if name not in reg:
        raise ParameterError(f"unknown scenario {name!r}; valid names: {', '.join(reg)}")
    return reg[name]


@dataclass(frozen=True)
class Tuning:
    """Everything besides the scenario that determines a Monte Carlo run.

    ``b_n``, ``K_n`` and ``M_n`` default to ``1/sqrt(n)``, ``floor(log n)`` and
    ``n`` when left as ``None``.
    """

    T: float = 1.0
    lambda1: float = 1.0
    lambda2: float = 2.0
    scheme: str = "poisson"
    beta: float = 0.03
    varpi: float = 0.49
    b_n: float | None = None
    K_n: int | None = None
    M_n: int | None = None
    truncated_spot: bool = False

    def configs(self, n: float, alpha: float = 0.05):
        trunc = TruncationConfig(self.beta, self.varpi)
        spot = SpotVolConfig(self.b_n if self.b_n is not None else 1.0 / math.sqrt(n), self.truncated_spot)
        default = BootstrapConfig.for_n(n, alpha)
        boot = BootstrapConfig(
            K_n=self.K_n if self.K_n is not None else default.K_n,
            M_n=self.M_n if self.M_n is not None else default.M_n,
            alpha=alpha,
        )
        return trunc, spot, boot


@dataclass(frozen=True)
class SimulatedCase:
    path: PathRecord
    scheme: ObservationScheme
    inputs: TestInputs
    jumps: list


def draw_jumps(scenario: Scenario, T: float, rng: np.random.Generator, max_tries: int = 100_000):
    """Jump events, redrawn until a common jump occurs when the scenario requires one."""
    for _ in range(max_tries):
        jumps = simulate_jumps(scenario.params, T, rng)
        if not scenario.requires_common_jump_filter or any(e.driver == 3 for e in jumps):
            return jumps
    raise RuntimeError(f"no common jump after {max_tries} draws")


def simulate_case(
    scenario: Scenario, n: float, master_seed: int, path_index: int, tuning: Tuning = Tuning()
) -> tuple[SimulatedCase, dict]:
    """One path of the scenario observed on a fresh scheme.

    Returns the case and the path's random streams (the ``bootstrap`` stream
    is still unused).
    """
    streams = path_streams(master_seed, path_index)
    jumps = draw_jumps(scenario, tuning.T, streams["jumps"])
    if tuning.scheme == "poisson":
        scheme = gen_poisson_scheme(n, tuning.lambda1, tuning.lambda2, tuning.T, streams["sampling"])
    elif tuning.scheme == "equidistant":
        scheme = gen_equidistant_scheme(int(n), tuning.T)
    else:
        raise ParameterError(f"unknown scheme kind {tuning.scheme!r}")
    eval_times = np.union1d(scheme.times1, scheme.times2)
    path = simulate_path(scenario.params, float(eval_times[-1]), eval_times, jumps, streams["brownian"])
    return SimulatedCase(path, scheme, TestInputs.from_path(path, scheme), jumps), streams


def run_path(
    scenario: Scenario, n: float, master_seed: int, path_index: int, alphas, tuning: Tuning = Tuning()
) -> tuple[bool, tuple[bool, ...]]:
    """Simulate and test one path at every level in ``alphas``.

    The bootstrap draws do not depend on the level, so they are computed once
    and only the quantile changes. Returns ``(defined, rejections)``.
    """
    case, streams = simulate_case(scenario, n, master_seed, path_index, tuning)
    trunc, spot, boot = tuning.configs(n, alphas[0])
    report = run_test(case.inputs, trunc, spot, boot, streams["bootstrap"])
    if report.undefined:
        return False, tuple(False for _ in alphas)
    return True, tuple(report.at_level(a).reject for a in alphas)


@dataclass
class RejectionCurve:
    scenario: str
    n: float
    alpha_grid: list[float]
    rejection_rate: list[float]
    n_paths: int
    n_undefined: int
    master_seed: int
    wall_time: float = field(default=0.0, compare=False)

    def rows(self) -> list[list]:
        return [
            [self.scenario, _fmt(self.n), _fmt(a), _fmt(r), self.n_paths, self.n_undefined, self.master_seed]
            for a, r in zip(self.alpha_grid, self.rejection_rate)
        ]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) or (isinstance(x, float) and x.is_integer() and abs(x) < 1e15):
        return str(int(x))
    return format(float(x), ".17g")


def _run_path_star(args):
    return run_path(*args)


def run_scenario(
    scenario: Scenario | str,
    n: float,
    n_paths: int,
    alpha_grid,
    master_seed: int,
    tuning: Tuning = Tuning(),
    workers: int = 1,
) -> RejectionCurve:
    """Rejection frequencies over ``alpha_grid`` from ``n_paths`` simulated paths.

    Paths with an undefined statistic are counted in ``n_undefined`` and
    excluded from the rates.
    """
    if isinstance(scenario, str):
        scenario = get_scenario(scenario)
    if n_paths < 1:
        raise ParameterError("n_paths must be at least 1")
    alphas = tuple(float(a) for a in alpha_grid)
    start = time.perf_counter()
    jobs = [(scenario, n, master_seed, k, alphas, tuning) for k in range(n_paths)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_path_star, jobs, chunksize=max(1, n_paths // (8 * workers))))
    else:
        results = [_run_path_star(j) for j in jobs]
    defined = [r for ok, r in results if ok]
    counts = np.sum(np.array(defined, dtype=int).reshape(-1, len(alphas)), axis=0)
    rates = [float(c) / len(defined) if defined else math.nan for c in counts]
    elapsed = time.perf_counter() - start
    logger.info("%s n=%s: %d paths in %.1fs", scenario.name, n, n_paths, elapsed)
    return RejectionCurve(
        scenario=scenario.name,
        n=n,
        alpha_grid=list(alphas),
        rejection_rate=rates,
        n_paths=n_paths,
        n_undefined=n_paths - len(defined),
        master_seed=master_seed,
        wall_time=elapsed,
    )


def curves_to_csv(curves: list[RejectionCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in curves:
        w.writerows(c.rows())
    return buf.getvalue()


def config_echo(scenarios, ns, n_paths, alpha_grid, master_seed, tuning: Tuning) -> str:
    """Fully resolved configuration of a Monte Carlo run as JSON."""
    resolved = {
        str(n): dict(
            zip(("truncation", "spot", "bootstrap"), (asdict(c) for c in tuning.configs(n)))
        )
        for n in ns
    }
    doc = {
        "scenarios": list(scenarios),
        "n": list(ns),
        "paths": n_paths,
        "alpha": list(alpha_grid),
        "seed": master_seed,
        "tuning": asdict(tuning),
        "resolved_per_n": resolved,
    }
    return json.dumps(doc, indent=2, sort_keys=True)
