"""Command line interface: ``simulate``, ``test`` and ``mc``.

Settings come from built-in defaults, then an optional JSON ``--config`` file,
then command line flags, with later sources taking precedence. Every command
echoes its fully resolved configuration.
"""

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import harness
from .bootstrap import run_test
from .errors import ParameterError
from .sampling import ObservationScheme, write_scheme_csv
from .statistics import TestInputs
from .streams import path_streams

logger = logging.getLogger("cojump")


class CliError(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def _strings(text: str) -> list[str]:
    return [x.strip() for x in str(text).split(",") if x.strip()]


# per command: key -> (converter, default)
_SIMULATE = {
    "scenario": (str, "I-j"),
    "n": (float, 400.0),
    "seed": (int, 0),
    "out": (str, "sim_out"),
    "T": (float, 1.0),
    "lambda1": (float, 1.0),
    "lambda2": (float, 2.0),
    "scheme": (str, "poisson"),
}
_TEST = {
    "series1": (str, None),
    "series2": (str, None),
    "T": (float, None),
    "n": (float, None),
    "seed": (int, 0),
    "alpha": (float, 0.05),
    "beta": (float, 0.03),
    "varpi": (float, 0.49),
    "b_n": (float, None),
    "K_n": (int, None),
    "M_n": (int, None),
    "truncated_spot": (bool, False),
    "dump_draws": (str, None),
    "out": (str, None),
}
_MC = {
    "scenario": (_strings, None),
    "n": (_floats, None),
    "paths": (int, 1000),
    "alpha": (_floats, [0.01, 0.05, 0.1, 0.25, 0.5]),
    "seed": (int, 0),
    "workers": (int, 1),
    "out": (str, None),
    "T": (float, 1.0),
    "lambda1": (float, 1.0),
    "lambda2": (float, 2.0),
    "scheme": (str, "poisson"),
    "beta": (float, 0.03),
    "varpi": (float, 0.49),
    "b_n": (float, None),
    "K_n": (int, None),
    "M_n": (int, None),
    "truncated_spot": (bool, False),
}
_KEYS = {"simulate": _SIMULATE, "test": _TEST, "mc": _MC}


def _add_flags(p: argparse.ArgumentParser, keys: dict) -> None:
    p.add_argument("--config", help="JSON file with settings for this command")
    for key, (conv, _) in keys.items():
        flag = "--" + key.replace("_", "-")
        if conv is bool:
            p.add_argument(flag, dest=key, action="store_const", const=True, default=None)
        else:
            p.add_argument(flag, dest=key, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cojump", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_flags(sub.add_parser("simulate", help="simulate one scenario path and its observations"), _SIMULATE)
    _add_flags(sub.add_parser("test", help="run the co-jump test on two price series"), _TEST)
    _add_flags(sub.add_parser("mc", help="Monte Carlo rejection curves"), _MC)
    return parser


def resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags; validate keys and convert values."""
    keys = _KEYS[command]
    cfg = {k: default for k, (_, default) in keys.items()}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise CliError(f"config {args.config} must hold a JSON object")
        for k, v in loaded.items():
            if k not in keys:
                raise CliError(f"unknown config key {k!r} for command {command!r}")
            cfg[k] = _convert(k, keys[k][0], v)
    for k, (conv, _) in keys.items():
        v = getattr(args, k)
        if v is not None:
            cfg[k] = _convert(k, conv, v)
    return cfg


def _convert(key, conv, value):
    if value is None:
        return None
    try:
        if conv is bool:
            if not isinstance(value, bool):
                raise ValueError("expected true or false")
            return value
        if conv in (_floats, _strings) and isinstance(value, list):
            return conv(",".join(str(x) for x in value))
        return conv(value)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid value for {key!r}: {value!r} ({exc})") from exc


def read_price_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``time,price`` rows; times must start at 0 and increase strictly."""
    times, prices = [], []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise CliError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["time", "price"]:
            raise CliError(f"{path}:1: expected header 'time,price', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise CliError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                t, x = float(row[0]), float(row[1])
            except ValueError as exc:
                raise CliError(f"{path}:{lineno}: {exc}") from exc
            if not (math.isfinite(t) and math.isfinite(x)):
                raise CliError(f"{path}:{lineno}: non-finite value")
            if not times and t != 0.0:
                raise CliError(f"{path}:{lineno}: first time must be 0, got {t}")
            if times and t <= times[-1]:
                raise CliError(f"{path}:{lineno}: time {t} does not increase (previous {times[-1]})")
            times.append(t)
            prices.append(x)
    if len(times) < 2:
        raise CliError(f"{path}: need at least two observations")
    return np.array(times), np.array(prices)


def write_price_csv(path, times, prices) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", "price"])
        for t, x in zip(times, prices):
            w.writerow([repr(float(t)), repr(float(x))])


def _tuning(cfg: dict) -> harness.Tuning:
    fields = harness.Tuning.__dataclass_fields__
    return harness.Tuning(**{k: v for k, v in cfg.items() if k in fields})


def cmd_simulate(cfg: dict) -> int:
    scenario = harness.get_scenario(cfg["scenario"])
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    tuning = _tuning(cfg)
    case, _ = harness.simulate_case(scenario, cfg["n"], cfg["seed"], 0, tuning)
    scheme = case.scheme
    for l in (1, 2):
        t = scheme.times(l)
        write_scheme_csv(out / f"scheme{l}.csv", t)
        write_price_csv(out / f"prices{l}.csv", t, case.path.at(t)[:, l - 1])
    with open(out / "jumps.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["component", "time", "size"])
        for l in (1, 2):
            for t, d in case.path.jumps[l - 1]:
                w.writerow([l, repr(float(t)), repr(float(d))])
    (out / "config.json").write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n")
    print(json.dumps({"out": str(out), "n_obs1": len(scheme.times1), "n_obs2": len(scheme.times2)}))
    return 0


def cmd_test(cfg: dict) -> int:
    if not cfg["series1"] or not cfg["series2"]:
        raise CliError("both --series1 and --series2 are required")
    t1, x1 = read_price_csv(cfg["series1"])
    t2, x2 = read_price_csv(cfg["series2"])
    T = cfg["T"] if cfg["T"] is not None else min(t1[-1], t2[-1])
    if T <= 0:
        raise CliError(f"horizon T must be positive, got {T}")
    for name, t in (("series1", t1), ("series2", t2)):
        if t[-1] < T:
            raise CliError(f"{name} ends at {t[-1]} before T={T}")
    n = cfg["n"] if cfg["n"] is not None else float(np.count_nonzero(t1 <= T))
    scheme = ObservationScheme(t1, t2, T=T, n=n)
    inputs = TestInputs.from_prices(scheme, x1[: len(scheme.times1)], x2[: len(scheme.times2)])
    tuning = _tuning({**cfg, "T": T})
    trunc, spot, boot = tuning.configs(n, cfg["alpha"])
    report = run_test(inputs, trunc, spot, boot, path_streams(cfg["seed"], 0)["bootstrap"])
    if cfg["dump_draws"]:
        report.dump_draws(cfg["dump_draws"])
    resolved = {**cfg, "T": T, "n": n, "b_n": spot.b_n, "K_n": boot.K_n, "M_n": boot.M_n}
    doc = {"config": resolved, "report": report.to_dict()}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if cfg["out"]:
        Path(cfg["out"]).write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_mc(cfg: dict) -> int:
    if not cfg["scenario"] or not cfg["n"]:
        raise CliError("--scenario and --n are required")
    scenarios = [harness.get_scenario(s) for s in cfg["scenario"]]
    tuning = _tuning(cfg)
    curves = [
        harness.run_scenario(s, n, cfg["paths"], cfg["alpha"], cfg["seed"], tuning, cfg["workers"])
        for s in scenarios
        for n in cfg["n"]
    ]
    text = harness.curves_to_csv(curves)
    if cfg["out"]:
        out = Path(cfg["out"])
        out.write_text(text)
        echo = harness.config_echo(
            cfg["scenario"], cfg["n"], cfg["paths"], cfg["alpha"], cfg["seed"], tuning
        )
        out.with_suffix(".json").write_text(echo + "\n")
    else:
        sys.stdout.write(text)
    return 0


_COMMANDS = {"simulate": cmd_simulate, "test": cmd_test, "mc": cmd_mc}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = resolve(args.command, args)
        return _COMMANDS[args.command](cfg)
    except (CliError, ParameterError, OSError) as exc:
        print(f"cojump {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
