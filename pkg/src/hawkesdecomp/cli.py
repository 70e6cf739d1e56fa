"""Command-line interface.

Commands: ``simulate``, ``estimate``, ``decompose``, ``decompose-batch``,
``score``, ``report``.  Exit code 0 on success, 2 on invalid input, 3 when
no stationary model is found.  Every flag can also be supplied through a
``key = value`` config file (``--config``); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import io as hio
from .covariance import covariance_grid, horizon_from_histogram
from .kernels import kernel_from_dict
from .likelihood import log_likelihood
from .search import DecompositionConfig, NoStationaryModelError, decompose
from .simulate import EventSequence, HawkesModel, simulate
from .spectral import invert_to_kernel

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NO_STATIONARY_MODEL = 3


def _load_config(path) -> dict:
    """Parse a flat ``key = value`` config file."""
    config = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        config[key.strip().replace("-", "_")] = value.strip()
    return config


def _resolve(args, config: dict, key: str, cast, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return cast(config[key])
    return default


def _read_model(path) -> HawkesModel:
    doc = json.loads(Path(path).read_text())
    return HawkesModel(mu=float(doc["mu"]), kernel=kernel_from_dict(doc["kernel"]))


def _decomposition_config(args, config) -> DecompositionConfig:
    return DecompositionConfig(
        resolution=_resolve(args, config, "resolution", int, 100),
        horizon_percentile=_resolve(args, config, "horizon_percentile", float, 0.95),
        tau_max=_resolve(args, config, "tau_max", float, None),
        eta=_resolve(args, config, "eta", float, 1.2),
        holdout=_resolve(args, config, "holdout", float, None),
        gd_restarts=_resolve(args, config, "gd_restarts", int, 5),
    )


def _read_events_arg(args, config) -> EventSequence:
    unit = _resolve(args, config, "unit", float, 1.0)
    return hio.read_events(args.infile, unit=unit)


def _cmd_simulate(args, config) -> int:
    model = _read_model(args.model)
    seed = _resolve(args, config, "seed", int, 0)
    events = simulate(model, args.horizon, seed)
    hio.write_events(events, args.out)
    print(f"simulated {len(events)} events on [0, {args.horizon:g}] -> {args.out}")
    return EXIT_OK


def _cmd_estimate(args, config) -> int:
    events = _read_events_arg(args, config)
    resolution = _resolve(args, config, "resolution", int, 100)
    percentile = _resolve(args, config, "horizon_percentile", float, 0.95)
    horizon = min(horizon_from_histogram(events, percentile), events.horizon_T / 2.0)
    grid = covariance_grid(events, horizon / resolution, horizon)
    out = Path(args.out)
    rows = ["lag_time,nu_value"] + [
        f"{lag:.12g},{val:.12g}" for lag, val in zip(grid.lags, grid.values)
    ]
    out.write_text("\n".join(rows) + "\n")
    estimate = invert_to_kernel(grid)
    phi_path = out.parent / "phi_est.csv"
    rows = ["t,phi_hat"] + [
        f"{t:.12g},{v:.12g}" for t, v in zip(estimate.times, estimate.values)
    ]
    phi_path.write_text("\n".join(rows) + "\n")
    print(f"wrote {out} and {phi_path} ({len(grid.values)} lags, delta {grid.delta:.6g})")
    return EXIT_OK


def _cmd_decompose(args, config) -> int:
    events = _read_events_arg(args, config)
    result = decompose(events, _decomposition_config(args, config))
    hio.write_result(result, args.out)
    print(f"chosen {result.chosen} -> {args.out}")
    return EXIT_OK


def _cmd_decompose_batch(args, config) -> int:
    in_dir = Path(args.in_dir)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = sorted(in_dir.glob("*.csv"))
    if not files:
        raise ValueError(f"no .csv sequences in {in_dir}")
    cfg = _decomposition_config(args, config)
    unit = _resolve(args, config, "unit", float, 1.0)

    def run(path: Path) -> str:
        try:
            events = hio.read_events(path, unit=unit)
            result = decompose(events, cfg)
            hio.write_result(result, out_dir / (path.stem + ".json"))
            return f"{path.name}: {result.chosen}"
        except NoStationaryModelError:
            return f"{path.name}: no stationary model"
        except (ValueError, OSError) as exc:
            return f"{path.name}: invalid ({exc})"

    with ThreadPoolExecutor(max_workers=4) as pool:
        for line in pool.map(run, files):
            print(line)
    return EXIT_OK


def _cmd_score(args, config) -> int:
    model = _read_model(args.model)
    events = _read_events_arg(args, config)
    llh = log_likelihood(model, events)
    print(json.dumps({"llh": llh.value, "n": llh.n_events}))
    return EXIT_OK


def _cmd_report(args, config) -> int:
    events = _read_events_arg(args, config)
    result = decompose(events, _decomposition_config(args, config))
    bundle = hio.build_report(result, events)
    files = hio.emit_report(bundle, args.out_dir)
    for f in files:
        print(f)
    return EXIT_OK


def _add_decompose_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--resolution", type=int, default=None, help="lag grid resolution (default 100)")
    p.add_argument("--horizon-percentile", type=float, default=None, dest="horizon_percentile")
    p.add_argument("--tau-max", type=float, default=None, dest="tau_max", help="explicit lag horizon")
    p.add_argument("--eta", type=float, default=None, help="level-2 regularization factor (default 1.2)")
    p.add_argument("--holdout", type=float, default=None, help="train fraction for held-out scoring")
    p.add_argument("--gd-restarts", type=int, default=None, dest="gd_restarts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hawkesdecomp")
    parser.add_argument("--config", default=None, help="key = value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a Hawkes process")
    p.add_argument("--model", required=True, help="model JSON ({mu, kernel})")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="covariance grid + nonparametric kernel estimate")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--resolution", type=int, default=None)
    p.add_argument("--horizon-percentile", type=float, default=None, dest="horizon_percentile")
    p.add_argument("--unit", type=float, default=None)
    p.add_argument("--out", required=True, help="covariance CSV (phi_est.csv written alongside)")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("decompose", help="automatic kernel decomposition")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--unit", type=float, default=None)
    _add_decompose_options(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("decompose-batch", help="decompose every CSV in a directory")
    p.add_argument("--in-dir", dest="in_dir", required=True)
    p.add_argument("--unit", type=float, default=None)
    _add_decompose_options(p)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=_cmd_decompose_batch)

    p = sub.add_parser("score", help="log-likelihood of a model on a sequence")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--unit", type=float, default=None)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("report", help="decompose and emit the full report")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--unit", type=float, default=None)
    _add_decompose_options(p)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {}
    if args.config:
        try:
            config = _load_config(args.config)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID_INPUT
    try:
        return args.func(args, config)
    except NoStationaryModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_STATIONARY_MODEL
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
