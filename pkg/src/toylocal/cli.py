"""Command-line entry point.

Exit codes: 0 success, 1 a checked property failed, 2 usage or parse error.
All JSON output is canonical (sorted keys), so identical arguments give
identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from toylocal.bell import DEFAULT_DISTANCE, teleport_run, teleport_stats
from toylocal.cloning import (
    CloningStrategy,
    StrategyError,
    default_preparations,
    null_strategy,
    run_challenge,
    search_strategies,
)
from toylocal.core import StateSpaceTooLarge, validate_measurement
from toylocal.enumeration import enumerate_valid_measurements
from toylocal.formats import FormatError, bundled_measurement, dumps, load_measurement, measurement_to_json
from toylocal.rng import Stream
from toylocal.spacetime import MalformedLog, WorldLog, audit_locality

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    trials: int = 1
    distance: int = DEFAULT_DISTANCE
    god_view: bool = False
    output_path: str | None = None


def _config(args) -> RunConfig:
    return RunConfig(
        seed=args.seed,
        trials=args.trials,
        distance=getattr(args, "distance", DEFAULT_DISTANCE),
        god_view=getattr(args, "god_view", False),
        output_path=args.output,
    )


def _emit(obj, cfg: RunConfig) -> None:
    text = dumps(obj)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _non_negative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not -(2**63) <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _usage_error(msg: str) -> int:
    print(f"toylocal: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def cmd_validate(args) -> int:
    try:
        m = load_measurement(args.path)
    except json.JSONDecodeError as exc:
        return _usage_error(f"{args.path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except FormatError as exc:
        return _usage_error(f"{args.path}: {exc}")
    except OSError as exc:
        return _usage_error(str(exc))
    try:
        report = validate_measurement(m)
    except StateSpaceTooLarge as exc:
        return _usage_error(str(exc))
    print(report.describe())
    return EXIT_OK if report else EXIT_FAIL


def cmd_teleport(args) -> int:
    cfg = _config(args)
    rng = Stream(cfg.seed)
    if cfg.trials == 1:
        t = teleport_run(rng.randbelow(4), rng, distance=cfg.distance)
        out = t.to_json(god_view=cfg.god_view)
        audit = audit_locality(t.event_log)
        out["locality_audit"] = audit.describe()
        _emit(out, cfg)
        return EXIT_OK if audit and t.success else EXIT_FAIL
    stats = teleport_stats(cfg.trials, rng, distance=cfg.distance)
    _emit(stats.to_json(), cfg)
    return EXIT_OK if stats.success_rate == 1 else EXIT_FAIL


def _preparations(names: list[str] | None):
    if not names:
        return default_preparations()
    return [bundled_measurement(n) if not n.endswith(".json") else load_measurement(n) for n in names]


def cmd_clone(args) -> int:
    cfg = _config(args)
    try:
        if args.strategy:
            obj = json.loads(Path(args.strategy).read_text(encoding="utf-8"))
            strategy = CloningStrategy.from_json(obj)
        else:
            strategy = null_strategy()
        strategy.validate(copies=2)
        preps = _preparations(args.prepare)
    except json.JSONDecodeError as exc:
        return _usage_error(f"{args.strategy}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except (StrategyError, FormatError, KeyError, OSError) as exc:
        return _usage_error(str(exc))
    result = run_challenge(strategy, preps, cfg.trials, Stream(cfg.seed))
    out = result.to_json(god_view=cfg.god_view)
    out["strategy"] = strategy.to_json()
    _emit(out, cfg)
    return EXIT_OK


def cmd_clone_search(args) -> int:
    cfg = _config(args)
    try:
        preps = _preparations(args.prepare)
        result = search_strategies(args.particles, args.depth, preparations=preps, node_budget=args.node_budget)
    except (ValueError, KeyError, OSError) as exc:
        return _usage_error(str(exc))
    out = result.to_json()
    if cfg.trials > 1:
        check = run_challenge(result.strategy, preps, cfg.trials, Stream(cfg.seed))
        out["empirical_check"] = check.to_json()
    _emit(out, cfg)
    # a perfect cloner would contradict the theory
    return EXIT_OK if result.probability < 1 else EXIT_FAIL


def cmd_audit(args) -> int:
    """Audit an event log: a JSON array of events, or a transcript with an ``events`` field."""
    try:
        obj = json.loads(Path(args.path).read_text(encoding="utf-8"))
        if isinstance(obj, dict) and "events" in obj:
            obj = obj["events"]
        report = audit_locality(WorldLog.from_json(obj))
    except json.JSONDecodeError as exc:
        return _usage_error(f"{args.path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except (MalformedLog, OSError) as exc:
        return _usage_error(f"{args.path}: {exc}")
    print(report.describe())
    return EXIT_OK if report else EXIT_FAIL


def cmd_enumerate(args) -> int:
    cfg = _config(args)
    try:
        ms = enumerate_valid_measurements(args.n, generator_subclass=args.generator_subclass)
    except ValueError as exc:
        return _usage_error(str(exc))
    _emit([measurement_to_json(m) for m in ms], cfg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toylocal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials_default: int, trials_type=_positive):
        p.add_argument("--seed", type=_seed, default=0, help="64-bit seed (default 0)")
        p.add_argument("--trials", type=trials_type, default=trials_default)
        p.add_argument("--output", help="write JSON here instead of stdout")

    p = sub.add_parser("validate", help="check a measurement JSON file")
    p.add_argument("path")
    p.add_argument("--output", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate, seed=0, trials=1)

    p = sub.add_parser("teleport", help="run teleportation (one transcript, or statistics with --trials > 1)")
    common(p, 1)
    p.add_argument("--distance", type=_non_negative, default=DEFAULT_DISTANCE)
    p.add_argument("--god-view", action="store_true", help="include hidden values in the transcript")
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("clone", help="play the cloning challenge with a strategy file")
    common(p, 10_000)
    p.add_argument("--strategy", help="strategy JSON (default: return the original and one ancilla)")
    p.add_argument("--prepare", action="append", help="preparation: bundled name (P, P_prime, A, B) or JSON path")
    p.add_argument("--god-view", action="store_true", help="include returned hidden states per branch")
    p.set_defaults(func=cmd_clone)

    p = sub.add_parser("clone-search", help="exact search for the best cloning strategy")
    common(p, 1)
    p.add_argument("--particles", type=_positive, default=2)
    p.add_argument("--depth", type=_non_negative, default=2)
    p.add_argument("--prepare", action="append")
    p.add_argument("--node-budget", type=_positive, default=2_000_000)
    p.set_defaults(func=cmd_clone_search)

    p = sub.add_parser("audit", help="re-check the locality of a saved event log or transcript")
    p.add_argument("path")
    p.set_defaults(func=cmd_audit, seed=0, trials=1, output=None)

    p = sub.add_parser("enumerate", help="list canonical valid measurements")
    p.add_argument("n", type=int)
    p.add_argument("--generator-subclass", action="store_true", help="allow n=2 (generated subclass only)")
    p.add_argument("--output")
    p.set_defaults(func=cmd_enumerate, seed=0, trials=1)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
