"""Command-line entry point: ``ofdm-relay run|sweep|dump-channels``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .channel import PathLossModel, draw_frames, write_channel_csv
from .config import RunOptions, build_options, read_config_file
from .experiment import (ADAPTIVE_SCHEMES, SCHEMES, SweepSpec, db_to_linear, parse_budget_sweep,
                         required_power, run_experiment, sweep_and_report, write_results,
                         write_trace)
from .outage import write_threshold_trace

log = logging.getLogger("ofdm_relay")

# CLI dest -> config-file key
_FLAG_KEYS = {
    "hops": "hops", "subcarriers": "subcarriers", "budget": "budget", "rate": "rate",
    "scheme": "scheme", "frames": "frames", "seed": "seed", "out": "out", "trace": "trace",
    "sweep_budget": "sweep_budget", "alpha_override": "alpha_override",
}


def _add_network_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value settings file; flags override it")
    p.add_argument("--hops", help="number of hops N")
    p.add_argument("--subcarriers", help="subcarriers per hop K")
    p.add_argument("--budget", help="average power budget P, linear or with a dB suffix")
    p.add_argument("--rate", help="target rate R in nats per OFDM symbol")
    p.add_argument("--frames", help="frames per sweep point")
    p.add_argument("--seed", help="base seed for the channel draws")
    p.add_argument("--alpha-override", help="path-loss exponent replacing the terrain formula")
    p.add_argument("--pathloss-literal", action="store_true", default=None,
                   help="use A + alpha*log10(d/d0) instead of A + 10*alpha*log10(d/d0)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ofdm-relay",
                                     description="Outage simulation for OFDM linear relay networks")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one or more schemes at one or more budgets")
    _add_network_flags(run)
    run.add_argument("--scheme", help=f"comma-separated subset of {', '.join(SCHEMES)}, or 'all'")
    run.add_argument("--out", help="results CSV (default: stdout)")
    run.add_argument("--trace", help="per-frame CSV for the last scheme and budget")
    run.add_argument("--bits", action="store_true", help="add a rate_bits column to the trace")
    run.add_argument("--threshold-trace", help="threshold trajectory CSV (adaptive schemes)")
    run.add_argument("--sweep-budget", help="budget sweep lo:hi:steps in dB")
    run.add_argument("--oracle", action="store_true", default=None,
                     help="cross-check the optimal solver against the grid oracle")

    sweep = sub.add_parser("sweep", help="write the figure-style CSV set")
    _add_network_flags(sweep)
    sweep.add_argument("--out-dir", required=True)
    sweep.add_argument("--sweep-budget", help="budget sweep lo:hi:steps in dB")
    sweep.add_argument("--rates", default="", help="comma-separated target rates")
    sweep.add_argument("--hop-list", default="", help="comma-separated hop counts")
    sweep.add_argument("--schemes", default=",".join(SCHEMES))
    sweep.add_argument("--alphas", default="",
                       help="comma-separated exponents for the hop-count study")
    sweep.add_argument("--outage", type=float, default=0.01)

    dump = sub.add_parser("dump-channels", help="write the normalized gains as CSV")
    _add_network_flags(dump)
    dump.add_argument("--out", required=True)
    return parser


def _options(args: argparse.Namespace) -> RunOptions:
    values = read_config_file(args.config) if args.config else {}
    for dest, key in _FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[key] = str(value)
    for flag in ("pathloss_literal", "oracle"):
        if getattr(args, flag, None):
            values[flag] = "true"
    return build_options(values)


def _pathloss(opts: RunOptions) -> PathLossModel:
    return PathLossModel(alpha_override=opts.alpha_override, literal=opts.pathloss_literal)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _schemes(text: str) -> list[str]:
    if text.strip().lower() == "all":
        return list(SCHEMES)
    names = [s.strip() for s in text.split(",") if s.strip()]
    for name in names:
        if name not in SCHEMES:
            raise ValueError(f"unknown scheme {name!r}; choose from {', '.join(SCHEMES)}")
    return names


def cmd_run(args: argparse.Namespace) -> int:
    opts = _options(args)
    cfg = opts.network
    pathloss = _pathloss(opts)
    schemes = _schemes(opts.scheme)
    budgets = ([db_to_linear(db) for db in parse_budget_sweep(opts.sweep_budget)]
               if opts.sweep_budget else [cfg.power_budget])
    frames = draw_frames(cfg, opts.seed, pathloss=pathloss)
    results = []
    last = None
    for scheme in schemes:
        required = required_power(frames, scheme, cfg) if scheme in ADAPTIVE_SCHEMES else None
        for budget in budgets:
            res = run_experiment(cfg.replace(power_budget=budget), scheme, opts.seed,
                                 frames=frames, required=required, pathloss=pathloss,
                                 keep_records=opts.trace is not None, oracle=opts.oracle)
            results.append(res)
            last = res
            if res.oracle_gaps is not None:
                opts.oracle = False
    write_results(opts.out if opts.out else sys.stdout, results)
    if opts.trace and last is not None and last.records is not None:
        write_trace(opts.trace, last.records, bits=args.bits)
    if args.threshold_trace:
        if last is None or last.loop is None:
            raise ValueError("--threshold-trace needs an adaptive scheme")
        write_threshold_trace(args.threshold_trace, last.loop)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    opts = _options(args)
    alphas = _floats(args.alphas) or [None]
    spec = SweepSpec(
        budgets_db=parse_budget_sweep(opts.sweep_budget) if opts.sweep_budget else [],
        rates=_floats(args.rates),
        hops=[int(h) for h in _floats(args.hop_list)],
        schemes=_schemes(args.schemes),
        alphas=alphas,
        outage_target=args.outage,
    )
    paths = sweep_and_report(opts.network, spec, Path(args.out_dir), opts.seed,
                             pathloss=_pathloss(opts))
    for path in paths.values():
        print(path)
    return 0


def cmd_dump(args: argparse.Namespace) -> int:
    opts = _options(args)
    frames = draw_frames(opts.network, opts.seed, pathloss=_pathloss(opts))
    write_channel_csv(args.out, frames)
    return 0


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "dump-channels": cmd_dump}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError, IndexError) as exc:
        print(f"ofdm-relay: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
