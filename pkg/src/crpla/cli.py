"""Command-line entry point: ``crpla {gen-map,det,solve,simulate,compare}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .channel import load_map, save_map
from .policy import POLICY_KINDS

log = logging.getLogger("crpla")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment config (defaults if omitted)")
    common.add_argument("--seed", type=int, help="master seed, overrides the config")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")
    common.add_argument("-v", "--verbose", action="store_true")

    with_map = argparse.ArgumentParser(add_help=False)
    with_map.add_argument("--map", type=Path, help="reuse a map saved by gen-map")

    p = argparse.ArgumentParser(prog="crpla", description="Challenge-response PLA simulator for a moving receiver")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gen-map", parents=[common], help="synthesize and save the attenuation map")
    sub.add_parser("det", parents=[common], help="analytic vs simulated DET curves")
    s = sub.add_parser("solve", parents=[common, with_map], help="solve one policy and dump it")
    s.add_argument("--policy", choices=POLICY_KINDS, required=True)
    s = sub.add_parser("simulate", parents=[common, with_map], help="run one protocol episode")
    s.add_argument("--policy", choices=POLICY_KINDS)
    sub.add_parser("compare", parents=[common, with_map], help="energy comparison of all policies")
    return p


def _config(args) -> harness.ExperimentConfig:
    config = harness.load_config(args.config) if args.config else harness.config_from_dict({})
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise harness.ConfigError("--seed must be an unsigned 64-bit integer")
        config = config.with_seed(args.seed)
    return config


def _map(args, config):
    if getattr(args, "map", None):
        chmap = load_map(args.map)
        if chmap.grid != config.grid:
            raise harness.ConfigError(f"{args.map}: grid does not match the config")
        return chmap
    return harness.make_map(config)


def run(args) -> list[Path]:
    config = _config(args)
    out = args.out
    if args.command == "gen-map":
        chmap = harness.make_map(config)
        out.mkdir(parents=True, exist_ok=True)
        paths = [save_map(out / "map.npz", chmap)]
        return paths + harness.emit_figure_data("map", out, config, chmap=chmap, plot=args.plot)
    if args.command == "det":
        return harness.emit_figure_data("det", out, config, plot=args.plot)

    chmap = _map(args, config)
    if args.command == "solve":
        hyper = config.policy.hyper()
        from .policy import make_policy
        pol = make_policy(args.policy, chmap, config.energy, **hyper)
        table = pol.table(0) if args.policy == "std" else pol
        paths = [harness.write_csv(out / f"policy_{args.policy}.csv", harness.POLICY_HEADER,
                                   harness.policy_rows(table, chmap.grid))]
        if args.policy == "bi":
            paths.append(harness.write_csv(out / "solver_log.csv", harness.SOLVER_HEADER,
                                           enumerate(table.deltas, start=1)))
            log.info("value iteration: %d sweeps, final delta %.3g", table.iterations_used, table.deltas[-1])
        return paths
    if args.command == "simulate":
        kind = args.policy or config.policy.kind
        pol = harness.build_policies(config, chmap, (kind,))[kind]
        trace = harness.run_episode(config, chmap, pol, config.attack_schedule,
                                    harness.stream_rng(config.seed, "episode"))
        log.info("episode: %d steps, %.2f J, %d accepted", len(trace), trace.total_energy, int(trace.accepted.sum()))
        return [harness.write_csv(out / f"trace_{kind}.csv", harness.TRACE_HEADER, trace.rows(chmap.grid))]
    if args.command == "compare":
        policies = harness.build_policies(config, chmap)
        comparison = harness.compare_policies(config, chmap, policies=policies)
        return (harness.emit_figure_data("energy", out, config, chmap=chmap, comparison=comparison, plot=args.plot)
                + harness.emit_figure_data("trajectory", out, config, chmap=chmap, policies=policies, plot=args.plot))
    raise AssertionError(args.command)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        for path in run(args):
            print(path)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, IndexError, OSError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
