"""Command-line front end: run experiments, reproduce the benchmark panels,
evaluate bound values, and list the catalogues.

Exit codes: 0 success, 2 flag/validation errors (message names the offending
value), 1 runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bounds import BOUND_IDS, BOUND_LABELS, BoundParams, OutOfValidityDomain, theory_value
from .environments import INSTANCE_IDS, UnknownInstance, builtin_instance
from .harness import ExperimentConfig, load_config, run_experiment
from .learners import DEFAULT_C0, LEARNER_IDS

PANELS = ("a", "b", "c", "d")
PANEL_TRIALS = {"a": 50, "b": 50, "c": 50, "d": 1}
REPRODUCE_ALGORITHMS = ("hedge", "hedge_constant", "hedge_doubling", "adahedge", "ftl")
DEFAULT_REPRODUCE_HORIZON = 2**14


def _catalogue_epilog() -> str:
    lines = ["catalogues:"]
    lines.append("  instances: " + "  ".join(INSTANCE_IDS))
    lines.append("    parameterizable: prop3:M=..  t4:M=..,T=..,c0=..  prop2:M=..,delta=..,istar=..")
    lines.append("  learners:  " + "  ".join(LEARNER_IDS))
    lines.append("  bounds:    " + "  ".join(BOUND_IDS))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hedgebench",
        description="Regret benchmark for prediction with expert advice.",
        epilog=_catalogue_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and emit the aggregated series")
    run.add_argument("--instance", help="instance id, optionally parameterized (name:key=value,...)")
    run.add_argument("--algorithms", help="comma-separated learner ids")
    run.add_argument("--horizon", type=int, help="number of rounds T")
    run.add_argument("--trials", type=int, default=None, help="number of independent trials N (default 1)")
    run.add_argument("--seed", type=int, default=None, help="base seed; trial k uses stream (seed, k) (default 0)")
    run.add_argument("--c0", action="append", default=[], metavar="ALGO=VALUE",
                     help="rate-constant override, repeatable or comma-separated")
    run.add_argument("--checkpoint-every", type=int, default=None,
                     help="arithmetic checkpoint stride (default: powers of two plus T)")
    run.add_argument("--config", default=None, help="JSON config file; flags override its keys")
    run.add_argument("--out", default=None, help="output path (default: stdout)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")

    rep = sub.add_parser("reproduce", help="regenerate one benchmark panel's data")
    rep.add_argument("panel", help="panel to reproduce: a, b, c or d")
    rep.add_argument("--horizon", type=int, default=DEFAULT_REPRODUCE_HORIZON)
    rep.add_argument("--trials", type=int, default=None,
                     help="override the panel's trial count (50 for a/b/c, 1 for d)")
    rep.add_argument("--seed", type=int, default=1)
    rep.add_argument("--outdir", default=".", help="directory for figure1_<panel>.csv")

    bnd = sub.add_parser("bounds", help="evaluate a catalogued bound")
    bnd.add_argument("--id", required=True, help="bound id (see catalogues)")
    bnd.add_argument("--M", type=int)
    bnd.add_argument("--T", type=int)
    bnd.add_argument("--delta", type=float)
    bnd.add_argument("--c0", type=float)
    bnd.add_argument("--c1", type=float, default=1.0)
    bnd.add_argument("--tau0", type=int)
    bnd.add_argument("--beta", type=float)
    bnd.add_argument("--B", type=float)
    bnd.add_argument("--eps", type=float)
    bnd.add_argument("--C1", type=float)
    bnd.add_argument("--C2", type=float)

    sub.add_parser("list", help="print the instance, learner and bound catalogues")
    return parser


def _parse_c0(entries: list[str], algorithms: tuple[str, ...]) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for entry in entries:
        for piece in entry.split(","):
            name, sep, value = piece.partition("=")
            if not sep:
                raise ValueError(f"--c0 expects ALGO=VALUE, got {piece!r}")
            if name not in algorithms:
                raise ValueError(f"--c0 names learner {name!r} which is not in --algorithms")
            overrides[name] = float(value)
    return overrides


def cmd_run(args) -> int:
    if args.config:
        base = load_config(args.config)
        algorithms = tuple(args.algorithms.split(",")) if args.algorithms else base.algorithms
        config = ExperimentConfig(
            instance=args.instance if args.instance else base.instance,
            algorithms=algorithms,
            horizon=args.horizon if args.horizon is not None else base.horizon,
            trials=args.trials if args.trials is not None else base.trials,
            seed=args.seed if args.seed is not None else base.seed,
            c0=dict(base.c0) | _parse_c0(args.c0, algorithms),
            checkpoint_every=args.checkpoint_every or base.checkpoint_every,
        )
    else:
        for flag, value in (("--instance", args.instance), ("--algorithms", args.algorithms),
                            ("--horizon", args.horizon)):
            if value is None:
                raise ValueError(f"{flag} is required (or provide --config)")
        algorithms = tuple(args.algorithms.split(","))
        config = ExperimentConfig(
            instance=args.instance,
            algorithms=algorithms,
            horizon=args.horizon,
            trials=args.trials if args.trials is not None else 1,
            seed=args.seed if args.seed is not None else 0,
            c0=_parse_c0(args.c0, algorithms),
            checkpoint_every=args.checkpoint_every,
        )
    result = run_experiment(config)
    text = result.csv_text() if args.format == "csv" else result.json_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_reproduce(args) -> int:
    if args.panel not in PANELS:
        raise ValueError(f"unknown panel: {args.panel!r} (expected one of {', '.join(PANELS)})")
    trials = PANEL_TRIALS[args.panel] if args.trials is None else args.trials
    config = ExperimentConfig(
        instance=f"fig-{args.panel}",
        algorithms=REPRODUCE_ALGORITHMS,
        horizon=args.horizon,
        trials=trials,
        seed=args.seed,
        c0=dict(DEFAULT_C0),
    )
    result = run_experiment(config)
    path = f"{args.outdir.rstrip('/')}/figure1_{args.panel}.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(result.csv_text())
    sys.stdout.write(path + "\n")
    return 0


def cmd_bounds(args) -> int:
    params = BoundParams(
        M=args.M, T=args.T, delta=args.delta, c0=args.c0, c1=args.c1,
        tau0=args.tau0, beta=args.beta, B=args.B, eps=args.eps,
        C1=args.C1, C2=args.C2,
    )
    value = theory_value(args.id, params)
    sys.stdout.write(json.dumps(value.as_dict()) + "\n")
    return 0


def cmd_list(args) -> int:
    out = {
        "instances": list(INSTANCE_IDS),
        "learners": list(LEARNER_IDS),
        "bounds": [{"id": bid, "what": BOUND_LABELS[bid]} for bid in BOUND_IDS],
        "default_c0": DEFAULT_C0,
    }
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return 0


_COMMANDS = {"run": cmd_run, "reproduce": cmd_reproduce, "bounds": cmd_bounds, "list": cmd_list}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (UnknownInstance, OutOfValidityDomain, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
