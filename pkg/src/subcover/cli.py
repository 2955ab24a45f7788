"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 dataset error,
4 some row infeasible (or failed) while ``--require-feasible`` is set.
"""
import argparse
import sys

from .errors import ConfigError, DatasetError, InputError
from .experiment import ExperimentConfig, load, rows_to_csv, run_baseline, run_experiment
from .usm import USM_NAMES

EXIT_OK, EXIT_CONFIG, EXIT_DATASET, EXIT_INFEASIBLE = 0, 2, 3, 4

COMMANDS = {
    "baseline": ("dg-baseline",),
    "cover-multi": ("multi",),
    "cover-single": ("single",),
    "kcsm-single-max": ("singlemax",),
    "sweep": None,
}


def _floats(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="subcover", description="Streaming submodular cover and knapsack experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--dataset", required=True,
                       help="snap:PATH, tagged:PATH or synth:KIND:n=..,p=..")
        p.add_argument("--cost-file", help="element-id<TAB>cost file")
        p.add_argument("--cost-column", action="store_true",
                       help="read costs from the tagged corpus cost column")
        p.add_argument("--epsilon", type=_floats, default=(0.5,), help="comma list, each in (0,1)")
        p.add_argument("--tau", type=_floats, default=(), help="absolute targets (comma list)")
        p.add_argument("--tau-frac", type=_floats, default=(), help="targets as fractions of f0")
        p.add_argument("--upper-bound", type=float, help="initial B for cover-single (default w(U))")
        p.add_argument("--kappa", type=_floats, default=(), help="budgets for kcsm-single-max")
        p.add_argument("--usm", choices=USM_NAMES)
        p.add_argument("--reps", type=int, default=50)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="CSV path (default stdout)")
        p.add_argument("--require-feasible", action="store_true")
        p.add_argument("--timings", action="store_true",
                       help="record wall_ms (makes the CSV run-dependent)")
        if name == "sweep":
            p.add_argument("--algorithms", default="multi,single",
                           help="comma list of multi, single, singlemax, dg-baseline")
    return parser


def config_from_args(args):
    algorithms = COMMANDS[args.command]
    if algorithms is None:
        algorithms = tuple(a.strip() for a in args.algorithms.split(",") if a.strip())
    return ExperimentConfig(
        dataset=args.dataset, algorithms=algorithms, usm=args.usm, reps=args.reps,
        seed=args.seed, epsilons=args.epsilon, tau=args.tau, tau_frac=args.tau_frac,
        upper_bound=args.upper_bound, kappa=args.kappa, cost_file=args.cost_file,
        cost_column=args.cost_column, timings=args.timings, out=args.out,
    )


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors exit 2, --help exits 0
        return exc.code
    try:
        config = config_from_args(args)
        config.validate()
        dataset = load(config)
        if args.command == "baseline":
            base = run_baseline(dataset, config.reps, config.seed)
            text = f"f0,c0,q0\n{base.f0!r},{base.c0!r},{base.q0}\n"
            rows = []
        else:
            rows = run_experiment(config, dataset)
            text = rows_to_csv(rows)
    except DatasetError as exc:
        print(f"subcover: dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    except (ConfigError, InputError) as exc:
        print(f"subcover: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.require_feasible and any(r.get("error") or not r.get("feasible") for r in rows):
        print("subcover: at least one result is infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
