"""Command line front-end.

    hybridris run <spec.json> [--seeds N] [--steps N] [--out DIR] [--workers N]
    hybridris compare <dir>... --out table.csv
    hybridris accept [pytest-args...]

Spec files are JSON; see the README for the schema. HYBRIDRIS_WORKERS caps
the worker pool when --workers is not given.
"""

import argparse
import os
import sys

from .harness import compare, load_spec_file, run_spec_dict


def _cmd_run(args):
    d = load_spec_file(args.spec)
    seeds = list(range(args.seeds)) if args.seeds is not None else None
    out = args.out or os.path.join("runs", d.get("name", "experiment"))
    results = run_spec_dict(d, out, seeds_override=seeds,
                            steps_override=args.steps, workers=args.workers)
    for agg in results:
        print(f"{agg['name']}: converged mean reward "
              f"{agg['converged_mean']:.4f} +/- {agg['converged_std']:.4f} "
              f"(active {agg['mode_fraction_active']:.1%}, "
              f"energy {agg['mean_energy_J']:.4g} J/step, "
              f"violations {agg['violations']})")
    print(f"artifacts written to {out}")
    return 0


def _cmd_compare(args):
    result = compare(args.dirs, args.out)
    names = result["names"]
    means = result["stats"]["mean"]
    print("converged mean reward per run:")
    for name in names:
        print(f"  {name}: {means[name]:.4f}")
    for col, t in result["stats"]["paired_t"].items():
        if col.startswith("diff_"):
            print(f"  {col}: mean {means[col]:+.4f} (paired t = {t:.2f})")
    print(f"table written to {args.out}")
    return 0


def _cmd_accept(args):
    import pytest
    target = os.path.join("tests", "test_acceptance.py")
    if not os.path.exists(target):
        print("tests/test_acceptance.py not found; run from the repo root",
              file=sys.stderr)
        return 2
    return pytest.main(["-v", target] + (args.pytest_args or []))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hybridris",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment spec")
    p_run.add_argument("spec", help="path to a JSON spec file")
    p_run.add_argument("--seeds", type=int, default=None,
                       help="override: use seeds 0..N-1")
    p_run.add_argument("--steps", type=int, default=None,
                       help="override total_steps")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--workers", type=int, default=None,
                       help="parallel seed workers")
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="tabulate runs against each other")
    p_cmp.add_argument("dirs", nargs="+", help="run output directories")
    p_cmp.add_argument("--out", required=True, help="output CSV path")
    p_cmp.set_defaults(func=_cmd_compare)

    p_acc = sub.add_parser("accept", help="run the acceptance suite")
    p_acc.add_argument("pytest_args", nargs="*", default=None)
    p_acc.set_defaults(func=_cmd_accept)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
