"""Command-line entry points: run one scenario, or compare several."""

import argparse
import os
import sys

from .runner import (emit_run, load_scenario, run_scenario, write_comparison,
                     MODELS, PRESETS)


def _add_shared(p: argparse.ArgumentParser):
    p.add_argument("--model", choices=MODELS, help="virtual cohort family")
    p.add_argument("--subjects", type=int, metavar="N", help="cohort size")
    p.add_argument("--days", type=int, metavar="N", help="trial length in days")
    p.add_argument("--seed", type=int, metavar="S", help="master random seed")
    p.add_argument("--workers", type=int, metavar="N", help="thread count")
    p.add_argument("--out", required=True, metavar="DIR", help="output directory")


def _overrides(args) -> dict:
    return {"model": args.model, "n_subjects": args.subjects, "n_days": args.days,
            "seed": args.seed, "workers": args.workers}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="titrasim",
        description="Closed-loop insulin titration trials on virtual cohorts.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate one scenario and write its artifacts")
    run_p.add_argument("--scenario", required=True,
                       help=f"preset name ({', '.join(sorted(PRESETS))}) or JSON file")
    _add_shared(run_p)
    run_p.add_argument("--emit-cohort", action="store_true",
                       help="also write the sampled subject parameters")

    cmp_p = sub.add_parser("compare",
                           help="run several scenarios and tabulate them side by side")
    cmp_p.add_argument("--scenarios", required=True,
                       help="comma-separated preset names or JSON files")
    _add_shared(cmp_p)
    return parser


def _print_headline(label: str, result):
    agg = result.aggregate
    if not agg:
        print(f"{label}: no surviving subjects ({len(result.failures)} failed)")
        return
    parts = [f"TIR {agg['tir_pct']['mean']:.1f}%",
             f"TBR2 {agg['tbr2_pct']['mean']:.2f}%",
             f"AG {agg['ag_mmol_l']['mean']:.2f} mmol/L",
             f"GMI {agg['gmi_pct']['mean']:.2f}%",
             f"dose {agg['mean_dose_u']['mean']:.1f} U"]
    if result.failures:
        parts.append(f"{len(result.failures)} failed")
    print(f"{label}: " + ", ".join(parts))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_scenario(args.scenario, _overrides(args))
            result = run_scenario(cfg)
            paths = emit_run(result, args.out, emit_cohort=args.emit_cohort)
            _print_headline(cfg.scenario, result)
            for name in sorted(paths):
                print(f"wrote {paths[name]}")
        else:
            labels = [s.strip() for s in args.scenarios.split(",") if s.strip()]
            if not labels:
                raise ValueError("--scenarios needs at least one entry")
            results = {}
            for label in labels:
                cfg = load_scenario(label, _overrides(args))
                if cfg.scenario in results:
                    raise ValueError(f"duplicate scenario {cfg.scenario!r}")
                result = run_scenario(cfg)
                emit_run(result, os.path.join(args.out, cfg.scenario))
                _print_headline(cfg.scenario, result)
                results[cfg.scenario] = result
            path = write_comparison(results, args.out)
            print(f"wrote {path}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
