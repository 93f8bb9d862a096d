"""Command-line runner for the phase-space experiments.

Subcommands: ehrenfest, tdhf-vlasov, ehrenfest-time, counterexample,
composition, selftest.  Each experiment writes a CSV, a JSON summary with
slope fits / guards / pass-fail verdicts, and companion PNG figures, then
exits 0 only if every threshold passed.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, default_config, load_config, validate_config


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (unknown keys rejected)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--h-list", help="comma-separated descending h values")
    p.add_argument("--t-max", type=float, help="time horizon")
    p.add_argument("--jobs", type=int, help="parallel cells")
    p.add_argument("--preset", help="external potential preset name")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wicklab",
                                 description="phase-space laboratory experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("ehrenfest", "tdhf-vlasov", "ehrenfest-time",
                 "counterexample", "composition"):
        p = sub.add_parser(name)
        _add_common(p)
    sub.add_parser("selftest")
    return ap


def _merge_cli(cfg: dict, args: argparse.Namespace) -> dict:
    if args.out:
        cfg["out_dir"] = args.out
    if args.h_list:
        cfg["h_list"] = [float(v) for v in args.h_list.split(",")]
    if args.t_max is not None:
        cfg["t_max"] = args.t_max
    if args.jobs is not None:
        cfg["jobs"] = args.jobs
    if args.preset:
        cfg.setdefault("potential", {})["preset"] = args.preset
    if args.no_figures:
        cfg["figures"] = False
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        from .selftest import run_selftest

        return 1 if run_selftest() else 0

    scenario = args.command.replace("-", "_")
    try:
        cfg = load_config(args.config) if args.config else default_config(scenario)
        if cfg["scenario"] != scenario:
            raise ConfigError(
                f"config names scenario {cfg['scenario']!r}, command wants {scenario!r}")
        cfg = _merge_cli(cfg, args)
        validate_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    from .experiments import run_scenario
    from .report import write_outputs

    result = run_scenario(cfg)
    paths = write_outputs(result, cfg["out_dir"], figures=cfg.get("figures", True))
    print(f"wrote {paths['csv']}")
    print(f"wrote {paths['summary']}")
    for f in paths["figures"]:
        print(f"wrote {f}")
    for crit in result.criteria:
        verdict = "PASS" if crit.passed else "FAIL"
        print(f"{verdict}  {crit.name}: {crit.value:.6g} {crit.kind} {crit.threshold:.6g}")
    return 0 if result.all_pass else 1


if __name__ == "__main__":
    sys.exit(main())
