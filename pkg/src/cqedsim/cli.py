"""Command-line entry point: ``sim run``, ``sim validate`` and ``sim list-scenarios``.

Exit codes: 0 success, 1 invalid config, 2 runtime failure, 3 a configured
expectation was not met.
"""
import argparse
import sys

from .errors import ConfigError, ScenarioRuntimeError
from .scenarios import SCENARIO_DESCRIPTIONS, SCENARIOS, run_scenario, validate_config

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_EXPECTATION = 3


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError([("", f"cannot read {path}: {exc.strerror}")]) from None


def _print_config_error(exc):
    print("config is invalid:", file=sys.stderr)
    for path, msg in exc.errors:
        print(f"  {path or '<document>'}: {msg}", file=sys.stderr)


def cmd_run(args):
    try:
        cfg = validate_config(_read(args.config), seed=args.seed, output_dir=args.out,
                              noise=False if args.no_noise else None)
    except ConfigError as exc:
        _print_config_error(exc)
        return EXIT_CONFIG
    try:
        report = run_scenario(cfg, emit_plots=True if args.emit_plots else None)
    except ScenarioRuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(report.to_text(), end="")
    if not report.passed:
        failed = [k for k, v in report.flags.items() if not v]
        print(f"expectations failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_EXPECTATION
    return EXIT_OK


def cmd_validate(args):
    try:
        cfg = validate_config(_read(args.config))
    except ConfigError as exc:
        _print_config_error(exc)
        return EXIT_CONFIG
    print(f"ok: {cfg.scenario} (digest {cfg.digest})")
    for key, value, source in cfg.provenance:
        print(f"  {key} = {value} ({source})")
    return EXIT_OK


def cmd_list(args):
    for name in SCENARIOS:
        print(f"{name:18s} {SCENARIO_DESCRIPTIONS[name]}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario config and write CSV outputs")
    run.add_argument("config", help="path to a TOML scenario config")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--no-noise", action="store_true",
                     help="disable all stochastic layers (closed-form run)")
    run.add_argument("--emit-plots", action="store_true",
                     help="also write a small matplotlib script per run")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="check a config and show resolved defaults")
    val.add_argument("config")
    val.set_defaults(func=cmd_validate)

    ls = sub.add_parser("list-scenarios", help="list the available scenarios")
    ls.set_defaults(func=cmd_list)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
