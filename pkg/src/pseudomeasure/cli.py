"""Command line front end: ``run <config>``, ``list [--json]``, ``suite [--filter name]``.

Exit codes: 0 success, 1 configuration or usage error, 2 a checked property failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema

from .scenarios import DESCRIPTIONS, SCENARIOS, ScenarioOutput, run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_PROPERTY = 0, 1, 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def load_schema() -> dict:
    text = resources.files("pseudomeasure").joinpath("schema/run_config.schema.json").read_text()
    return json.loads(text)


def load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"  at /{'/'.join(map(str, e.absolute_path))}: {e.message}" for e in errors]
        raise ConfigError("config does not match the schema:\n" + "\n".join(lines))
    return cfg


def write_outputs(out: ScenarioOutput, outdir: Path) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        for name, text in out.files.items():
            path = outdir / name
            with open(path, "w", newline="") as fh:
                fh.write(text)
            written.append(path)
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return written


def _execute(cfg: dict, outdir: Path) -> int:
    try:
        out = run_scenario(cfg)
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: scenario {cfg['scenario']!r} rejected its configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in write_outputs(out, outdir):
        print(path)
    status = "ok" if out.ok else "PROPERTY FAILURE"
    print(f"{cfg['scenario']}: {status}")
    return EXIT_OK if out.ok else EXIT_PROPERTY


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    outdir = Path(args.out or cfg.get("output_dir") or f"out/{cfg['scenario']}")
    return _execute(cfg, outdir)


def cmd_list(args) -> int:
    if args.json:
        print(json.dumps([{"name": k, "description": DESCRIPTIONS[k]} for k in SCENARIOS], indent=2))
    else:
        width = max(map(len, SCENARIOS))
        for k in SCENARIOS:
            print(f"{k:<{width}}  {DESCRIPTIONS[k]}")
    return EXIT_OK


def cmd_suite(args) -> int:
    cfg = {"schema_version": 1, "scenario": "property-suite", "seed": args.seed}
    if args.filter:
        cfg["filter"] = args.filter
    return _execute(cfg, Path(args.out or "out/property-suite"))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pseudomeasure", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", help="run a scenario from a JSON config")
    r.add_argument("config")
    r.add_argument("--out", help="output directory (overrides output_dir in the config)")
    r.set_defaults(func=cmd_run)
    ls = sub.add_parser("list", help="list built-in scenarios")
    ls.add_argument("--json", action="store_true")
    ls.set_defaults(func=cmd_list)
    s = sub.add_parser("suite", help="run the property suite")
    s.add_argument("--filter", help="only checks whose name or module contains this text")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
