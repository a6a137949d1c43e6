"""Command-line interface: ``sdsim <subcommand> ...``.

Exit status is 0 on success, 1 when the model or run reports errors and 2
for usage errors (argparse's convention).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import experiments
from .compiler import compile_model
from .engine import RngPolicy, simulate
from .errors import SDSimError
from .expr import format_number
from .frs import PRESETS, build_frs_model
from .model import with_control
from .output import render_chart, write_csv
from .parser import dumps_json, parse_model
from .unitcheck import check_model

log = logging.getLogger("sdsim")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SDSimError(f"cannot read {path}: {exc.strerror or exc}") from None


def _parse_file(path: str, out, err):
    result = parse_model(_read(path))
    for d in result.diagnostics:
        print(f"{path}:{d}", file=err)
    return result


def _assignment(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    name = name.strip().strip('"')
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value for {name!r} is not a number: {value!r}") from None


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _count(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _values(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("expected a comma-separated list of numbers")
    return [_number(p) for p in parts]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sdsim", description="System dynamics simulator for SDL stock-and-flow models.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("parse", help="parse a model and report diagnostics")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="print the model as JSON")

    p = sub.add_parser("check-units", help="dimensional consistency audit")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="print mismatches as JSON")

    p = sub.add_parser("run", help="simulate one model run")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("file", nargs="?")
    src.add_argument("--builtin", choices=["frs"])
    p.add_argument("--seed", type=_seed, default=None)
    p.add_argument("--set", dest="overrides", type=_assignment, action="append", default=[],
                   metavar="NAME=VALUE", help="override a constant (repeatable)")
    p.add_argument("--final-time", type=_number, default=None)
    p.add_argument("--dt", type=_positive, default=None)
    p.add_argument("--noise", choices=["on", "off"], default="on")
    p.add_argument("--out", metavar="FILE.csv")
    p.add_argument("--svg", metavar="FILE.svg")

    p = sub.add_parser("experiment", help="run one of the four FRS experiments")
    p.add_argument("name", choices=sorted(experiments.RUNNERS))
    p.add_argument("--seeds", type=_count, default=len(experiments.DEFAULT_SEEDS), help="use seeds 1..N")
    p.add_argument("--outdir", default=None)

    p = sub.add_parser("sweep", help="sweep one constant of the FRS model")
    p.add_argument("--param", required=True)
    p.add_argument("--values", type=_values, required=True)
    p.add_argument("--seeds", type=_count, default=len(experiments.DEFAULT_SEEDS))
    p.add_argument("--outdir", default=None)

    sub.add_parser("presets", help="list scenario presets")
    return ap


def cmd_parse(args, out, err) -> int:
    result = _parse_file(args.file, out, err)
    if not result.ok:
        print(f"{len(result.errors)} error(s)", file=err)
        return 1
    model = result.model
    if args.json:
        out.write(dumps_json(model))
        if not dumps_json(model).endswith("\n"):
            out.write("\n")
    else:
        counts = model.counts()
        print(f"{len(model)} definitions: " + ", ".join(f"{counts[k]} {k}" for k in sorted(counts)), file=out)
    return 0


def cmd_check_units(args, out, err) -> int:
    result = _parse_file(args.file, out, err)
    if not result.ok:
        return 1
    mismatches = check_model(result.model)
    if args.json:
        print(json.dumps([m.as_dict() for m in mismatches], indent=2), file=out)
    else:
        for m in mismatches:
            print(m.render(), file=out)
        print(f"{len(mismatches)} mismatches", file=out)
    return 1 if mismatches else 0


def cmd_run(args, out, err) -> int:
    if args.builtin:
        spec = build_frs_model()
    else:
        result = _parse_file(args.file, out, err)
        if not result.ok:
            return 1
        spec = result.model
    if args.final_time is not None or args.dt is not None:
        spec = with_control(spec, final_time=args.final_time, dt=args.dt)
    model = compile_model(spec)
    policy = RngPolicy(global_seed=args.seed, mode="stochastic" if args.noise == "on" else "noise-off")
    overrides = dict(args.overrides)
    res = simulate(model, policy, overrides)
    if args.out:
        write_csv(res, args.out)
        log.info("wrote %s (%d rows)", args.out, len(res.times))
    if args.svg:
        stocks = {name: res[name] for name in model.stocks}
        render_chart(stocks, args.svg, times=res.times, title="Stocks (each scaled to its maximum magnitude)",
                     normalize=True)
        log.info("wrote %s", args.svg)
    if not args.out:
        print(f"t = {format_number(float(res.times[-1]))} (seed {res.metadata['seed']}, noise {args.noise})",
              file=out)
        for name in model.stocks:
            print(f"  {name} = {res.final(name)!r}", file=out)
    return 0


def _report(report, outdir: str, out) -> int:
    path = experiments.write_report(report, outdir)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}", file=out)
    for c in report.claims:
        tag = "supported" if c.supported else "discrepancy"
        print(f"CLAIM {c.claim}: {c.count}/{c.total} ({tag})", file=out)
    print(f"report written to {path}", file=out)
    return 0 if all(c.passed for c in report.checks) else 1


def cmd_experiment(args, out, err) -> int:
    seeds = list(range(1, args.seeds + 1))
    report = experiments.RUNNERS[args.name](seeds)
    return _report(report, args.outdir or f"sdsim-out/{args.name}", out)


def cmd_sweep(args, out, err) -> int:
    seeds = list(range(1, args.seeds + 1))
    report = experiments.sweep(args.param, args.values, seeds)
    outdir = args.outdir or "sdsim-out/sweep-" + experiments.safe_label(args.param)
    return _report(report, outdir, out)


def cmd_presets(args, out, err) -> int:
    for p in PRESETS.values():
        ov = ", ".join(f"{k}={format_number(v)}" for k, v in p.overrides.items()) or "(defaults)"
        print(f"{p.name:<22} {ov}", file=out)
        print(f"{'':<22} {p.description}", file=out)
    return 0


COMMANDS = {
    "parse": cmd_parse,
    "check-units": cmd_check_units,
    "run": cmd_run,
    "experiment": cmd_experiment,
    "sweep": cmd_sweep,
    "presets": cmd_presets,
}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=err)
    try:
        return COMMANDS[args.command](args, out, err)
    except (SDSimError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {type(exc).__name__}: {msg}", file=err)
        return 1


if __name__ == "__main__":
    sys.exit(main())
