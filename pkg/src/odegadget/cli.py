"""Command-line entry point.

Exit codes: 0 success, 1 a check failed, 2 usage or input error.  Data goes
to stdout, diagnostics to stderr.  Every option can also be set through an
``ODEGADGET_<NAME>`` environment variable; flags win over the environment,
which wins over the built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from contextlib import contextmanager
from typing import Dict, List, Optional, Sequence

from . import __version__
from .bump import BUMP, DEFAULT_MAX_ORDER, CertificationError
from .diffeq import (BitLayout, CellOverflowError, build_gadget, dump_grid, dump_table,
                     normalize, solve)
from .exactreal import ContractViolation, Dyadic, PrecisionError
from .formula import (CapacityError, DEFAULT_ENUMERATION_CAP, FormulaSyntaxError,
                      InstanceError, parse_instance, truth_value)

ENV_PREFIX = "ODEGADGET_"

# name -> (default, type); shared by every subcommand that takes the option
OPTIONS = {
    "precision": (64, int),
    "k": (1, int),
    "mode": ("faithful", str),
    "seed": (None, int),
    "points": (64, int),
    "bits": (8, int),
    "out": ("-", str),
    "corpus": (None, str),
    "checks": ("all", str),
    "max_order": (DEFAULT_MAX_ORDER, int),
    "enum_cap": (DEFAULT_ENUMERATION_CAP, int),
    "width_cap": (1 << 20, int),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _env_default(name: str):
    default, kind = OPTIONS[name]
    kind = kind or str
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return default, "default"
    try:
        return kind(raw), "env"
    except ValueError:
        raise UsageError(f"{ENV_PREFIX}{name.upper()}={raw!r} is not a valid {kind.__name__}")


def _add(p: argparse.ArgumentParser, *names: str) -> None:
    helps = {
        "precision": "bits of precision (relative to the local digit scale for gadget values)",
        "k": "smoothness order of the gadget (1-3 are tested)",
        "mode": "faithful or toy parameters",
        "seed": "offset for the low-discrepancy sample points",
        "points": "number of sample points",
        "bits": "horizon in bits",
        "out": "output path, '-' for stdout",
        "corpus": "directory of .cqbf instances (optional corpus.json)",
        "checks": "comma-separated checks or 'all'",
        "max_order": "derivative order cap",
        "enum_cap": "enumeration cap on variables",
        "width_cap": "cap on the width of the gadget equation",
    }
    for name in names:
        flag = "--" + name.replace("_", "-")
        kind = OPTIONS[name][1]
        extra = {"choices": ["faithful", "toy"]} if name == "mode" else {}
        p.add_argument(flag, dest=name, type=kind, default=None, help=helps[name], **extra)


def _config(args: argparse.Namespace) -> Dict[str, object]:
    cfg, src = {}, {}
    for name in OPTIONS:
        if not hasattr(args, name):
            continue
        val = getattr(args, name)
        if val is not None:
            cfg[name], src[name] = val, "flag"
        else:
            cfg[name], src[name] = _env_default(name)
    for name in ("precision", "points", "bits", "max_order", "enum_cap", "width_cap"):
        if name in cfg and cfg[name] is not None and cfg[name] < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    if cfg.get("mode") not in (None, "faithful", "toy"):
        raise UsageError(f"mode must be faithful or toy, not {cfg['mode']!r}")
    if getattr(args, "verbose", False):
        print(f"# odegadget {__version__} {args.command}", file=sys.stderr)
        for name in sorted(cfg):
            print(f"#   {name} = {cfg[name]!r} ({src[name]})", file=sys.stderr)
    return cfg


@contextmanager
def _output(path: str):
    if path in ("-", None):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _read_instance(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    return parse_instance(text)


# ---------------------------------------------------------------- commands


def cmd_eval(args, cfg) -> int:
    inst = _read_instance(args.instance)
    print(truth_value(inst, cap=cfg["enum_cap"]))
    return 0


def cmd_solve(args, cfg) -> int:
    inst = _read_instance(args.instance)
    eq = build_gadget(inst, BitLayout(args.layout), width_cap=cfg["width_cap"],
                      cap=cfg["enum_cap"])
    if args.normalized:
        eq = normalize(eq).equation
    sol = solve(eq)
    with _output(cfg["out"]) as out:
        if args.table:
            dump_table(eq, sol, out)
        else:
            dump_grid(sol, out)
    print(f"output H({eq.height}, {eq.width}) = {sol(eq.height, eq.width)}", file=sys.stderr)
    return 0


FLOAT_HELP = "append *_float columns (plotting only, may underflow to 0)"


def _header(names: List[str], floats: bool) -> List[str]:
    return names + ([f"{c}_float" for c in names] if floats else [])


def _cells(values: List[Dyadic], floats: bool) -> List[str]:
    # exact dyadic text first; floats are a convenience for plotting
    return [str(v) for v in values] + ([repr(float(v)) for v in values] if floats else [])


def _sample_ts(points: int, q: int) -> List[Dyadic]:
    bits = q + 8
    return [Dyadic(k * (1 << bits) // points, -bits) for k in range(points + 1)]


def cmd_gadget(args, cfg) -> int:
    from .gadget import Gadget

    inst = _read_instance(args.instance)
    gad = Gadget.from_instance(inst, cfg["k"], mode=cfg["mode"])
    derivs = []
    for spec in args.derivs or []:
        try:
            i, j = (int(x) for x in spec.split(","))
        except ValueError:
            raise UsageError(f"--deriv expects 'i,j', got {spec!r}")
        if j > cfg["k"] or i + 1 > cfg["max_order"]:
            raise UsageError(f"derivative ({i},{j}) outside the caps")
        derivs.append((i, j))
    p = gad.params
    with _output(cfg["out"]) as out:
        w = csv.writer(out, lineterminator="\n")
        head = ["t", "h", "g"] + [f"D{i}{j}g" for i, j in derivs]
        w.writerow(_header(head, args.float))
        for t in _sample_ts(cfg["points"], p.q):
            T, _ = gad.split_t(t)
            n = cfg["precision"] + gad.cell_scale_exp(min(T, gad.width - 1))
            h = gad.h_u(t, n + 8)
            row = [t, h, gad.g_u(t, h, n)]
            row += [gad.deriv(i, j, t, h, n + j * p.log2B) for i, j in derivs]
            w.writerow(_cells(row, args.float))
    print(f"k={p.k} p={p.p} q={p.q} r={p.r} log2B={p.log2B} d={list(p.d)} rho={p.rho}",
          file=sys.stderr)
    return 0


def cmd_verify(args, cfg) -> int:
    from .verify import CHECKS, Corpus, Fault, run_suite

    if not cfg["corpus"]:
        raise UsageError("verify needs --corpus DIR")
    try:
        corpus = Corpus.load(cfg["corpus"], seed=cfg["seed"])
    except FileNotFoundError as exc:
        raise UsageError(str(exc))
    checks = list(CHECKS) if cfg["checks"] == "all" else [c.strip() for c in cfg["checks"].split(",")]
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise UsageError(f"unknown checks: {', '.join(bad)} (choose from {', '.join(CHECKS)})")
    fault = Fault(args.fault) if args.fault else None
    report = run_suite(corpus, checks, fault=fault, mode=cfg["mode"], samples=cfg["points"])
    with _output(cfg["out"]) as out:
        report.write(out)
    for check, (passed, total) in sorted(report.summary().items()):
        print(f"{check:10s} {passed}/{total}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_reduce(args, cfg) -> int:
    from .gadget import GlueLayout, glued_h_oracle, reduce_instance
    from .verify import Corpus

    inst = _read_instance(args.instance)
    others = []
    if cfg["corpus"]:
        others = [e.instance for e in Corpus.load(cfg["corpus"]).entries]
    keys = {o.serialize() for o in others}
    pool = others + ([inst] if inst.serialize() not in keys else [])
    layout = GlueLayout.build(pool, k=cfg["k"], mode=cfg["mode"])
    print(reduce_instance(inst, glued_h_oracle(layout), layout))
    return 0


def cmd_final_value(args, cfg) -> int:
    from .gadget import FinalValueParams, decode_tally, final_value_name
    from .verify import TALLY_LANGUAGES

    horizon = cfg["bits"]
    if args.tally is not None:
        if any(c not in "01" for c in args.tally):
            raise UsageError("--tally expects a string of 0s and 1s")
        if len(args.tally) > horizon:
            raise UsageError(f"--tally has {len(args.tally)} bits, horizon is {horizon}")
        pattern = args.tally.ljust(horizon, "0")
        lang = lambda n: pattern[n] == "1"
    else:
        lang = TALLY_LANGUAGES[args.language]
    params = FinalValueParams.build(cfg["k"], horizon=horizon)
    name = final_value_name(lang, params)
    bits = "".join(str(decode_tally(name, n, params)) for n in range(horizon))
    print(bits)
    print("exponents " + " ".join(map(str, params.exponents())), file=sys.stderr)
    return 0


def cmd_bump(args, cfg) -> int:
    if args.action == "certify":
        for m in range(1, args.orders + 1):
            print(f"{m},{BUMP.certify_bound(m)}")
        return 0
    orders = args.orders
    if orders > cfg["max_order"]:
        raise UsageError(f"--orders {orders} above the cap {cfg['max_order']}")
    points = cfg["points"]
    n = cfg["precision"]
    with _output(cfg["out"]) as out:
        w = csv.writer(out, lineterminator="\n")
        head = ["t", "f"] + [f"D{m}f" for m in range(1, orders + 1)]
        w.writerow(_header(head, args.float))
        bits = max(points.bit_length() + 4, 8)
        for k in range(points + 1):
            t = Dyadic(k * (1 << bits) // points, -bits)
            vals = [BUMP.df_eval(m, t, n) for m in range(orders + 1)]
            w.writerow(_cells([t] + vals, args.float))
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="odegadget", description="Difference-equation and ODE gadgets "
                 "for counting-quantified Boolean formulas.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    def command(name, help_, *opts):
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("-v", "--verbose", action="store_true", help="print the configuration to stderr")
        _add(p, *opts)
        return p

    p = command("eval", "print the truth value of an instance", "enum_cap")
    p.add_argument("instance")

    p = command("solve", "solve the gadget difference equation and write CSV",
                "out", "enum_cap", "width_cap")
    p.add_argument("instance")
    p.add_argument("--normalized", action="store_true", help="solve the normalized equation")
    p.add_argument("--table", action="store_true", help="write nonzero steps instead of the grid")
    p.add_argument("--layout", choices=[b.value for b in BitLayout], default="pinned")

    p = command("gadget", "evaluate the smooth gadget", "k", "points", "precision", "mode",
                "out", "max_order")
    p.add_argument("action", choices=["sample"])
    p.add_argument("--instance", required=True)
    p.add_argument("--deriv", dest="derivs", action="append", metavar="I,J",
                   help="add a D^(I,J) g_u column (repeatable)")
    p.add_argument("--float", action="store_true", help=FLOAT_HELP)

    p = command("verify", "run the invariant checks over a corpus", "corpus", "checks", "seed",
                "mode", "points", "out")
    from .verify import FAULTS
    p.add_argument("--fault", choices=sorted(FAULTS), help="inject a single-point fault")

    p = command("reduce", "recover an instance's truth value from the glued h", "corpus", "k", "mode")
    p.add_argument("instance")

    p = command("final-value", "encode a tally set into one real and decode it", "bits", "k")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--language", choices=["empty", "first", "even", "primes"], default="even")
    g.add_argument("--tally", help="explicit membership bits, e.g. 10110")

    p = command("bump", "tabulate or certify the bump function", "points", "precision", "out",
                "max_order")
    p.add_argument("action", choices=["table", "certify"])
    p.add_argument("--orders", type=int, default=4)
    p.add_argument("--float", action="store_true", help=FLOAT_HELP)
    return ap


HANDLERS = {
    "eval": cmd_eval, "solve": cmd_solve, "gadget": cmd_gadget, "verify": cmd_verify,
    "reduce": cmd_reduce, "final-value": cmd_final_value, "bump": cmd_bump,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help(sys.stderr)
            return 2
        cfg = _config(args)
        return HANDLERS[args.command](args, cfg)
    except UsageError as exc:
        print(f"odegadget: error: {exc}", file=sys.stderr)
        return 2
    except (FormulaSyntaxError, InstanceError, CapacityError) as exc:
        print(f"odegadget: error: {exc}", file=sys.stderr)
        return 2
    except (CellOverflowError, PrecisionError, ContractViolation, CertificationError) as exc:
        print(f"odegadget: check failed: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0


def main() -> None:
    sys.exit(run())
