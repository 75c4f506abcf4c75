"""Command-line front end.

    lossy-fbl bound  --source gms --sigma2 1 --d 0.25 --eps 1e-2 --n 1000 --bound volume-converse
    lossy-fbl sweep  --source bes --delta 0.1 --d 0.1 --eps 0.1 --n 100:1000:100 --bounds all
    lossy-fbl figure fig6 --svg --out figs/
    lossy-fbl plan   --source gms --sigma2 1 --R 1 --eta 0.1 --eps 1e-2
    lossy-fbl verify

Exit codes: 0 ok, 1 verification failure, 2 usage or domain error,
3 resource budget exceeded, 4 numerical nonconvergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

from .errors import DomainError, LossyFBLError
from .families import bound_families, distortion_bound, get_bound
from .figures import (CSV_FLOAT, FIGURES, RateFigure, compute_figure, compute_rate_rows,
                      figure_csv, ordering_violations, rate_rows_csv, write_svg)
from .numerics import LN2
from .sources import BES, BMS, DMS, GMS, REMAINDER_MODES, required_blocklength

log = logging.getLogger("lossy_fbl")

SOURCE_PARAMS = {"bms": ("p",), "dms": ("pmf",), "bes": ("delta",), "gms": ("sigma2",)}


def _fmt(x):
    if isinstance(x, float):
        return "" if math.isnan(x) else CSV_FLOAT % x
    return str(x)


def build_source(args):
    need = SOURCE_PARAMS[args.source]
    missing = [k for k in need if getattr(args, k) is None]
    if missing:
        raise DomainError(f"--source {args.source} needs --{missing[0]}")
    if args.source == "bms":
        return BMS(args.p)
    if args.source == "dms":
        try:
            pmf = tuple(float(Fraction(x.strip())) for x in str(args.pmf).split(","))
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"--pmf must be comma-separated numbers or fractions, got {args.pmf!r}")
        return DMS(pmf)
    if args.source == "bes":
        return BES(args.delta)
    return GMS(args.sigma2)


def source_params(src) -> str:
    if isinstance(src, BMS):
        return f"p={src.p:g}"
    if isinstance(src, DMS):
        return "pmf=" + "/".join(f"{x:.6g}" for x in src.pmf)
    if isinstance(src, BES):
        return f"delta={src.delta:g}"
    return f"sigma2={src.sigma2:g}"


def parse_n_range(text: str) -> list[int]:
    """'lo:hi:step' (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            parts = [int(x) for x in text.split(":")]
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step <= 0 or lo < 1 or hi < lo:
                raise ValueError
            return list(range(lo, hi + 1, step))
        return sorted({int(x) for x in text.split(",")})
    except ValueError:
        raise DomainError(f"bad blocklength range {text!r}; use lo:hi:step or a,b,c")


def _emit(text: str, args, default_name: str | None = None):
    if args.out:
        path = Path(args.out)
        if path.is_dir() and default_name:
            path = path / default_name
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _writer():
    buf = io.StringIO()
    return buf, csv.writer(buf, lineterminator="\n")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_bound(args) -> int:
    src = build_source(args)
    if (args.d is None) == (args.R is None):
        raise DomainError("give exactly one of --d (rate bound) or --R (distortion bound)")
    fams = bound_families(src, args.remainder)
    names = sorted(fams) if args.bound == "all" else [args.bound]
    for name in names:
        if name not in fams:
            get_bound(src, name)
    unit = "nats" if args.nats else "bits"
    buf, w = _writer()
    if args.d is not None:
        w.writerow(["source", "params", "n", "d", "eps", "bound", "kind", f"rate_{unit}",
                    "log_M_nats", "diagnostics"])
        for name in names:
            bv = fams[name].rate(args.n, args.d, args.eps, integer=args.integer)
            rate = bv.rate_nats if args.nats else bv.rate_bits
            w.writerow([args.source, source_params(src), args.n, _fmt(args.d), _fmt(args.eps),
                        name, bv.kind, _fmt(rate), _fmt(bv.log_M_nats),
                        json.dumps(bv.diagnostics, sort_keys=True, default=float)])
    else:
        rate_nats = args.R if args.nats else args.R * LN2
        w.writerow(["source", "params", "n", f"R_{unit}", "eps", "bound", "kind", "d", "vacuous"])
        for name in names:
            db = distortion_bound(src, fams[name], args.n, rate_nats, args.eps)
            w.writerow([args.source, source_params(src), args.n, _fmt(args.R), _fmt(args.eps),
                        name, db.kind, _fmt(db.d), int(db.vacuous)])
    text = buf.getvalue()
    if args.format == "text":
        rows = list(csv.reader(io.StringIO(text)))
        width = max(len(h) for h in rows[0])
        text = "\n\n".join("\n".join(f"{h:<{width}}  {v}" for h, v in zip(rows[0], r))
                           for r in rows[1:]) + "\n"
    _emit(text, args)
    return 0


def cmd_sweep(args) -> int:
    src = build_source(args)
    fams = bound_families(src, args.remainder)
    if args.bounds == "all":
        names = sorted(fams)
    else:
        names = [b.strip() for b in args.bounds.split(",")]
        for name in names:
            get_bound(src, name)
    rows = compute_rate_rows(src, names, parse_n_range(args.n), args.d, args.eps,
                             args.remainder, threads=args.threads)
    for r in rows:
        if r.kind == "error":
            log.warning("n=%d %s: %s", r.n, r.bound, r.message)
    _emit(rate_rows_csv(rows, args.nats), args)
    return 0


def cmd_figure(args) -> int:
    fig = FIGURES[args.name]
    rows = compute_figure(fig, threads=args.threads)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{fig.name}.csv").write_text(figure_csv(fig, rows, args.nats), encoding="utf-8")
    if args.svg:
        write_svg(fig, rows, out / f"{fig.name}.svg", args.nats)
    if isinstance(fig, RateFigure):
        for v in ordering_violations(fig, rows):
            log.warning("ordering violated at n=%d: %s (%.6g) above %s (%.6g)", v[0], v[1], v[3], v[2], v[4])
    return 0


def cmd_plan(args) -> int:
    src = build_source(args)
    if (args.d is None) == (args.R is None):
        raise DomainError("give exactly one of --d (rate mode) or --R (distortion mode)")
    if args.d is not None:
        plan = required_blocklength(src, "rate", args.d, args.eta, args.eps)
        mode, value = "rate", args.d
    else:
        R = args.R if args.nats else args.R * LN2
        plan = required_blocklength(src, "distortion", R, args.eta, args.eps)
        mode, value = "distortion", args.R
    buf, w = _writer()
    w.writerow(["source", "params", "mode", "value", "eta", "eps", "source_factor",
                "spec_factor", "n", "zero_dispersion"])
    w.writerow([args.source, source_params(src), mode, _fmt(value), _fmt(args.eta), _fmt(args.eps),
                _fmt(plan.source_factor), _fmt(plan.spec_factor), _fmt(plan.n),
                int(plan.zero_dispersion)])
    _emit(buf.getvalue(), args)
    return 0


def cmd_verify(args) -> int:
    from . import verify
    from .oracle import MC_MIN_TRIALS
    if args.trials < MC_MIN_TRIALS:
        raise DomainError(f"--trials must be at least {MC_MIN_TRIALS}")
    ok = verify.run_all(trials=args.trials, seed=args.seed, threads=args.threads,
                        stream=sys.stdout)
    return 0 if ok else 1


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_source_args(p):
    p.add_argument("--source", choices=sorted(SOURCE_PARAMS), required=True)
    p.add_argument("--p", type=float, help="BMS: P[X=1] <= 1/2")
    p.add_argument("--pmf", help="DMS: comma-separated pmf, nonincreasing")
    p.add_argument("--delta", type=float, help="BES: erasure rate")
    p.add_argument("--sigma2", type=float, help="GMS: source variance")
    p.add_argument("--eps", type=float, required=True, help="excess-distortion probability")


def _add_global(p, top: bool):
    # globals are accepted before or after the subcommand
    sup = None if top else argparse.SUPPRESS
    p.add_argument("--out", default=sup, help="output file (bound/sweep/plan) or directory (figure)")
    p.add_argument("--svg", action="store_true", default=sup, help="also write an SVG plot")
    p.add_argument("--nats", action="store_true", default=sup, help="report rates in nats")
    p.add_argument("--seed", type=int, default=0 if top else sup, help="RNG seed (verify)")
    p.add_argument("--threads", type=int, default=1 if top else sup, help="worker threads")
    p.add_argument("--config", default=sup, help="flat 'key = value' file of defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lossy-fbl", description=__doc__.split("\n\n")[0])
    _add_global(parser, top=True)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="one bound (or all) at a single point")
    _add_source_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=float)
    p.add_argument("--R", type=float, help="rate per symbol (bits, or nats with --nats)")
    p.add_argument("--bound", default="all")
    p.add_argument("--remainder", choices=REMAINDER_MODES + ("auto", "dms_envelope"))
    p.add_argument("--integer", action="store_true", help="round M to an integer")
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sweep", help="bounds over a blocklength range")
    _add_source_args(p)
    p.add_argument("--n", required=True, help="lo:hi:step or a,b,c")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--bounds", default="all")
    p.add_argument("--remainder", choices=REMAINDER_MODES + ("auto", "dms_envelope"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="reproduce a figure's data")
    p.add_argument("name", choices=sorted(FIGURES))
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("plan", help="blocklength needed to reach (1 + eta) x the limit")
    _add_source_args(p)
    p.add_argument("--d", type=float)
    p.add_argument("--R", type=float, help="rate (bits, or nats with --nats)")
    p.add_argument("--eta", type=float, required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify", help="run the oracle checks")
    p.add_argument("--trials", type=int, default=10**5)
    p.set_defaults(func=cmd_verify)

    for sp in sub.choices.values():
        _add_global(sp, top=False)
    return parser


def read_config(path: str) -> dict:
    cfg = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("-", "_")] = value
    return cfg


GLOBAL_KEYS = {"out", "svg", "nats", "seed", "threads", "config", "verbose"}


def _apply_config(parser, cfg: dict):
    unknown = set(cfg) - {a.dest for a in parser._actions}
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for p in [parser, *sub.choices.values()]:
        known = {a.dest: a for a in p._actions}
        unknown -= set(known)
        vals = {}
        for k, v in cfg.items():
            # globals live on the top-level parser so command-line flags win
            if k in known and (p is parser or k not in GLOBAL_KEYS):
                act = known[k]
                if isinstance(act, argparse._StoreTrueAction):
                    v = v.lower() in ("1", "true", "yes", "on")
                elif act.type is not None:
                    v = act.type(v)
                act.required = False  # the file supplies it
                vals[k] = v
        p.set_defaults(**vals)
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, read_config(known.config))
    except (OSError, ValueError, LossyFBLError) as err:
        print(f"lossy-fbl: error: {err}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose,
                        format="lossy-fbl: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except LossyFBLError as err:
        print(f"lossy-fbl: error: {err}", file=sys.stderr)
        return err.exit_code
    except ValueError as err:
        print(f"lossy-fbl: error: {err}", file=sys.stderr)
        return 2
