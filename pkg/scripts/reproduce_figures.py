"""Write CSV data (and optionally SVG plots) for every figure fixture.

    python scripts/reproduce_figures.py --out figures/ [--svg] [--threads 4] [--only fig1 fig6]
"""

import argparse
from pathlib import Path

from lossy_fbl.figures import FIGURES, RateFigure, compute_figure, figure_csv, ordering_violations, write_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--svg", action="store_true")
    ap.add_argument("--nats", action="store_true")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--only", nargs="+", choices=sorted(FIGURES), default=sorted(FIGURES))
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    bad = 0
    for name in args.only:
        fig = FIGURES[name]
        rows = compute_figure(fig, threads=args.threads)
        (args.out / f"{name}.csv").write_text(figure_csv(fig, rows, args.nats))
        if args.svg:
            write_svg(fig, rows, args.out / f"{name}.svg", args.nats)
        note = ""
        if isinstance(fig, RateFigure):
            violations = ordering_violations(fig, rows)
            bad += len(violations)
            errors = sum(r.kind == "error" for r in rows)
            note = f", {errors} error rows, {len(violations)} ordering violations"
        print(f"{name}: {len(rows)} rows{note}")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
