"""Recompute the standard grid and write tests/fixtures/standard_grid.json.

The grid is every rate figure restricted to n >= 200.  Each point stores the
rate of every bound so the regression tests can compare against it.

    python scripts/freeze_standard_grid.py [--threads 4]
"""

import argparse
import json
import math
from pathlib import Path

from lossy_fbl.figures import FIGURES, RateFigure, compute_rate_rows

MIN_N = 200
OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "standard_grid.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()

    entries = []
    for name, fig in FIGURES.items():
        if not isinstance(fig, RateFigure):
            continue
        n_values = [n for n in fig.n_grid if n >= MIN_N]
        rows = compute_rate_rows(fig.source, fig.bounds, n_values, fig.d, fig.eps,
                                 fig.remainder, threads=args.threads)
        rates = {}
        for r in rows:
            rates.setdefault(str(r.n), {})[r.bound] = None if math.isnan(r.rate_bits) else r.rate_bits
        kinds = {r.bound: r.kind for r in rows if r.kind != "error"}
        entries.append({
            "figure": name,
            "d": fig.d,
            "eps": fig.eps,
            "remainder": fig.remainder,
            "n": n_values,
            "converse": sorted(b for b, k in kinds.items() if k == "converse"),
            "achievability": sorted(b for b, k in kinds.items() if k == "achievability"),
            "rates_bits": rates,
        })
        print(f"{name}: {len(rows)} points")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps({"min_n": MIN_N, "figures": entries}, indent=1) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
