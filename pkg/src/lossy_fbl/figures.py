"""Pinned parameters for the reproducible figures, and their data.

Rate figures (fig1-3, fig6, fig8, fig9) tabulate each bound against the
blocklength.  Curve figures (fig4, fig5) tabulate R(d) or V(d) and the
blocklength needed to operate at 1.1 R(d).
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LossyFBLError
from .families import bound_families
from .numerics import LN2
from .sources import BES, BMS, DMS, GMS, rate_distortion, required_blocklength, dispersion

CSV_FLOAT = "%.12g"


@dataclass(frozen=True)
class RateFigure:
    name: str
    source: object
    d: float
    eps: float
    bounds: tuple
    n_grid: tuple
    remainder: str | None = None
    # (lower, upper): rate of `lower` must not exceed rate of `upper`
    orderings: tuple = ()
    # this bound must be the largest rate at every n where it is defined
    loosest: str | None = None


@dataclass(frozen=True)
class CurveFigure:
    name: str
    source: object
    quantity: str                      # "rate" or "dispersion"
    d_grid: tuple
    eta: float = 0.1
    eps_values: tuple = (1e-1, 1e-2, 1e-4)


BINARY_N = (10, 20, 50, 100, 200, 300, 500, 700, 1000)
GMS_N = (10, 20, 50, 100, 200, 500, 1000, 2000)
_BMS_BOUNDS = ("tilted-converse", "ht-converse", "ach", "shannon-ach", "approx")
_BMS_ORDER = (("tilted-converse", "ach"), ("ht-converse", "ach"), ("ach", "shannon-ach"))
_GMS_BOUNDS = ("tilted-converse", "volume-converse", "cap-ach", "covering-ach", "approx")
_GMS_ORDER = (("tilted-converse", "volume-converse"), ("volume-converse", "cap-ach"),
              ("volume-converse", "covering-ach"))

FIGURES: dict = {
    "fig1": RateFigure("fig1", BMS(0.5), 0.11, 1e-2,
                       ("ebms-converse", "ebms-ach", "shannon-ach", "approx"), BINARY_N,
                       orderings=(("ebms-converse", "ebms-ach"), ("ebms-ach", "shannon-ach")),
                       loosest="shannon-ach"),
    "fig2": RateFigure("fig2", BMS(0.4), 0.11, 1e-2, _BMS_BOUNDS, BINARY_N,
                       orderings=_BMS_ORDER, loosest="shannon-ach"),
    "fig3": RateFigure("fig3", BMS(0.4), 0.11, 1e-4, _BMS_BOUNDS, BINARY_N,
                       orderings=_BMS_ORDER, loosest="shannon-ach"),
    "fig4": CurveFigure("fig4", DMS((1 / 3, 1 / 4, 1 / 4, 1 / 6)), "rate",
                        tuple(np.round(np.linspace(0.01, 0.66, 66), 4).tolist())),
    "fig5": CurveFigure("fig5", BES(0.1), "dispersion",
                        tuple(np.round(np.linspace(0.06, 0.49, 44), 4).tolist())),
    "fig6": RateFigure("fig6", BES(0.1), 0.1, 0.1, ("converse", "ach", "approx"), BINARY_N,
                       remainder="half_log_n", orderings=(("converse", "ach"),)),
    "fig8": RateFigure("fig8", GMS(1.0), 0.25, 1e-2, _GMS_BOUNDS, GMS_N,
                       remainder="half_log_n", orderings=_GMS_ORDER),
    "fig9": RateFigure("fig9", GMS(1.0), 0.25, 1e-4, _GMS_BOUNDS, GMS_N,
                       remainder="half_log_n", orderings=_GMS_ORDER),
}


@dataclass
class RateRow:
    n: int
    bound: str
    kind: str
    rate_bits: float
    message: str = field(default="", compare=False)


def compute_rate_point(source, name, n, d, eps, remainder=None) -> RateRow:
    spec = bound_families(source, remainder)[name]
    try:
        bv = spec.rate(n, d, eps)
        return RateRow(n, name, bv.kind, bv.rate_bits)
    except LossyFBLError as err:
        return RateRow(n, name, "error", math.nan, str(err))


def compute_rate_rows(source, names, n_values, d, eps, remainder=None, threads: int = 1):
    """All (n, bound) rows, sorted by (n, bound); failures become error rows."""
    jobs = sorted((n, b) for n in n_values for b in names)
    run = lambda job: compute_rate_point(source, job[1], job[0], d, eps, remainder)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(run, jobs))
    return [run(j) for j in jobs]


def compute_figure(fig, threads: int = 1):
    if isinstance(fig, RateFigure):
        return compute_rate_rows(fig.source, fig.bounds, fig.n_grid, fig.d, fig.eps,
                                 fig.remainder, threads)
    return curve_rows(fig)


def curve_rows(fig: CurveFigure):
    rows = []
    for d in fig.d_grid:
        row = {"d": d, "rate_bits": rate_distortion(fig.source, d) / LN2,
               "dispersion_bits2": dispersion(fig.source, d) / LN2 ** 2}
        for eps in fig.eps_values:
            row[f"blocklength_eps{eps:g}"] = required_blocklength(
                fig.source, "rate", d, fig.eta, eps).n
        rows.append(row)
    return rows


def ordering_violations(fig: RateFigure, rows, slack: float = 1e-9):
    """Orderings from the fixture that fail on computed rows."""
    table = {(r.n, r.bound): r.rate_bits for r in rows if r.kind != "error"}
    bad = []
    for n in fig.n_grid:
        for lo, hi in fig.orderings:
            if (n, lo) in table and (n, hi) in table and table[(n, lo)] > table[(n, hi)] + slack:
                bad.append((n, lo, hi, table[(n, lo)], table[(n, hi)]))
        if fig.loosest and (n, fig.loosest) in table:
            top = table[(n, fig.loosest)]
            for b in fig.bounds:
                if b != fig.loosest and (n, b) in table and table[(n, b)] > top + slack:
                    bad.append((n, b, fig.loosest, table[(n, b)], top))
    return bad


def _fmt(x):
    if isinstance(x, float):
        return "" if math.isnan(x) else CSV_FLOAT % x
    return str(x)


def rate_rows_csv(rows, nats: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "bound", "kind", "rate_nats" if nats else "rate_bits"])
    for r in rows:
        val = r.rate_bits * LN2 if nats else r.rate_bits
        w.writerow([r.n, r.bound, r.kind, _fmt(val)])
    return buf.getvalue()


def curve_rows_csv(rows, nats: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = list(rows[0])
    header = keys
    if nats:
        header = [k.replace("rate_bits", "rate_nats").replace("dispersion_bits2", "dispersion_nats2")
                  for k in keys]
    w.writerow(header)
    for row in rows:
        vals = []
        for k in keys:
            v = row[k]
            if nats and k == "rate_bits":
                v = v * LN2
            elif nats and k == "dispersion_bits2":
                v = v * LN2 ** 2
            vals.append(_fmt(float(v)))
        w.writerow(vals)
    return buf.getvalue()


def figure_csv(fig, rows, nats: bool = False) -> str:
    return rate_rows_csv(rows, nats) if isinstance(fig, RateFigure) else curve_rows_csv(rows, nats)


def write_svg(fig, rows, path: Path, nats: bool = False):
    import matplotlib
    matplotlib.use("svg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "lossy-fbl"
    plt.rcParams["svg.fonttype"] = "path"
    unit = "nats" if nats else "bits"
    scale = LN2 if nats else 1.0
    if isinstance(fig, RateFigure):
        f, ax = plt.subplots(figsize=(6, 4))
        for b in fig.bounds:
            pts = [(r.n, r.rate_bits * scale) for r in rows if r.bound == b and r.kind != "error"]
            if pts:
                ax.plot(*zip(*pts), marker=".", label=b)
        lim = rate_distortion(fig.source, fig.d) / LN2 * scale
        ax.axhline(lim, color="k", lw=0.8, ls=":", label="R(d)")
        ax.set_xscale("log")
        ax.set_xlabel("n")
        ax.set_ylabel(f"rate ({unit}/symbol)")
        ax.legend(fontsize=7)
    else:
        f, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
        ds = [r["d"] for r in rows]
        if fig.quantity == "rate":
            ax1.plot(ds, [r["rate_bits"] * scale for r in rows])
            ax1.set_ylabel(f"R(d) ({unit})")
        else:
            ax1.plot(ds, [r["dispersion_bits2"] * scale ** 2 for r in rows])
            ax1.set_ylabel(f"V(d) ({unit}^2)")
        for eps in fig.eps_values:
            ax2.plot(ds, [r[f"blocklength_eps{eps:g}"] for r in rows], label=f"eps={eps:g}")
        ax2.set_yscale("log")
        ax2.set_xlabel("d")
        ax2.set_ylabel("required n")
        ax2.legend(fontsize=7)
    ax = f.axes[0]
    ax.set_title(fig.name)
    f.tight_layout()
    f.savefig(path, format="svg", metadata={"Date": None})
    plt.close(f)
