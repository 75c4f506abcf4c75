"""Bounds for the binary erased source (equiprobable bits through an
erasure channel, bit error rate against the original bits).

With k erasures, j of which the encoder reproduces as 1 where the original
bit was 0 (or vice versa), the relevant ball mass is
2^{-(n-k)} <n-k | floor(nd) - j>.  Both bounds average over (k, j) with
weights Bin(n, delta)(k) C(k, j) 2^{-k}.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .bounds_binary import floor_nd
from .bounds_core import rc_exact
from .errors import DomainError
from .numerics import LN2, binom_logpmf_array, log_binomial_array, log_hamming_ball_array
from .sources import BES, dispersion, gaussian_approx_nats, rate_distortion


def _check(delta, d):
    BES(delta)
    lo, hi = delta / 2, 1 - delta / 2
    if not (lo < float(d) < hi):
        raise DomainError(f"BES bounds need {lo} < d < {hi}, got {d}")


@lru_cache(maxsize=64)
def bes_tables(delta: float, n: int, d):
    """Flattened (log weight, log ball mass) over all (k, j), 0 <= j <= k <= n."""
    D = floor_nd(n, d)
    lbin = binom_logpmf_array(n, delta)
    weights, balls = [], []
    for k in range(n + 1):
        j = np.arange(k + 1)
        weights.append(lbin[k] + log_binomial_array(k, j) - k * LN2)
        balls.append(log_hamming_ball_array(n - k, D - j) - (n - k) * LN2)
    log_w, log_b = np.concatenate(weights), np.concatenate(balls)
    log_w.setflags(write=False)
    log_b.setflags(write=False)
    return log_w, log_b


def bes_converse(delta: float, n: int, d, log_m: float) -> float:
    """eps >= E[ (1 - M 2^{-(n-K)} <n-K | floor(nd) - J>)^+ ]."""
    _check(delta, d)
    log_w, log_b = bes_tables(delta, n, d)
    with np.errstate(over="ignore", invalid="ignore"):
        hit = np.where(log_b == -np.inf, 0.0, np.minimum(1.0, np.exp(log_m + log_b)))
    return float(min(1.0, max(0.0, (np.exp(log_w) * (1.0 - hit)).sum())))


def bes_achievability(delta: float, n: int, d, log_m: float) -> float:
    """eps <= E[ (1 - 2^{-(n-K)} <n-K | floor(nd) - J>)^M ]."""
    _check(delta, d)
    log_w, log_b = bes_tables(delta, n, d)
    return rc_exact(log_b, log_w, log_m)


def bes_gaussian_approx(delta: float, n: int, d, eps: float, remainder: str = "zero") -> float:
    """Gaussian approximation in bits per symbol."""
    src = BES(delta)
    d = float(d)
    R = rate_distortion(src, d)
    V = dispersion(src, d)
    return gaussian_approx_nats(R, V, n, eps, remainder) / LN2

