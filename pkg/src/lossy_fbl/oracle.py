"""Ground truth at desk scale.

* ``brute_force_Mstar``: optimal code size for a binary source by
  exhaustive search over codebooks (n <= 4).
* ``mc_random_coding``: Monte Carlo estimate of the excess probability of
  an i.i.d. random codebook with nearest-codeword encoding.
* ``lossless_Mstar``: exact M*(0, eps) and the matching Neyman-Pearson
  beta, computed type by type.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bounds_binary import floor_nd
from .errors import BudgetExceededError, DomainError
from .numerics import compositions, count_compositions
from .sources import BMS, DMS

BRUTE_FORCE_MAX_N = 4
MC_MIN_TRIALS = 10**4


def _hamming_table(n: int) -> np.ndarray:
    words = np.arange(2 ** n)
    x = words[:, None] ^ words[None, :]
    return np.array([bin(v).count("1") for v in x.ravel()]).reshape(x.shape)


def brute_force_Mstar(p: float, n: int, d, eps: float) -> int:
    """Smallest M for which some codebook C of binary n-strings has
    P[min_c d(X^n, c) > d] <= eps."""
    if n > BRUTE_FORCE_MAX_N:
        raise BudgetExceededError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got n={n}")
    BMS(p)
    if not (0 < eps < 1):
        raise DomainError(f"eps must lie in (0,1), got {eps}")
    N = 2 ** n
    weights = np.array([bin(w).count("1") for w in range(N)])
    probs = p ** weights * (1 - p) ** (n - weights)
    covered = _hamming_table(n) <= floor_nd(n, d)
    # bit x of masks[c] is set when codeword c covers source string x
    masks = (covered * (1 << np.arange(N))[None, :]).sum(axis=1).astype(np.int64)
    union = np.zeros(1, dtype=np.int64)
    for c in range(N):
        union = np.concatenate([union, union | masks[c]])
    subset_size = np.array([bin(s).count("1") for s in range(2 ** N)])
    # covered mass for every possible coverage pattern
    bits = ((np.arange(2 ** N)[:, None] >> np.arange(N)[None, :]) & 1).astype(float)
    mass_of_pattern = bits @ probs
    ok = mass_of_pattern[union] >= 1 - eps - 1e-12
    return int(subset_size[ok].min())


def _sample_letters(rng, pmf, size):
    return rng.choice(len(pmf), size=size, p=pmf)


def _mc_shard(seed_seq, pmf, p_y, n, M, D, trials, chunk):
    rng = np.random.default_rng(seed_seq)
    misses = 0
    left = trials
    while left > 0:
        t = min(chunk, left)
        x = _sample_letters(rng, pmf, (t, 1, n))
        code = _sample_letters(rng, p_y, (t, M, n))
        dist = (x != code).sum(axis=2).min(axis=1)
        misses += int((dist > D).sum())
        left -= t
    return misses


def mc_random_coding(pmf, n: int, M: int, d, trials: int, p_y=None, seed: int = 0,
                     shards: int = 8, threads: int = 1, chunk: int = 20000):
    """Excess probability of an i.i.d. random code under the symbol error
    distortion: returns (eps_hat, standard error).

    Deterministic for a given (seed, shards); threads only change speed.
    """
    if trials < MC_MIN_TRIALS:
        raise DomainError(f"Monte Carlo needs at least {MC_MIN_TRIALS} trials")
    pmf = np.asarray(pmf, dtype=float)
    p_y = np.full(len(pmf), 1.0 / len(pmf)) if p_y is None else np.asarray(p_y, dtype=float)
    D = floor_nd(n, d)
    per = [trials // shards + (1 if i < trials % shards else 0) for i in range(shards)]
    seeds = np.random.SeedSequence(seed).spawn(shards)
    args = [(s, pmf, p_y, n, M, D, t, chunk) for s, t in zip(seeds, per)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            misses = sum(ex.map(lambda a: _mc_shard(*a), args))
    else:
        misses = sum(_mc_shard(*a) for a in args)
    eps_hat = misses / trials
    return eps_hat, math.sqrt(max(eps_hat * (1 - eps_hat), 0.0) / trials)


def lossless_Mstar(source, n: int, eps: float, budget: int = 10**7):
    """(M*(0, eps), beta): the fewest strings carrying probability >= 1 - eps,
    and the randomised-test value beta_{1-eps}(P_X, U) with U counting
    measure.  Strings are taken most likely first, one type at a time.
    """
    if isinstance(source, BMS):
        pmf = source.as_dms().pmf
    elif isinstance(source, DMS):
        pmf = source.pmf
    else:
        raise DomainError("lossless M* needs a discrete source")
    if not (0 < eps < 1):
        raise DomainError(f"eps must lie in (0,1), got {eps}")
    m = len(pmf)
    if count_compositions(n, m) > budget:
        raise BudgetExceededError(f"{count_compositions(n, m)} types exceed the cap {budget}")
    types = compositions(n, m)
    logp = types @ np.log(np.array(pmf))
    order = np.lexsort((np.arange(len(types)), -logp))
    target = 1.0 - eps
    cum = 0.0
    count = 0
    for i in order:
        k = [int(v) for v in types[i]]
        size = math.factorial(n)
        for v in k:
            size //= math.factorial(v)
        p_str = math.exp(float(logp[i]))
        mass = size * p_str
        if cum + mass >= target * (1 - 1e-13):
            need = max(0.0, (target - cum) / p_str)
            whole = math.ceil(need - 1e-9 * max(1.0, need))
            return count + max(whole, 0), count + need
        cum += mass
        count += size
    return count, float(count)

