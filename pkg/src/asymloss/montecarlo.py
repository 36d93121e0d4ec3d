"""Monte Carlo estimates of the mean and variance of L(Z + c).

Samples come from :func:`asymloss.gnd.sample_chunk`, one fixed-size chunk at a
time. Each chunk is reduced to (n, mean, M2, M3, M4) and the chunk summaries
are merged left to right in chunk-index order, so results do not depend on
how many worker threads produced them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gnd import GndParams, _check_seed, chunk_bounds, sample_chunk
from .loss import LossParams, loss


@dataclass(frozen=True)
class LossStats:
    n: int
    mean: float
    variance: float
    mean_stderr: float
    variance_stderr: float
    seed: int


@dataclass(frozen=True)
class _Moments:
    n: int
    mean: float
    m2: float
    m3: float
    m4: float


def _chunk_moments(values: np.ndarray) -> _Moments:
    n = values.size
    mean = float(np.mean(values))
    d = values - mean
    d2 = d * d
    return _Moments(n, mean, float(np.sum(d2)), float(np.sum(d2 * d)), float(np.sum(d2 * d2)))


def merge(a: _Moments, b: _Moments) -> _Moments:
    """Combine two central-moment summaries (Pebay 2008 update formulas)."""
    na, nb = a.n, b.n
    n = na + nb
    delta = b.mean - a.mean
    dn = delta / n
    mean = a.mean + dn * nb
    m2 = a.m2 + b.m2 + delta * dn * na * nb
    m3 = a.m3 + b.m3 + delta * dn * dn * na * nb * (na - nb) + 3.0 * dn * (na * b.m2 - nb * a.m2)
    m4 = (
        a.m4
        + b.m4
        + delta * dn * dn * dn * na * nb * (na * na - na * nb + nb * nb)
        + 6.0 * dn * dn * (na * na * b.m2 + nb * nb * a.m2)
        + 4.0 * dn * (na * b.m3 - nb * a.m3)
    )
    return _Moments(n, mean, m2, m3, m4)


def estimate_loss_stats(c: float, p: GndParams, k: LossParams, n: int, seed: int, workers: int = 1) -> LossStats:
    c = float(c)
    if not math.isfinite(c):
        raise DomainError(f"shift c must be finite, got {c!r}")
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    seed = _check_seed(seed)
    bounds = chunk_bounds(n)

    def run(idx: int) -> _Moments:
        lo, hi = bounds[idx]
        z = sample_chunk(p, seed, idx, hi - lo)
        return _chunk_moments(loss(z + c, k))

    if workers <= 1 or len(bounds) == 1:
        parts = [run(i) for i in range(len(bounds))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(bounds))))

    acc = parts[0]
    for part in parts[1:]:
        acc = merge(acc, part)

    variance = acc.m2 / (n - 1)
    m4 = acc.m4 / n
    # asymptotic standard error of the variance; only used for tolerance bands
    var_se = math.sqrt(max(m4 - variance * variance, 0.0) / n)
    return LossStats(
        n=n,
        mean=acc.mean,
        variance=variance,
        mean_stderr=math.sqrt(variance / n),
        variance_stderr=var_se,
        seed=seed,
    )
