"""Method-of-moments fit of (a, b) from residuals z = prediction - observation.

The shape is identified by the scale-free ratio

    r(a) = E[Z^2] / E|Z|^2 = Gamma(3a) Gamma(a) / Gamma(2a)^2,

which increases strictly from 4/3 (a -> 0) without bound. Given a, the scale
follows from E|Z| = b Gamma(2a) / Gamma(a). The mean is never subtracted:
the error model is centred at zero by assumption.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError, InternalConsistencyError, OutOfFamilyError
from .gnd import MAX_SHAPE, GndParams

MIN_SHAPE = 1e-3
RATIO_LIMIT = 4.0 / 3.0
_MONOTONE_GRID = 4000


@dataclass(frozen=True)
class MomentSummary:
    n: int
    mean: float
    mean_abs: float
    second_moment: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise DomainError(f"need at least 2 residuals, got n = {self.n!r}")
        for name in ("mean", "mean_abs", "second_moment"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.mean_abs <= 0.0:
            raise DomainError("degenerate residuals: mean |z| is zero")
        if self.second_moment < self.mean_abs * self.mean_abs * (1.0 - 1e-12):
            raise DomainError("second moment below squared mean |z|; summary is inconsistent")

    @property
    def moment_ratio(self) -> float:
        return self.second_moment / (self.mean_abs * self.mean_abs)


def summarize(residuals) -> MomentSummary:
    z = np.asarray(residuals, dtype=np.float64).ravel()
    if z.size < 2:
        raise DomainError(f"need at least 2 residuals, got {z.size}")
    bad = np.flatnonzero(~np.isfinite(z))
    if bad.size:
        raise DomainError(f"non-finite residual at index {int(bad[0])}")
    if not np.any(z):
        raise DomainError("degenerate residuals: all values are zero")
    n = z.size
    return MomentSummary(
        n=n,
        mean=math.fsum(z) / n,
        mean_abs=math.fsum(np.abs(z)) / n,
        second_moment=math.fsum(z * z) / n,
    )


def log_moment_ratio(a: float) -> float:
    """log r(a) = log Gamma(3a) + log Gamma(a) - 2 log Gamma(2a)."""
    return specfun.ln_gamma(3.0 * a) + specfun.ln_gamma(a) - 2.0 * specfun.ln_gamma(2.0 * a)


def moment_ratio(a: float) -> float:
    return math.exp(log_moment_ratio(a))


@functools.lru_cache(maxsize=1)
def _assert_monotone() -> None:
    us = np.linspace(math.log(MIN_SHAPE), math.log(MAX_SHAPE), _MONOTONE_GRID)
    values = [log_moment_ratio(math.exp(u)) for u in us]
    for u0, v0, v1 in zip(us, values, values[1:]):
        if not v1 > v0:
            raise InternalConsistencyError(f"moment ratio not increasing near a = {math.exp(u0):.6g}")


def diagnostics(s: MomentSummary) -> list[str]:
    """Warnings about the fit; currently flags a mean far from zero."""
    out = []
    limit = 4.0 * math.sqrt(s.second_moment / s.n)
    if abs(s.mean) > limit:
        out.append(
            f"residual mean {s.mean:.6g} exceeds 4*sqrt(E[z^2]/n) = {limit:.6g}; "
            "the zero-mean error model may not fit"
        )
    return out


def fit_moments(s: MomentSummary) -> GndParams:
    _assert_monotone()
    ratio = s.moment_ratio
    target = math.log(ratio)
    lo, hi = math.log(MIN_SHAPE), math.log(MAX_SHAPE)
    if ratio <= RATIO_LIMIT:
        raise OutOfFamilyError(
            f"moment ratio E[z^2]/E|z|^2 = {ratio:.6g} is at or below 4/3, "
            "lighter-tailed than any generalized Gaussian"
        )
    if target <= log_moment_ratio(MIN_SHAPE):
        raise OutOfFamilyError(
            f"moment ratio {ratio:.10g} implies a shape below a = {MIN_SHAPE:g}, outside the supported range"
        )
    # a = 50 is in the domain; admit a rounding-level overshoot of r(50)
    if target > log_moment_ratio(MAX_SHAPE) + 1e-12:
        raise OutOfFamilyError(
            f"moment ratio {ratio:.6g} implies a shape above a = {MAX_SHAPE:g}, outside the supported range"
        )
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if log_moment_ratio(math.exp(mid)) < target:
            lo = mid
        else:
            hi = mid
    a = math.exp(0.5 * (lo + hi))
    b = s.mean_abs * math.exp(specfun.ln_gamma(a) - specfun.ln_gamma(2.0 * a))
    return GndParams(a, b)
