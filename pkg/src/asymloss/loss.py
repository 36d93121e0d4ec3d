"""Asymmetric piecewise-linear loss and the moments of L(Z + c).

Residuals follow the convention z = prediction - observation, so z > 0 is
over-prediction (charged ``k1`` per unit) and z < 0 under-prediction
(charged ``k2`` per unit).

The closed forms are written with regularized incomplete gammas and gamma
ratios, e.g. Gamma(2a, x) / Gamma(a) = Q(2a, x) * Gamma(2a) / Gamma(a), so
they stay finite over the whole supported shape range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError
from .gnd import GndParams


@dataclass(frozen=True)
class LossParams:
    k1: float
    k2: float

    def __post_init__(self):
        for name in ("k1", "k2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be a positive finite number, got {value!r}")
        object.__setattr__(self, "k1", float(self.k1))
        object.__setattr__(self, "k2", float(self.k2))

    @property
    def asymmetry(self) -> float:
        """|k2 - k1| / (k1 + k2), in [0, 1)."""
        return abs(self.k2 - self.k1) / (self.k1 + self.k2)


def sgn(c: float) -> int:
    """+1 for c >= 0 (zero included), -1 otherwise."""
    return 1 if c >= 0 else -1


def loss(z, k: LossParams):
    """k1 z for z >= 0 and -k2 z for z < 0; accepts scalars or arrays."""
    if isinstance(z, np.ndarray):
        return np.where(z >= 0, k.k1 * z, -k.k2 * z)
    return k.k1 * z if z >= 0 else -k.k2 * z


def _check_shift(c: float) -> float:
    c = float(c)
    if not math.isfinite(c):
        raise DomainError(f"shift c must be finite, got {c!r}")
    return c


def log_transformed_shift(c: float, p: GndParams) -> float:
    """log x_c = log|c / b| / a; -inf at c = 0."""
    if c == 0.0:
        return -math.inf
    return (math.log(abs(c)) - math.log(p.b)) / p.a


def transformed_shift(c: float, p: GndParams) -> float:
    """x_c = |c / b|^(1/a), computed in log space; exactly 0 at c = 0."""
    u = log_transformed_shift(c, p)
    return math.exp(u) if u < 709.0 else math.inf


@dataclass(frozen=True)
class _Terms:
    """Incomplete-gamma pieces at x_c, each divided by Gamma(a)."""

    x: float
    lower_a: float  # gamma(a, x) / Gamma(a)
    upper_a: float  # Gamma(a, x) / Gamma(a)
    upper_2a: float  # Gamma(2a, x) / Gamma(a)
    full_2a: float  # Gamma(2a) / Gamma(a)
    lower_3a: float  # gamma(3a, x) / Gamma(a)
    full_3a: float  # Gamma(3a) / Gamma(a)


def _terms(log_x: float, p: GndParams) -> _Terms:
    # works from log x so shapes near 0 keep P(a, x) = |c/b| / Gamma(a + 1)
    # when x itself underflows
    a = p.a
    lg = specfun.ln_gamma(a)
    full_2a = math.exp(specfun.ln_gamma(2.0 * a) - lg)
    try:
        full_3a = math.exp(specfun.ln_gamma(3.0 * a) - lg)
    except OverflowError as exc:
        raise OverflowError(f"Gamma(3a)/Gamma(a) overflows for a = {a}") from exc
    lower_a, upper_a = specfun.reg_gamma_pair_log(a, log_x)
    upper_2a = specfun.reg_gamma_pair_log(2.0 * a, log_x)[1] * full_2a
    lower_3a = specfun.reg_gamma_pair_log(3.0 * a, log_x)[0] * full_3a
    return _Terms(math.exp(log_x) if log_x < 709.0 else math.inf, lower_a, upper_a, upper_2a, full_2a, lower_3a, full_3a)


def expected_loss(c: float, p: GndParams, k: LossParams) -> float:
    """E[L(Z + c)] in closed form."""
    c = _check_shift(c)
    t = _terms(log_transformed_shift(c, p), p)
    s = k.k1 + k.k2
    return 0.5 * (k.k1 - k.k2) * c + 0.5 * s * abs(c) * t.lower_a + 0.5 * s * p.b * t.upper_2a


def variance_loss(c: float, p: GndParams, k: LossParams) -> float:
    """Var[L(Z + c)] from the assembled seven-term closed form."""
    c = _check_shift(c)
    t = _terms(log_transformed_shift(c, p), p)
    b = p.b
    s = k.k1 + k.k2
    s2 = s * s
    dk2 = k.k1 * k.k1 - k.k2 * k.k2
    sk2 = k.k1 * k.k1 + k.k2 * k.k2
    # (k1+k2)^2 c^2 (1 - P^2) / 4 with 1 - P^2 = Q (1 + P)
    value = (
        0.25 * s2 * c * c * t.upper_a * (1.0 + t.lower_a)
        + 0.5 * dk2 * b * c * t.upper_2a
        - 0.5 * s2 * b * abs(c) * t.lower_a * t.upper_2a
        - 0.25 * s2 * b * b * t.upper_2a * t.upper_2a
        + 0.5 * sk2 * b * b * t.full_3a
        + sgn(c) * 0.5 * dk2 * b * b * t.lower_3a
    )
    return value


def expected_loss_derivative(c: float, p: GndParams, k: LossParams) -> float:
    """d/dc E[L(Z + c)] = (k1 - k2)/2 + sgn(c) (k1 + k2) P(a, x_c) / 2."""
    c = _check_shift(c)
    lower = specfun.reg_gamma_pair_log(p.a, log_transformed_shift(c, p))[0]
    return 0.5 * (k.k1 - k.k2) + sgn(c) * 0.5 * (k.k1 + k.k2) * lower
