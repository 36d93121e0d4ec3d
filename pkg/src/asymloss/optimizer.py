"""Optimal additive correction C for the asymmetric linear loss.

C minimizes E[L(Z + c)]. Setting the derivative to zero gives

    P(a, |C/b|^(1/a)) = |k2 - k1| / (k1 + k2),   sgn(C) = sgn(k2 - k1),

so the vertical line t = x* splits the area under t^(a-1) e^-t in the ratio
r : 1 - r with r the loss asymmetry. Every shape goes through the same
inversion of P(a, .); there are no per-family fast paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import specfun
from .gnd import GndParams
from .loss import LossParams, expected_loss, log_transformed_shift, variance_loss

SATURATION_LEVEL = 1.0 - 1e-12


@dataclass(frozen=True)
class Correction:
    C: float
    x_star: float
    expected_loss_at_0: float
    expected_loss_at_C: float
    variance_at_0: float
    variance_at_C: float
    reduction_ratio: float
    warnings: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class LossReduction:
    difference: float
    ratio: float


def _gamma_ratio(num: float, den: float) -> float:
    return math.exp(specfun.ln_gamma(num) - specfun.ln_gamma(den))


def solve_log_x_star(p: GndParams, k: LossParams, accuracy: specfun.Accuracy = specfun.DEFAULT_ACCURACY) -> float | None:
    """log x* for the root of P(a, x) = |k2 - k1| / (k1 + k2); None when k1 = k2."""
    r = k.asymmetry
    if r == 0.0:
        return None
    return specfun.log_inv_reg_lower_gamma(p.a, r, accuracy)


def solve_x_star(p: GndParams, k: LossParams, accuracy: specfun.Accuracy = specfun.DEFAULT_ACCURACY) -> float:
    """Root x* of P(a, x) = |k2 - k1| / (k1 + k2)."""
    u = solve_log_x_star(p, k, accuracy)
    return 0.0 if u is None else math.exp(u)


def shift_from_root(p: GndParams, k: LossParams, log_x_star: float | None) -> float:
    """C = sgn(k2 - k1) b x*^a, formed in logs so tiny shapes do not underflow x*."""
    if log_x_star is None:
        return 0.0
    direction = 1.0 if k.k2 > k.k1 else -1.0
    return direction * p.b * math.exp(p.a * log_x_star)


def _log(x: float) -> float:
    return math.log(x) if x > 0.0 else -math.inf


def _as_log(u: float | None) -> float:
    return -math.inf if u is None else u


def _minimized_from_log(p: GndParams, k: LossParams, u: float) -> float:
    q2 = specfun.reg_gamma_pair_log(2.0 * p.a, u)[1]
    return 0.5 * (k.k1 + k.k2) * p.b * q2 * _gamma_ratio(2.0 * p.a, p.a)


def minimized_expected_loss(p: GndParams, k: LossParams, x_star: float) -> float:
    """E[L(Z + C)] = (k1 + k2) b Gamma(2a, x*) / (2 Gamma(a))."""
    return _minimized_from_log(p, k, _log(x_star))


def _variance_at_root(p: GndParams, k: LossParams, C: float, u: float) -> float:
    # Var[L(Z + c)] with gamma(a, x*) / Gamma(a) replaced by the asymmetry r;
    # the two cross terms of the general form merge into one.
    a, b = p.a, p.b
    s = k.k1 + k.k2
    s2 = s * s
    r = k.asymmetry
    one_minus_r = 2.0 * min(k.k1, k.k2) / s
    upper_2a = specfun.reg_gamma_pair_log(2.0 * a, u)[1] * _gamma_ratio(2.0 * a, a)
    full_3a = _gamma_ratio(3.0 * a, a)
    lower_3a = specfun.reg_gamma_pair_log(3.0 * a, u)[0] * full_3a
    sk2 = k.k1 * k.k1 + k.k2 * k.k2
    return (
        0.25 * s2 * C * C * one_minus_r * (1.0 + r)
        - s2 * b * abs(C) * r * upper_2a
        - 0.25 * s2 * b * b * upper_2a * upper_2a
        + 0.5 * sk2 * b * b * full_3a
        - 0.5 * s2 * b * b * r * lower_3a
    )


def variance_at_optimum(p: GndParams, k: LossParams, corr: Correction) -> float:
    """Var[L(Z + C)] by the substituted five-term formula."""
    # log x* recovered from C survives an underflowed x_star
    return _variance_at_root(p, k, corr.C, log_transformed_shift(corr.C, p))


def loss_reduction(p: GndParams, k: LossParams) -> LossReduction:
    """E[L(Z)] - E[L(Z + C)] and E[L(Z + C)] / E[L(Z)]."""
    u = _as_log(solve_log_x_star(p, k))
    lower, upper = specfun.reg_gamma_pair_log(2.0 * p.a, u)
    difference = 0.5 * (k.k1 + k.k2) * p.b * lower * _gamma_ratio(2.0 * p.a, p.a)
    return LossReduction(difference=difference, ratio=upper)


def optimal_correction(
    p: GndParams, k: LossParams, accuracy: specfun.Accuracy = specfun.DEFAULT_ACCURACY
) -> Correction:
    u = solve_log_x_star(p, k, accuracy)
    x_star = 0.0 if u is None else math.exp(u)
    C = shift_from_root(p, k, u)
    warnings = []
    if k.asymmetry > SATURATION_LEVEL:
        warnings.append(
            f"saturated asymmetry: |k2-k1|/(k1+k2) = {k.asymmetry:.17g} exceeds 1 - 1e-12; "
            "the correction is numerically ill-conditioned"
        )
    return Correction(
        C=C,
        x_star=x_star,
        expected_loss_at_0=expected_loss(0.0, p, k),
        expected_loss_at_C=_minimized_from_log(p, k, _as_log(u)),
        variance_at_0=variance_loss(0.0, p, k),
        variance_at_C=_variance_at_root(p, k, C, _as_log(u)),
        reduction_ratio=specfun.reg_gamma_pair_log(2.0 * p.a, _as_log(u))[1],
        warnings=tuple(warnings),
    )
