"""Numerical checks of the gamma-function inequalities behind the correction.

Each check is a plain function returning the quantity whose sign carries the
claim, so the same numbers can be asserted in tests and printed by the CLI.
:func:`run_suite` sweeps them over a :class:`GridSpec` and returns one
:class:`Check` per claim with its worst-case margin.

Most quantities are evaluated divided by Gamma(a)^2 (``*_scaled``). The
positive constant does not change any sign and keeps everything finite for
shapes up to the package limit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import specfun
from .errors import DomainError
from .gnd import MAX_SHAPE, GndParams
from .loss import LossParams, variance_loss
from .optimizer import optimal_correction

DEFAULT_A_VALUES = (0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 5.0, 10.0, 25.0)
DEFAULT_RATIO_VALUES = (0.0, 0.05, 0.2, 0.5, 0.8, 0.95)
TABLE_SHAPES = (0.5, 1.0, 2.0)
SERIES_POINTS = (10, 1000, 1_000_000)
TAIL_EXPONENTS = (1, 5)
GAP_IDENTITY_TOL = 1e-9
# V0 - VC loses digits when the gap is tiny next to V0 (large a, small ratio);
# allow a few ulps of V0 on top of the relative tolerance
_SUBTRACTION_ULPS = 64.0 * 2.220446049250313e-16


@dataclass(frozen=True)
class GridSpec:
    a_values: tuple[float, ...]
    x_values: tuple[float, ...]
    ratio_values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a_values", _validated("a_values", self.a_values, 0.0, MAX_SHAPE, True))
        object.__setattr__(self, "x_values", tuple(sorted(_validated("x_values", self.x_values, 0.0, math.inf, False))))
        object.__setattr__(self, "ratio_values", _validated("ratio_values", self.ratio_values, 0.0, 1.0, None))

    @classmethod
    def from_dict(cls, data: dict) -> GridSpec:
        try:
            return cls(
                a_values=tuple(data["a_values"]),
                x_values=tuple(data["x_values"]),
                ratio_values=tuple(data.get("ratio_values", DEFAULT_RATIO_VALUES)),
            )
        except (KeyError, TypeError) as exc:
            raise DomainError(f"grid needs list fields a_values and x_values: {exc}") from exc

    def to_dict(self) -> dict:
        return {"a_values": list(self.a_values), "x_values": list(self.x_values), "ratio_values": list(self.ratio_values)}


def _validated(name, values, lo, hi, hi_inclusive):
    # hi_inclusive None means the range is [lo, hi)
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise DomainError(f"{name}: entries must be numbers, got {v!r}")
        v = float(v)
        if not math.isfinite(v):
            raise DomainError(f"{name}: entries must be finite, got {v!r}")
        if hi_inclusive is None:
            ok = lo <= v < hi
        elif hi_inclusive:
            ok = lo < v <= hi
        else:
            ok = lo < v < hi
        if not ok:
            left = "[" if hi_inclusive is None else "("
            right = "]" if hi_inclusive else ")"
            raise DomainError(f"{name}: {v!r} outside the supported range {left}{lo:g}, {hi:g}{right}")
        out.append(v)
    if not out:
        raise DomainError(f"{name} must not be empty")
    return tuple(out)


def default_grid() -> GridSpec:
    xs = np.logspace(-4.0, 2.0, 60)
    return GridSpec(DEFAULT_A_VALUES, tuple(float(x) for x in xs), DEFAULT_RATIO_VALUES)


def load_grid(path) -> GridSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise DomainError(f"{path}: expected a JSON object")
    return GridSpec.from_dict(data)


# ---------------------------------------------------------------------------
# variance-gap function


def _check_ax(a: float, x: float) -> tuple[float, float]:
    a = specfun._check_shape(a)
    x = specfun._check_x(x)
    if a > MAX_SHAPE:
        raise DomainError(f"a = {a} exceeds the supported domain a <= {MAX_SHAPE:g}")
    return a, x


def _pow(x: float, e: float) -> float:
    return math.exp(e * math.log(x)) if x > 0.0 else 0.0


def f_scaled(a: float, x: float) -> float:
    """f(a, x) / Gamma(a)^2 in regularized form."""
    a, x = _check_ax(a, x)
    if x == 0.0:
        return 0.0
    lg = specfun.ln_gamma(a)
    g2 = math.exp(specfun.ln_gamma(2.0 * a) - lg)
    g3 = math.exp(specfun.ln_gamma(3.0 * a) - lg)
    p, q = specfun.reg_gamma_pair(a, x)
    p2, q2 = specfun.reg_gamma_pair(2.0 * a, x)
    p3 = specfun.reg_lower_gamma(3.0 * a, x)
    xa = _pow(x, a)
    # gamma^2 - Gamma^2 = -Gamma(a,x)(gamma + Gamma); same for the 2a pair
    return (
        -xa * xa * q * (1.0 + p)
        + 4.0 * xa * p * q2 * g2
        - p2 * (1.0 + q2) * g2 * g2
        + 2.0 * p * p3 * g3
    )


def f_theorem(a: float, x: float) -> float:
    """Unscaled f(a, x); raises OverflowError outside floating range."""
    a, x = _check_ax(a, x)
    try:
        scale = math.exp(2.0 * specfun.ln_gamma(a))
        value = f_scaled(a, x) * scale
    except OverflowError as exc:
        raise OverflowError(f"f(a, x) overflows for a = {a}, x = {x}") from exc
    if not math.isfinite(value):
        raise OverflowError(f"f(a, x) overflows for a = {a}, x = {x}")
    return value


def variance_gap_from_f(p: GndParams, k: LossParams, x_star: float) -> float:
    """(k1 + k2)^2 b^2 f(a, x*) / (4 Gamma(a)^2)."""
    s = k.k1 + k.k2
    return 0.25 * s * s * p.b * p.b * f_scaled(p.a, x_star)


# ---------------------------------------------------------------------------
# auxiliary y-functions


@dataclass(frozen=True)
class YValues:
    y1: float
    y2: float
    y3: float
    y4: float


def _y_scaled(a: float, x: float) -> YValues:
    lg = specfun.ln_gamma(a)
    r2 = math.exp(specfun.ln_gamma(2.0 * a) - 2.0 * lg)
    if x == 0.0:
        return YValues(0.0, 2.0 * r2 - a, -r2, 0.0)
    p, q = specfun.reg_gamma_pair(a, x)
    q2 = specfun.reg_upper_gamma(2.0 * a, x)
    # a gamma(a,x) - x^a e^-x = gamma(a+1, x) removes the x -> 0 cancellation
    p1 = specfun.reg_lower_gamma(a + 1.0, x)
    lx = math.log(x)
    y1 = -_pow(x, a) * q * (1.0 + p) + 2.0 * p * q2 * r2 * math.exp(lg)
    y2 = -a * q * (1.0 + p) + 2.0 * math.exp(-x) * q2 * r2
    y3 = a * p1 * math.exp((a - 1.0) * lx - lg) - q2 * r2
    y4 = (a - 1.0) * a * p1 * math.exp(-lg) + 2.0 * math.exp((a + 1.0) * lx - x - 2.0 * lg)
    return YValues(y1, y2, y3, y4)


def y_funcs(a: float, x: float, scaled: bool = False) -> YValues:
    """y1..y4 at (a, x); x = 0 returns the right-hand limits.

    With ``scaled=True`` every value is divided by Gamma(a)^2.
    """
    a, x = _check_ax(a, x)
    ys = _y_scaled(a, x)
    if scaled:
        return ys
    scale = math.exp(2.0 * specfun.ln_gamma(a))
    out = YValues(ys.y1 * scale, ys.y2 * scale, ys.y3 * scale, ys.y4 * scale)
    if not all(math.isfinite(v) for v in (out.y1, out.y2, out.y3, out.y4)):
        raise OverflowError(f"y-functions overflow for a = {a}, x = {x}")
    return out


# ---------------------------------------------------------------------------
# supporting inequalities


@dataclass(frozen=True)
class GammaInequalityGaps:
    duplication_gap: float  # 2 Gamma(2a) - a Gamma(a)^2
    half_shift_gap: float  # 4^a Gamma(a + 1/2) - sqrt(pi) Gamma(a + 1)
    duplication_log_gap: float
    half_shift_log_gap: float


def lemma_gamma_inequalities(a: float) -> GammaInequalityGaps:
    """Signs are decided by the log gaps; raw gaps are informational."""
    a, _ = _check_ax(a, 0.0)
    dup_hi = math.log(2.0) + specfun.ln_gamma(2.0 * a)
    dup_lo = math.log(a) + 2.0 * specfun.ln_gamma(a)
    half_hi = a * math.log(4.0) + specfun.ln_gamma(a + 0.5)
    half_lo = 0.5 * math.log(math.pi) + specfun.ln_gamma(a + 1.0)
    return GammaInequalityGaps(
        duplication_gap=math.exp(dup_hi) - math.exp(dup_lo),
        half_shift_gap=math.exp(half_hi) - math.exp(half_lo),
        duplication_log_gap=dup_hi - dup_lo,
        half_shift_log_gap=half_hi - half_lo,
    )


@dataclass(frozen=True)
class PointwiseBounds:
    lower_bound_gap: float  # a gamma(a, x) - x^a e^-x
    tail_decay: float  # largest successive ratio of x^m Gamma(a, x); < 1 means decreasing


def tail_ratios(a: float, m: float, x0: float, steps: int = 8, factor: float = 2.0) -> list[float]:
    """Successive ratios of x^m Gamma(a, x) along x0, x0*factor, ..."""
    logs = []
    x = x0
    for _ in range(steps + 1):
        logs.append(m * math.log(x) + specfun.log_reg_upper_gamma(a, x))
        x *= factor
    return [math.exp(hi - lo) for lo, hi in zip(logs, logs[1:])]


def lemma_pointwise_bounds(a: float, x: float, exponents=TAIL_EXPONENTS) -> PointwiseBounds:
    a, x = _check_ax(a, x)
    if x == 0.0:
        raise DomainError("x must be positive")
    lower = specfun.lower_gamma(a, x)
    gap = a * lower - math.exp(a * math.log(x) - x)
    decay = max(max(tail_ratios(a, m, max(x, 3.0 * (a + m)))) for m in exponents)
    return PointwiseBounds(lower_bound_gap=gap, tail_decay=decay)


def series_two_log_two(n: int) -> float:
    """Partial sum of 1 / (k (2k - 1)) for k = 1..n."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    k = np.arange(1, int(n) + 1, dtype=np.float64)
    return math.fsum(1.0 / (k * (2.0 * k - 1.0)))


# ---------------------------------------------------------------------------
# sign tables

# expected sign sequence along increasing x; a finite grid may cut a pattern short
_EXPECTED_LOW = {"y1": "+", "y2": "+-", "y3": "-+", "y4": "+-"}
_EXPECTED_HIGH = {"y1": "+", "y2": "+-", "y3": "-+", "y4": "+"}


@dataclass(frozen=True)
class SignTable:
    a: float
    patterns: dict
    roots: dict
    turning_point: float | None
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations


def _compress(signs):
    out = []
    for s in signs:
        if s != 0 and (not out or out[-1] != s):
            out.append(s)
    return "".join("+" if s > 0 else "-" for s in out)


def _bisect(fn, lo, hi, iters=200):
    flo = fn(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _y4_slope(a: float, x: float) -> float:
    h = 1e-5 * x
    return (y_funcs(a, x + h, scaled=True).y4 - y_funcs(a, x - h, scaled=True).y4) / (2.0 * h)


def sign_table_scan(a: float, grid: GridSpec) -> SignTable:
    """Sign patterns of y1..y4 on grid.x_values, with bisected roots."""
    a, _ = _check_ax(a, 0.0)
    xs = list(grid.x_values)
    values = [y_funcs(a, x, scaled=True) for x in xs]
    expected = _EXPECTED_LOW if a < 1.0 else _EXPECTED_HIGH
    patterns, roots, violations = {}, {}, []
    for name in ("y1", "y2", "y3", "y4"):
        seq = [getattr(v, name) for v in values]
        pat = _compress([(v > 0) - (v < 0) for v in seq])
        patterns[name] = pat
        if not expected[name].startswith(pat):
            worst = next((x for x, v in zip(xs, seq) if (v > 0) != (expected[name][0] == "+")), None)
            violations.append(f"{name}: sign pattern {pat!r}, expected {expected[name]!r} (a={a:g}, first x={worst!r})")
        for x0, x1, v0, v1 in zip(xs, xs[1:], seq, seq[1:]):
            if v0 * v1 < 0:
                roots[name] = _bisect(lambda t, n=name: getattr(y_funcs(a, t, scaled=True), n), x0, x1)
                break
    found = [roots[n] for n in ("y2", "y3", "y4") if n in roots]
    if any(lo >= hi for lo, hi in zip(found, found[1:])):
        violations.append(f"roots out of order for a={a:g}: {roots}")
    if "y4" in roots and roots["y4"] <= 0.5 * (3.0 * a + 1.0):
        violations.append(f"y4 root {roots['y4']!r} not past (3a+1)/2 for a={a:g}")

    turning = None
    inner = [x for x in xs if x > xs[0] and x < xs[-1]]
    slopes = [_y4_slope(a, x) for x in inner]
    for x0, x1, s0, s1 in zip(inner, inner[1:], slopes, slopes[1:]):
        if s0 > 0 >= s1:
            turning = _bisect(lambda t: _y4_slope(a, t), x0, x1)
            break
    target = 0.5 * (3.0 * a + 1.0)
    if xs[0] < target < xs[-1]:
        if turning is None:
            violations.append(f"dy4/dx shows no +/- crossing for a={a:g}")
        elif abs(turning - target) > 1e-4 * target:
            violations.append(f"dy4/dx crosses zero at {turning!r}, expected {target!r} (a={a:g})")
    return SignTable(a, patterns, roots, turning, tuple(violations))


# ---------------------------------------------------------------------------
# suite


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass(frozen=True)
class SuiteReport:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> tuple[Check, ...]:
        return tuple(c for c in self.checks if not c.passed)


def _min_check(name, items, strict=True):
    # items: iterable of (value, location); passes when every value > 0 (or >= 0)
    worst_v, worst_at = math.inf, ""
    for v, at in items:
        if math.isnan(v) or v < worst_v:
            worst_v, worst_at = v, at
            if math.isnan(v):
                break
    ok = worst_v > 0 if strict else worst_v >= 0
    ok = ok and not math.isnan(worst_v)
    return Check(name, bool(ok), worst_v, f"worst at {worst_at}")


def _ratio_to_k(r: float) -> LossParams:
    # k1 = 1 - r, k2 = 1 + r gives |k2 - k1| / (k1 + k2) = r exactly
    return LossParams(1.0 - r, 1.0 + r)


def run_suite(grid: GridSpec | None = None) -> SuiteReport:
    grid = grid or default_grid()
    checks = []
    checks.append(
        _min_check(
            "duplication_inequality",
            ((lemma_gamma_inequalities(a).duplication_log_gap, f"a={a:g}") for a in grid.a_values),
        )
    )
    checks.append(
        _min_check(
            "half_shift_inequality",
            ((lemma_gamma_inequalities(a).half_shift_log_gap, f"a={a:g}") for a in grid.a_values),
        )
    )
    points = [(a, x) for a in grid.a_values for x in grid.x_values]
    checks.append(_min_check("y1_positive", ((y_funcs(a, x, scaled=True).y1, f"a={a:g}, x={x:.6g}") for a, x in points)))
    bounds = {(a, x): lemma_pointwise_bounds(a, x) for a, x in points}
    checks.append(
        _min_check("lower_gamma_bound", ((b.lower_bound_gap, f"a={a:g}, x={x:.6g}") for (a, x), b in bounds.items()), strict=False)
    )
    checks.append(
        _min_check("upper_tail_decay", ((1.0 - b.tail_decay, f"a={a:g}, x={x:.6g}") for (a, x), b in bounds.items()))
    )
    checks.append(
        _min_check(
            "two_log_two_series",
            ((1.0 / n - abs(series_two_log_two(n) - 2.0 * math.log(2.0)), f"n={n}") for n in SERIES_POINTS),
            strict=False,
        )
    )
    checks.append(_min_check("variance_gap_function_positive", ((f_scaled(a, x), f"a={a:g}, x={x:.6g}") for a, x in points)))

    gap_items, reduce_items = [], []
    for a in grid.a_values:
        p = GndParams(a, 1.0)
        for r in grid.ratio_values:
            k = _ratio_to_k(r)
            corr = optimal_correction(p, k)
            v0 = variance_loss(0.0, p, k)
            gap = v0 - corr.variance_at_C
            at = f"a={a:g}, ratio={r:g}"
            if r == 0.0:
                reduce_items.append((r, gap, at))
                continue
            ident = variance_gap_from_f(p, k, corr.x_star)
            reduce_items.append((r, ident, at))
            allowed = GAP_IDENTITY_TOL * abs(ident) + _SUBTRACTION_ULPS * v0
            gap_items.append((1.0 - abs(gap - ident) / allowed, at))
    if gap_items:
        checks.append(_min_check("variance_gap_identity", gap_items, strict=False))
    checks.append(_variance_reduction_check(reduce_items))

    for a in TABLE_SHAPES:
        table = sign_table_scan(a, grid)
        margin = 1.0 if table.passed else -float(len(table.violations))
        checks.append(Check(f"sign_table[a={a:g}]", table.passed, margin, "; ".join(table.violations) or str(table.patterns)))
    return SuiteReport(tuple(checks))


def _variance_reduction_check(items) -> Check:
    # strict reduction for unequal weights, no change for equal ones
    worst, where, ok = math.inf, "", True
    for r, gap, at in items:
        if r == 0.0:
            ok = ok and gap == 0.0
            continue
        if gap < worst:
            worst, where = gap, at
        ok = ok and gap > 0.0
    return Check("variance_reduced_at_optimum", ok, worst, f"worst at {where}")
