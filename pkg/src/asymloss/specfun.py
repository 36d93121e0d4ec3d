"""Gamma-family special functions for real arguments.

Regularized incomplete gamma functions follow the usual split: the power
series for P(a, x) when x < a + 1 and the Lentz continued fraction for
Q(a, x) otherwise, each in its convergent regime. The other member of the
pair is taken as the complement.

All functions are pure and reject NaN/inf instead of propagating them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

__all__ = [
    "Accuracy",
    "DEFAULT_ACCURACY",
    "ln_gamma",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "reg_gamma_pair",
    "reg_gamma_pair_log",
    "lower_gamma",
    "upper_gamma",
    "log_reg_upper_gamma",
    "inv_reg_lower_gamma",
    "log_inv_reg_lower_gamma",
    "erf",
    "erfc",
    "erf_inv",
]

EULER_GAMMA = 0.57721566490153286061
_HALF_LOG_2PI = 0.91893853320467274178
_EPS = 2.220446049250313e-16
_TINY = 1e-300
_SERIES_MAX_ITER = 5000

# zeta(k) - 1 for k = 2..31, computed with mpmath at 30 digits.
_ZETA_MINUS_ONE = (
    0.64493406684822643647,
    0.2020569031595942854,
    0.082323233711138191516,
    0.036927755143369926331,
    0.017343061984449139715,
    0.0083492773819228268398,
    0.0040773561979443393787,
    0.0020083928260822144179,
    0.00099457512781808533715,
    0.0004941886041194645587,
    0.00024608655330804829864,
    0.00012271334757848914675,
    0.000061248135058704829259,
    0.000030588236307020493552,
    0.000015282259408651871733,
    0.0000076371976378997622736,
    0.0000038172932649998398565,
    0.0000019082127165539389257,
    0.00000095396203387279611315,
    0.00000047693298678780646312,
    0.00000023845050272773299,
    0.00000011921992596531107307,
    0.000000059608189051259479612,
    0.000000029803503514652280186,
    0.000000014901554828365041235,
    0.000000007450711789835429492,
    0.0000000037253340247884570548,
    0.0000000018626597235130490064,
    0.00000000093132743241966818287,
    0.0000000004656629065033784073,
)

# B_{2k} / (2k (2k - 1)) for the Stirling tail, k = 1..8.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


@dataclass(frozen=True)
class Accuracy:
    """Tolerance and iteration cap for the iterative inversions."""

    rel_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1e-6):
            raise DomainError(f"rel_tol must lie in (0, 1e-6), got {self.rel_tol!r}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter!r}")


DEFAULT_ACCURACY = Accuracy()


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def _check_shape(a: float) -> float:
    a = _check_finite("a", a)
    if a <= 0.0:
        raise DomainError(f"a must be positive, got {a!r}")
    return a


def _check_x(x: float) -> float:
    x = _check_finite("x", x)
    if x < 0.0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    return x


# ---------------------------------------------------------------------------
# log-gamma


def _zeta_tail(z: float) -> float:
    # sum_{k>=2} (-1)^k (zeta(k) - 1) z^k / k, |z| <= 0.5
    total = 0.0
    power = z
    for k, coeff in enumerate(_ZETA_MINUS_ONE, start=2):
        power *= -z
        total += coeff * power / k
    # power carries (-1)^(k-1) z^k; flip once for (-1)^k
    return -total


def _lgamma_1p(z: float) -> float:
    """log Gamma(1 + z) for |z| <= 0.5."""
    return -EULER_GAMMA * z + (z - math.log1p(z)) + _zeta_tail(z)


def _lgamma_2p(z: float) -> float:
    """log Gamma(2 + z) for |z| <= 0.5; the log1p terms cancel analytically."""
    return (1.0 - EULER_GAMMA) * z + _zeta_tail(z)


def _stirling_correction(x: float) -> float:
    """log Gamma(x) - [(x - 1/2) log x - x + log(2 pi)/2], valid for x >= 10."""
    inv = 1.0 / x
    inv2 = inv * inv
    total = 0.0
    for coeff in reversed(_STIRLING):
        total = total * inv2 + coeff
    return total * inv


def ln_gamma(a: float) -> float:
    """Natural log of Gamma(a) for real a > 0.

    Relative accuracy is kept near the roots at a = 1 and a = 2 by
    expanding around them with zeta-function coefficients; large arguments
    use the Stirling series.
    """
    a = _check_shape(a)
    if a < 0.5:
        return _lgamma_1p(a) - math.log(a)
    if a < 1.5:
        return _lgamma_1p(a - 1.0)
    if a < 2.5:
        return _lgamma_2p(a - 2.0)
    if a < 15.0:
        n = int(a - 1.5)
        base = a - n
        prod = 1.0
        for i in range(n):
            prod *= base + i
        return _lgamma_2p(base - 2.0) + math.log(prod)
    return (a - 0.5) * math.log(a) - a + _HALF_LOG_2PI + _stirling_correction(a)


# ---------------------------------------------------------------------------
# regularized incomplete gamma


def _log_prefactor(a: float, x: float) -> float:
    """log(x^a e^-x / Gamma(a)), evaluated around x = a for large a."""
    if a < 10.0:
        return a * math.log(x) - x - ln_gamma(a)
    d = (x - a) / a
    if abs(d) < 0.3:
        # d - log1p(d) by its alternating series to avoid cancellation
        term = d
        acc = 0.0
        k = 2
        while True:
            term *= -d
            inc = -term / k
            acc += inc
            if abs(inc) <= _EPS * abs(acc):
                break
            k += 1
        dm = acc
    else:
        t = x / a
        dm = (t - 1.0) - math.log(t)
    return -a * dm + 0.5 * math.log(a / (2.0 * math.pi)) - _stirling_correction(a)


def _lower_series(a: float, x: float) -> float:
    """sum_n x^n / ((a)(a+1)...(a+n)); gamma(a, x) = x^a e^-x times this."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_SERIES_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if term < total * _EPS:
            return total
    raise ConvergenceError(f"lower incomplete gamma series did not converge (a={a}, x={x})")


def _upper_cf(a: float, x: float) -> float:
    """Continued fraction h with Gamma(a, x) = x^a e^-x h (modified Lentz)."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _SERIES_MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ConvergenceError(f"upper incomplete gamma fraction did not converge (a={a}, x={x})")


def _log_pq(a: float, x: float) -> tuple[float, float, bool]:
    """(log P, log Q, lower_is_direct) for x > 0."""
    log_pref = _log_prefactor(a, x)
    if x < a + 1.0:
        log_p = log_pref + math.log(_lower_series(a, x))
        p = math.exp(log_p)
        log_q = math.log1p(-p) if p < 1.0 else -math.inf
        return log_p, log_q, True
    log_q = log_pref + math.log(_upper_cf(a, x))
    q = math.exp(log_q)
    log_p = math.log1p(-q) if q < 1.0 else -math.inf
    return log_p, log_q, False


def reg_gamma_pair(a: float, x: float) -> tuple[float, float]:
    """Return (P(a, x), Q(a, x)).

    The member evaluated directly carries full relative accuracy; the other
    is its complement.
    """
    a = _check_shape(a)
    x = _check_x(x)
    if x == 0.0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    log_pref = _log_prefactor(a, x)
    if x < a + 1.0:
        p = math.exp(log_pref) * _lower_series(a, x)
        p = min(p, 1.0)
        return p, 1.0 - p
    q = math.exp(log_pref) * _upper_cf(a, x)
    q = min(q, 1.0)
    return 1.0 - q, q


def reg_lower_gamma(a: float, x: float) -> float:
    """P(a, x) = gamma(a, x) / Gamma(a)."""
    return reg_gamma_pair(a, x)[0]


def reg_upper_gamma(a: float, x: float) -> float:
    """Q(a, x) = Gamma(a, x) / Gamma(a)."""
    return reg_gamma_pair(a, x)[1]


def log_reg_upper_gamma(a: float, x: float) -> float:
    """log Q(a, x); stays finite where Q itself underflows."""
    a = _check_shape(a)
    x = _check_x(x)
    if x == 0.0:
        return 0.0
    return _log_pq(a, x)[1]


def lower_gamma(a: float, x: float) -> float:
    """Unregularized gamma(a, x). Raises OverflowError when Gamma(a) overflows."""
    p = reg_lower_gamma(a, x)
    if p == 0.0:
        return 0.0
    return math.exp(math.log(p) + ln_gamma(a))


def upper_gamma(a: float, x: float) -> float:
    """Unregularized Gamma(a, x). Raises OverflowError when Gamma(a) overflows."""
    q = reg_upper_gamma(a, x)
    if q == 0.0:
        return 0.0
    return math.exp(math.log(q) + ln_gamma(a))


# below this log x the argument itself underflows; P = x^a / Gamma(a + 1)
# to a relative x / (a + 1), far below eps
_LOG_X_SMALL = -700.0


def reg_gamma_pair_log(a: float, log_x: float) -> tuple[float, float]:
    """(P(a, x), Q(a, x)) given log x; -inf stands for x = 0."""
    a = _check_shape(a)
    if math.isnan(log_x):
        raise DomainError("log x must not be NaN")
    if log_x < _LOG_X_SMALL:
        p = math.exp(a * log_x - ln_gamma(a + 1.0))
        return p, 1.0 - p
    return reg_gamma_pair(a, math.exp(log_x) if log_x < 709.0 else math.inf)


# ---------------------------------------------------------------------------
# inverse of P(a, .)


def inv_reg_lower_gamma(a: float, p: float, accuracy: Accuracy = DEFAULT_ACCURACY) -> float:
    """Solve P(a, x) = p for x >= 0.

    Newton iteration runs on log x against log P (or, for p > 0.99, against
    log Q with target 1 - p, which is exact in floating point there), kept
    inside a bracket and falling back to bisection in log x whenever a step
    leaves it. For very small shapes the root can lie below the double
    range; it is then returned as 0.0 and :func:`log_inv_reg_lower_gamma`
    still carries it.
    """
    a = _check_shape(a)
    p = _check_finite("p", p)
    if p < 0.0 or p >= 1.0:
        raise DomainError(f"p must lie in [0, 1), got {p!r}")
    if p == 0.0:
        return 0.0
    return math.exp(log_inv_reg_lower_gamma(a, p, accuracy))


def log_inv_reg_lower_gamma(a: float, p: float, accuracy: Accuracy = DEFAULT_ACCURACY) -> float:
    """log x for the root of P(a, x) = p, 0 < p < 1."""
    a = _check_shape(a)
    p = _check_finite("p", p)
    if p <= 0.0 or p >= 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")

    upper_side = p > 0.99
    lgam = ln_gamma(a)
    if upper_side:
        log_target = math.log1p(-p)
    else:
        log_target = math.log(p)

    def residual(u: float) -> tuple[float, float]:
        # (h(u), h'(u)) with h increasing in u = log x and zero at the root
        x = math.exp(u)
        if u < _LOG_X_SMALL:
            # P = x^a / Gamma(a + 1) to within a relative x/(a+1), far below eps here
            log_p = a * u - ln_gamma(a + 1.0)
            log_q = math.log1p(-math.exp(log_p))
        else:
            log_p, log_q, _ = _log_pq(a, x)
        log_dens = a * u - x - lgam  # log(x * density)
        if upper_side:
            if log_q == -math.inf:
                return math.inf, 1.0
            return log_target - log_q, math.exp(log_dens - log_q)
        if log_p == -math.inf:
            return -math.inf, 1.0
        return log_p - log_target, math.exp(log_dens - log_p)

    # starting point: small-x asymptote P ~ x^a / Gamma(a+1), clipped to a sane range
    if upper_side:
        u = math.log(max(a, -log_target))
    else:
        u0 = (log_target + ln_gamma(a + 1.0)) / a
        u = min(u0, math.log(a + 1.0))

    h, dh = residual(u)
    if h == 0.0:
        return u
    lo = hi = u
    step = 1.0
    if h < 0.0:
        h_lo = h
        while True:
            hi = lo + step
            h_hi, _ = residual(hi)
            if h_hi >= 0.0:
                break
            lo, h_lo = hi, h_hi
            step *= 2.0
            if hi > 710.0:
                raise ConvergenceError(f"could not bracket P(a, x) = {p} for a = {a}")
    else:
        h_hi = h
        while True:
            lo = hi - step
            h_lo, _ = residual(lo)
            if h_lo <= 0.0:
                break
            hi, h_hi = lo, h_lo
            step *= 2.0
            if lo < -1e9:
                raise ConvergenceError(f"could not bracket P(a, x) = {p} for a = {a}")

    converged = False
    for _ in range(accuracy.max_iter):
        if h == 0.0:
            converged = True
            break
        if h < 0.0:
            lo = max(lo, u)
        else:
            hi = min(hi, u)
        u_new = u - h / dh if (dh > 0.0 and math.isfinite(h)) else math.nan
        if not (lo < u_new < hi):
            u_new = 0.5 * (lo + hi)
        delta = u_new - u
        u = u_new
        h, dh = residual(u)
        if abs(delta) <= accuracy.rel_tol:
            converged = True
            break
        if hi - lo <= 4.0 * _EPS * max(1.0, abs(u)):
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"inversion of P(a, x) = {p} for a = {a} did not converge in {accuracy.max_iter} steps"
        )
    # one polishing step; quadratic convergence takes it to working precision
    if h != 0.0 and dh > 0.0 and math.isfinite(h):
        u_new = u - h / dh
        if abs(u_new - u) <= accuracy.rel_tol:
            u = u_new
    return u


# ---------------------------------------------------------------------------
# error function

_TWO_OVER_SQRT_PI = 1.1283791670955126


def erf(x: float) -> float:
    """Error function; defers to the C library, which is independent of the gamma code."""
    x = _check_finite("x", x)
    return math.erf(x)


def erfc(x: float) -> float:
    x = _check_finite("x", x)
    return math.erfc(x)


def _erf_inv_guess(p: float) -> float:
    # Giles (2010), "Approximating the erfinv function", single-precision branch
    w = -math.log((1.0 - p) * (1.0 + p))
    if w < 5.0:
        w -= 2.5
        r = 2.81022636e-08
        for c in (3.43273939e-07, -3.5233877e-06, -4.39150654e-06, 0.00021858087,
                  -0.00125372503, -0.00417768164, 0.246640727, 1.50140941):
            r = c + r * w
    else:
        w = math.sqrt(w) - 3.0
        r = -0.000200214257
        for c in (0.000100950558, 0.00134934322, -0.00367342844, 0.00573950773,
                  -0.0076224613, 0.00943887047, 1.00167406, 2.83297682):
            r = c + r * w
    return r * p


def erf_inv(p: float) -> float:
    """Inverse error function on (-1, 1).

    A rational first guess is polished by Newton steps against erf, or
    against erfc in the tails where 1 - |p| carries the information.
    """
    p = _check_finite("p", p)
    if not (-1.0 < p < 1.0):
        raise DomainError(f"erf_inv needs -1 < p < 1, got {p!r}")
    if p == 0.0:
        return 0.0
    sign = 1.0 if p > 0.0 else -1.0
    ap = abs(p)
    x = _erf_inv_guess(ap)
    tail = ap > 0.5
    q = 1.0 - ap  # exact for ap >= 0.5
    for _ in range(8):
        dens = _TWO_OVER_SQRT_PI * math.exp(-x * x)
        if tail:
            f = q - math.erfc(x)
        else:
            f = math.erf(x) - ap
        # Halley correction: erf'' = -2x erf'
        step = f / dens
        step = step / (1.0 + x * step)
        x -= step
        if abs(step) <= 2.0 * _EPS * abs(x):
            break
    return sign * x
