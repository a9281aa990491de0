"""Self-contained real-valued special functions.

Everything here is built from elementary operations only (exp, log, sqrt,
trig); no special-function library is imported.  These kernels back the
Student-t density, CDF, characteristic function and the absolute-moment
series of the rest of the package.

``reg_inc_beta`` accepts scalar or ndarray ``x`` (the CDF hot path needs
bulk evaluation); the remaining functions are scalar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "Accuracy",
    "DEFAULT_ACCURACY",
    "log_gamma",
    "log_beta",
    "reg_inc_beta",
    "bessel_k",
    "bessel_k_scaled",
    "log_bessel_k",
    "gauss_2f1",
]


@dataclass(frozen=True)
class Accuracy:
    """Truncation control for series and continued fractions.

    rel_tol bounds the relative size of the truncation remainder estimate;
    max_terms caps the number of terms/iterations before giving up.
    """

    rel_tol: float = 1e-12
    max_terms: int = 100_000

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-6):
            raise DomainError(f"rel_tol must be in (0, 1e-6], got {self.rel_tol}")
        if self.max_terms < 100:
            raise DomainError(f"max_terms must be >= 100, got {self.max_terms}")


DEFAULT_ACCURACY = Accuracy()

_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# B_{2n} / (2n (2n-1)) for the Stirling tail, n = 1..7
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0 via the Stirling series with argument shift."""
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    shift = 0.0
    y = float(x)
    while y < 12.0:
        shift += math.log(y)
        y += 1.0
    inv2 = 1.0 / (y * y)
    tail = 0.0
    for coef in reversed(_STIRLING):
        tail = tail * inv2 + coef
    return (y - 0.5) * math.log(y) - y + _LN_SQRT_2PI + tail / y - shift


def log_beta(a: float, b: float) -> float:
    """ln B(a, b) for a, b > 0."""
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


# ---------------------------------------------------------------------------
# regularized incomplete beta
# ---------------------------------------------------------------------------


def _beta_cf(a, b, x, acc):
    """Lentz evaluation of the incomplete-beta continued fraction.

    x is an ndarray with every element on the convergent side of the
    a-b symmetry switch.
    """
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    np.copyto(d, tiny, where=np.abs(d) < tiny)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, acc.max_terms + 1):
        m2 = 2 * m
        coef = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coef * d
        np.copyto(d, tiny, where=np.abs(d) < tiny)
        c = 1.0 + coef / c
        np.copyto(c, tiny, where=np.abs(c) < tiny)
        d = 1.0 / d
        h *= d * c
        coef = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coef * d
        np.copyto(d, tiny, where=np.abs(d) < tiny)
        c = 1.0 + coef / c
        np.copyto(c, tiny, where=np.abs(c) < tiny)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.max(np.abs(delta - 1.0)) < acc.rel_tol:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge for a={a}, b={b}"
    )


def reg_inc_beta(x, a: float, b: float, acc: Accuracy = DEFAULT_ACCURACY):
    """Regularized incomplete beta I_x(a, b); x may be a scalar or ndarray.

    Uses the continued fraction on the convergent side of the switch
    x < (a+1)/(a+b+2) and the symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    on the other side.
    """
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"reg_inc_beta requires a, b > 0, got a={a}, b={b}")
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if np.any((xs < 0.0) | (xs > 1.0)) or np.any(np.isnan(xs)):
        raise DomainError("reg_inc_beta requires 0 <= x <= 1")

    out = np.empty_like(xs)
    at_zero = xs == 0.0
    at_one = xs == 1.0
    out[at_zero] = 0.0
    out[at_one] = 1.0

    interior = ~(at_zero | at_one)
    direct = interior & (xs < (a + 1.0) / (a + b + 2.0))
    swapped = interior & ~direct

    lbeta = log_beta(a, b)
    if np.any(direct):
        xd = xs[direct]
        front = np.exp(a * np.log(xd) + b * np.log1p(-xd) - lbeta) / a
        out[direct] = front * _beta_cf(a, b, xd, acc)
    if np.any(swapped):
        xw = 1.0 - xs[swapped]
        front = np.exp(b * np.log(xw) + a * np.log1p(-xw) - lbeta) / b
        out[swapped] = 1.0 - front * _beta_cf(b, a, xw, acc)

    np.clip(out, 0.0, 1.0, out=out)
    if scalar:
        return float(out[0])
    return out


# ---------------------------------------------------------------------------
# modified Bessel function of the second kind, real order
# ---------------------------------------------------------------------------

# Taylor coefficients of 1/Gamma(1+t) = sum c_k t^(k-1)  (A&S 6.1.34)
_INV_GAMMA_C = (
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
)

_MAX_EXP = 700.0
_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)


def _temme_gammas(mu: float):
    """gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu) for |mu| <= 0.5."""
    gampl = math.exp(-log_gamma(1.0 + mu)) if mu > -1.0 else 0.0
    gammi = math.exp(-log_gamma(1.0 - mu))
    if abs(mu) < 0.01:
        # odd part of 1/Gamma(1+t) by series; direct difference cancels
        c = _INV_GAMMA_C
        mu2 = mu * mu
        gam1 = -(c[1] + mu2 * (c[3] + mu2 * (c[5] + mu2 * (c[7] + mu2 * c[9]))))
    else:
        gam1 = (gammi - gampl) / (2.0 * mu)
    gam2 = 0.5 * (gammi + gampl)
    return gam1, gam2, gampl, gammi


def _k_pair_series(mu: float, x: float, acc: Accuracy):
    """(K_mu, K_{mu+1}) for |mu| <= 0.5, 0 < x <= 2, by Temme's series."""
    half_x = 0.5 * x
    pimu = math.pi * mu
    fact = pimu / math.sin(pimu) if abs(pimu) > 1e-15 else 1.0
    d = -math.log(half_x)
    e = mu * d
    fact2 = math.sinh(e) / e if abs(e) > 1e-15 else 1.0
    gam1, gam2, gampl, gammi = _temme_gammas(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    ee = math.exp(e)
    p = 0.5 * ee / gampl
    q = 0.5 / (ee * gammi)
    c = 1.0
    d2 = half_x * half_x
    total1 = p
    for i in range(1, acc.max_terms + 1):
        ff = (i * ff + p + q) / (i * i - mu * mu)
        c *= d2 / i
        p /= i - mu
        q /= i + mu
        delta = c * ff
        total += delta
        total1 += c * (p - i * ff)
        if abs(delta) < abs(total) * 1e-16:
            return total, total1 * (2.0 / x)
    raise ConvergenceError(f"bessel_k series did not converge for mu={mu}, x={x}")


def _k_pair_cf2(mu: float, x: float, acc: Accuracy):
    """(K_mu * e^x, K_{mu+1} * e^x) for |mu| <= 0.5, x > 2, by Steed's CF2."""
    mu2 = mu * mu
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d
    delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu2
    q = a1
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, acc.max_terms + 1):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < 1e-16:
            break
    else:
        raise ConvergenceError(f"bessel_k CF2 did not converge for mu={mu}, x={x}")
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) / s
    kmu1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, kmu1


def bessel_k_scaled(order: float, x: float, acc: Accuracy = DEFAULT_ACCURACY):
    """K_order(x) as (mantissa, exponent) with K = mantissa * exp(exponent).

    Valid for order > 0, x > 0; the split representation keeps very large
    orders (small arguments) and very large arguments representable.
    """
    if not x > 0.0:
        raise DomainError(f"bessel_k requires x > 0, got {x}")
    if not order > 0.0:
        raise DomainError(f"bessel_k requires order > 0, got {order}")
    nl = int(order + 0.5)
    mu = order - nl
    if x <= 2.0:
        kmu, kmu1 = _k_pair_series(mu, x, acc)
        expo = 0.0
    else:
        kmu, kmu1 = _k_pair_cf2(mu, x, acc)
        expo = -x
    for j in range(1, nl + 1):
        kmu, kmu1 = kmu1, kmu + (2.0 * (mu + j) / x) * kmu1
        if abs(kmu1) > _RESCALE:
            kmu /= _RESCALE
            kmu1 /= _RESCALE
            expo += _LOG_RESCALE
    return kmu, expo


def bessel_k(order: float, x: float, acc: Accuracy = DEFAULT_ACCURACY) -> float:
    """K_order(x) as a plain float; overflows for extreme order/argument."""
    mant, expo = bessel_k_scaled(order, x, acc)
    log_k = math.log(mant) + expo
    if log_k > _MAX_EXP:
        raise OverflowError(
            f"bessel_k({order}, {x}) exceeds the double range (ln K = {log_k:.1f})"
        )
    return mant * math.exp(expo) if abs(expo) < _MAX_EXP else math.exp(log_k)


def log_bessel_k(order: float, x: float, acc: Accuracy = DEFAULT_ACCURACY) -> float:
    """ln K_order(x); the form consumed by characteristic-function assembly."""
    mant, expo = bessel_k_scaled(order, x, acc)
    return math.log(mant) + expo


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1 for z <= 1
# ---------------------------------------------------------------------------

_EULER_SWITCH = 0.95


def _f21_series(a, b, c, z, acc):
    # the term ratio tends to z, so the remainder after term_n is roughly
    # term_n * z/(1-z); weight the stop test accordingly
    tail_factor = max(1.0, abs(z) / (1.0 - abs(z)))
    total = 1.0
    term = 1.0
    small = 0
    for n in range(acc.max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if abs(term) * tail_factor <= acc.rel_tol * abs(total):
            small += 1
            if small >= 2 and n >= 2:
                return total
        else:
            small = 0
    raise ConvergenceError(
        f"2F1 series did not converge for a={a}, b={b}, c={c}, z={z}"
    )


def _f21_inner(a, b, c, z, acc):
    """Series for 0 <= z < 1 with the Euler map applied near z = 1."""
    if z >= _EULER_SWITCH:
        # 2F1(a,b;c;z) = (1-z)^(c-a-b) 2F1(c-a, c-b; c; z)
        return math.exp((c - a - b) * math.log1p(-z)) * _f21_series(
            c - a, c - b, c, z, acc
        )
    return _f21_series(a, b, c, z, acc)


def gauss_2f1(a: float, b: float, c: float, z: float,
              acc: Accuracy = DEFAULT_ACCURACY) -> float:
    """2F1(a, b; c; z) for real parameters, c > 0 and z <= 1.

    Negative z is mapped into [0, 1) by the Pfaff transformation
    2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)); arguments close
    to 1 are regularized with the Euler transformation.
    """
    if not c > 0.0:
        raise DomainError(f"gauss_2f1 requires c > 0, got c={c}")
    if z > 1.0:
        raise DomainError(f"gauss_2f1 requires z <= 1, got z={z}")
    if z == 0.0:
        return 1.0
    if z == 1.0:
        s = c - a - b
        if s <= 0.0:
            raise DomainError("2F1 at z=1 diverges unless c - a - b > 0")
        if min(c - a, c - b) <= 0.0:
            raise DomainError("2F1 at z=1 needs c-a, c-b > 0 for the Gauss sum")
        return math.exp(log_gamma(c) + log_gamma(s) - log_gamma(c - a) - log_gamma(c - b))
    if z < 0.0:
        w = z / (z - 1.0)
        return math.exp(-a * math.log1p(-z)) * _f21_inner(a, c - b, c, w, acc)
    return _f21_inner(a, b, c, z, acc)
