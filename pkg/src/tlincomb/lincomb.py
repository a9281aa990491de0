"""Exact statistics of Z = sum_i sigma_i T_i for independent Student-t terms.

Second moment, fourth moment, characteristic function for any K, and the
first absolute moment for K = 2: the general series assembly plus the
i.i.d. closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, MomentError, UnsupportedError
from .specfun import Accuracy, DEFAULT_ACCURACY, gauss_2f1, log_beta, log_gamma
from .tdist import ScaledT, log_cf

__all__ = [
    "TTerm",
    "LinComb",
    "SeriesDiag",
    "ABS_SERIES_ACCURACY",
    "second_moment",
    "fourth_moment",
    "cf_z",
    "abs_moment_k2",
    "abs_moment_iid",
    "abs_series_terms",
]


@dataclass(frozen=True)
class TTerm:
    """One addend sigma * T(nu) of the combination.

    Construction requires nu > 0 so characteristic-function work covers the
    whole t family; every moment-based operation additionally demands
    nu > 2 (the standing constraint of the fitting problem) and raises
    MomentError below it.
    """

    sigma: float
    nu: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not self.nu > 0.0:
            raise DomainError(f"nu must be positive, got {self.nu}")


@dataclass(frozen=True)
class LinComb:
    """Ordered terms of Z = sum_i sigma_i T_i; the T_i are independent."""

    terms: tuple[TTerm, ...]

    def __post_init__(self):
        if len(self.terms) < 1:
            raise DomainError("LinComb needs at least one term")

    @classmethod
    def from_pairs(cls, pairs) -> "LinComb":
        """Build from an iterable of (sigma, nu) pairs."""
        return cls(tuple(TTerm(float(s), float(n)) for s, n in pairs))

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SeriesDiag:
    """Truncation record of the absolute-moment series.

    last_rel_term is the estimated remaining tail relative to the partial
    sum (the term weighted by its index, since the terms decay by a power
    law rather than geometrically); converged means it reached rel_tol.
    """

    terms_used: int
    last_rel_term: float
    converged: bool


def _require_nu_above(zc: LinComb, bound: float, what: str):
    for t in zc.terms:
        if t.nu <= bound:
            raise MomentError(f"{what} requires nu > {bound}, got nu={t.nu}")


def second_moment(zc: LinComb) -> float:
    """E[Z^2] = sum sigma_i^2 nu_i / (nu_i - 2); needs every nu_i > 2."""
    _require_nu_above(zc, 2.0, "second_moment")
    return sum(t.sigma ** 2 * t.nu / (t.nu - 2.0) for t in zc.terms)


def fourth_moment(zc: LinComb) -> float:
    """E[Z^4] by the multinomial expansion; needs every nu_i > 4.

    Odd moments vanish and the terms are independent, so only the pure
    fourth moments and the 6 * E[T_i^2] E[T_j^2] cross terms survive.
    """
    _require_nu_above(zc, 4.0, "fourth_moment")
    m2 = [t.sigma ** 2 * t.nu / (t.nu - 2.0) for t in zc.terms]
    m4 = [t.sigma ** 4 * 3.0 * t.nu ** 2 / ((t.nu - 2.0) * (t.nu - 4.0))
          for t in zc.terms]
    total = sum(m4)
    for i in range(len(zc.terms)):
        for j in range(i + 1, len(zc.terms)):
            total += 6.0 * m2[i] * m2[j]
    return total


def cf_z(zc: LinComb, r: float) -> float:
    """CF of Z at r: the product of per-term t CFs, assembled in log space."""
    if r == 0.0:
        return 1.0
    log_total = sum(log_cf(ScaledT(t.sigma, t.nu), r) for t in zc.terms)
    return math.exp(min(log_total, 0.0))


# ---------------------------------------------------------------------------
# absolute moment, K = 2
# ---------------------------------------------------------------------------

# The series terms decay like i^(-5/2); reaching a truly tiny tail is
# expensive, so the default is looser than the geometric-series default
# and the cap far larger.
ABS_SERIES_ACCURACY = Accuracy(rel_tol=1e-8, max_terms=5_000_000)

_BLOCK = 8192
_INNER_CAP = 100_000
_MAX_Z = 0.997


def _f21_ladder(a: float, bvec: np.ndarray, z: float) -> np.ndarray:
    """2F1(a, B; B+1; z) for an ascending vector of B at fixed a, z < 1.

    z <= 0 goes through the Pfaff map (argument w = z/(z-1) in [0,1)); the
    term ratio is then below max(w, a w/(B+1)) < 1 for the parameter family
    here (B+1 > a always).  For z in (0,1) the Euler map keeps the series
    convergent, switching back to the Pfaff form where B is large enough
    for it to converge fast.
    """
    if z == 0.0:
        return np.ones_like(bvec)
    if z < 0.0:
        return _ladder_pfaff(a, bvec, z)
    w_abs = z / (1.0 - z)
    thresh = 2.0 * w_abs * (a + 60.0)
    out = np.empty_like(bvec)
    big = bvec >= thresh
    if np.any(~big):
        out[~big] = _ladder_euler(a, bvec[~big], z)
    if np.any(big):
        out[big] = _ladder_pfaff(a, bvec[big], z)
    return out


def _ladder_pfaff(a: float, bvec: np.ndarray, z: float) -> np.ndarray:
    w = z / (z - 1.0)
    pref = math.exp(-a * math.log1p(-z))
    mult = np.full_like(bvec, pref)
    total = mult.copy()
    tail = abs(w) / (1.0 - abs(w)) if abs(w) < 1.0 else np.inf
    prev_max = np.inf
    for n in range(_INNER_CAP):
        mult = mult * ((a + n) * w / (bvec + 1.0 + n))
        total += mult
        mmax = np.max(np.abs(mult))
        if w < 0.0 and mmax >= prev_max:
            # alternating asymptotic regime: truncate at the smallest term
            break
        prev_max = mmax
        if mmax * min(tail, n + 1.0) <= 1e-15 * np.min(total):
            return total
    else:
        raise ConvergenceError(
            f"2F1 ladder did not converge (a={a}, z={z}); the swapped term "
            "order usually converges faster"
        )
    return total


def _ladder_euler(a: float, bvec: np.ndarray, z: float) -> np.ndarray:
    pref = math.exp((1.0 - a) * math.log1p(-z))
    mult = np.full_like(bvec, pref)
    total = mult.copy()
    tail = z / (1.0 - z)
    for n in range(_INNER_CAP):
        mult = mult * ((bvec + 1.0 - a + n) * z / (bvec + 1.0 + n))
        total += mult
        if np.max(mult) * tail <= 1e-15 * np.min(total):
            return total
    raise ConvergenceError(
        f"2F1 ladder did not converge (a={a}, z={z}); the swapped term "
        "order usually converges faster"
    )


def _series_blocks(t1: TTerm, t2: TTerm, acc: Accuracy):
    """Generate (index array, term array) blocks of the I22' series."""
    n1, n2 = t1.nu, t2.nu
    z = 1.0 - n2 * t2.sigma ** 2 / (n1 * t1.sigma ** 2)  # = -omega2
    if z > _MAX_Z:
        raise ConvergenceError(
            f"absolute-moment series is outside its supported contrast range "
            f"(nu2 sigma2^2 / (nu1 sigma1^2) = {1.0 - z:.3g}); swap the terms"
        )
    a = (n2 + 1.0) / 2.0
    gam_ratio = math.sqrt(math.pi)  # Gamma(i + 1/2) / i! at i = 0
    start = 0
    while start < acc.max_terms:
        idx = np.arange(start, min(start + _BLOCK, acc.max_terms), dtype=float)
        ratios = np.empty_like(idx)
        ratios[0] = 1.0
        ratios[1:] = (idx[:-1] + 0.5) / (idx[:-1] + 1.0)
        gam = gam_ratio * np.cumprod(ratios)
        bvec = (n1 + n2 + 2.0 * idx - 1.0) / 2.0
        f_vals = _f21_ladder(a, bvec, z)
        terms = gam * f_vals / ((n1 + 2.0 * idx) * (n1 + n2 + 2.0 * idx - 1.0))
        yield idx, terms
        gam_ratio = gam[-1] * (idx[-1] + 0.5) / (idx[-1] + 1.0)
        start += _BLOCK


def _i22_sum(t1: TTerm, t2: TTerm, acc: Accuracy):
    """Tail-aware truncated sum of the I22' series with diagnostics."""
    total = 0.0
    for idx, terms in _series_blocks(t1, t2, acc):
        partial = total + np.cumsum(terms)
        tail_rel = np.abs(terms) * (idx + 1.0) / np.abs(partial)
        done = (tail_rel <= acc.rel_tol) & (idx >= 5)
        hit = np.nonzero(done)[0]
        if hit.size:
            j = hit[0]
            diag = SeriesDiag(int(idx[j]) + 1, float(tail_rel[j]), True)
            return float(partial[j]), diag
        total = float(partial[-1])
    diag = SeriesDiag(int(idx[-1]) + 1, float(tail_rel[-1]), False)
    raise ConvergenceError(
        f"absolute-moment series needs more than {acc.max_terms} terms "
        f"at rel_tol={acc.rel_tol}", diagnostics=diag)


def abs_moment_k2(t1: TTerm, t2: TTerm,
                  acc: Accuracy = ABS_SERIES_ACCURACY) -> tuple[float, SeriesDiag]:
    """E|sigma1 T1 + sigma2 T2| for independent t terms with nu > 2.

    Assembles 2 sigma1 I1 + 2 sigma2 (I21 - alpha_nu2 I22') where I1 is a
    single hypergeometric evaluation and I22' is the truncated series; the
    returned diagnostics describe the truncation.
    """
    for t in (t1, t2):
        if t.nu <= 2.0:
            raise MomentError(f"abs_moment_k2 requires nu > 2, got nu={t.nu}")
    s1, n1 = t1.sigma, t1.nu
    s2, n2 = t2.sigma, t2.nu

    log_a1 = log_gamma((n1 + 1.0) / 2.0) - log_gamma(n1 / 2.0) - 0.5 * math.log(n1 * math.pi)
    log_a2 = log_gamma((n2 + 1.0) / 2.0) - log_gamma(n2 / 2.0) - 0.5 * math.log(n2 * math.pi)

    z1 = 1.0 - n1 * s1 ** 2 / (n2 * s2 ** 2)
    f1 = gauss_2f1((n2 + 1.0) / 2.0, 0.5, (n1 + n2) / 2.0, z1)
    i1 = math.exp(log_a1 + log_a2 + log_beta(0.5, (n1 + n2 - 1.0) / 2.0)) \
        * f1 * n1 ** 1.5 * s1 / ((n1 - 1.0) * s2)

    i21 = 0.5 * math.sqrt(n2 / math.pi) * math.exp(
        log_gamma((n2 - 1.0) / 2.0) - log_gamma(n2 / 2.0))

    series_sum, diag = _i22_sum(t1, t2, acc)
    omega1 = (n1 * s1 ** 2 / s2 ** 2) ** (-(n2 - 1.0) / 2.0) * n2 ** ((n2 + 1.0) / 2.0)
    i22p = 2.0 * omega1 / (math.sqrt(math.pi) * math.exp(log_beta(n1 / 2.0, 0.5))) \
        * series_sum

    value = 2.0 * s1 * i1 + 2.0 * s2 * (i21 - math.exp(log_a2) * i22p)
    return value, diag


def abs_series_terms(t1: TTerm, t2: TTerm, n_terms: int) -> np.ndarray:
    """First n_terms terms of the I22' series, for truncation diagnostics."""
    acc = Accuracy(rel_tol=1e-7, max_terms=max(int(n_terms), 100))
    chunks = []
    seen = 0
    for _, terms in _series_blocks(t1, t2, acc):
        chunks.append(terms)
        seen += terms.size
        if seen >= n_terms:
            break
    return np.concatenate(chunks)[:n_terms]


def abs_moment_iid(sigma: float, nu: float, K: int = 2) -> float:
    """Closed-form E|Z| for the sum of K i.i.d. terms; derived only for K = 2."""
    if K != 2:
        raise UnsupportedError(f"the i.i.d. closed form covers K=2 only, got K={K}")
    if not sigma > 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if nu <= 2.0:
        raise MomentError(f"abs_moment_iid requires nu > 2, got nu={nu}")
    log_val = log_gamma((nu - 1.0) / 2.0) + log_gamma(nu - 0.5) \
        - (nu - 2.0) * math.log(2.0) - 3.0 * log_gamma(nu / 2.0)
    return sigma * math.sqrt(nu) * math.exp(log_val)
