"""Fit Z = sum sigma_i T_i to a single scaled Student-t law.

Two proposed routes: second + first-absolute moment matching (closed form
for a pair, iterated for K > 2) and second moment + characteristic-function
matching (closed form at the canonical r, bisection at general r).  A
second + fourth moment benchmark completes the set.

The closed forms carry the published constants verbatim, including the
h-approximation whose denominator constant is algebraically -sqrt(pi)
(the accompanying text states -sqrt(3); ``refit_rational`` measures which
one the data favors).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, InfeasibleFitError, MomentError, NoSolutionError
from .lincomb import (
    ABS_SERIES_ACCURACY,
    LinComb,
    SeriesDiag,
    TTerm,
    abs_moment_k2,
    cf_z,
    fourth_moment,
    second_moment,
)
from .specfun import Accuracy, log_bessel_k, log_gamma
from .tdist import ScaledT

__all__ = [
    "ABS_MOMENT", "CF_CLOSED", "CF_BISECT", "MOMENT4",
    "FitReport", "RationalApprox", "BisectTrace",
    "h_exact", "g_exact",
    "fit_absmoment_k2", "fit_absmoment_iter",
    "fit_cf_closed", "fit_cf_bisect", "fit_moment4",
    "refit_rational",
    "G_P1", "G_P2", "G_P3", "G_SIGMA_NUM", "G_SIGMA_SLOPE",
    "H_P1", "H_P2", "H_P3_TEXT",
    "NU_MAX", "NU_EPS",
]

ABS_MOMENT = "ABS_MOMENT"
CF_CLOSED = "CF_CLOSED"
CF_BISECT = "CF_BISECT"
MOMENT4 = "MOMENT4"

# h-approximation: h(nu) ~ (p1 nu + p2)/(nu + p3)
H_P1 = math.sqrt(2.0)
H_P2 = -2.0 * math.sqrt(2.0)
H_P3_TEXT = -math.sqrt(3.0)  # the text constant; the closed form embeds -sqrt(pi)

# g-approximation constants of the CF closed form
G_P1 = 0.607
G_P2 = -0.7606
G_P3 = -1.5466
G_SIGMA_NUM = 1.6775   # = -G_P2 / (2 G_P1 + G_P2 - 2)
G_SIGMA_SLOPE = 3.4111  # = -G_P3 / (2 G_P1 + G_P2 - 2)

NU_EPS = 1e-6
NU_MAX = 1e4

# fits only need the absolute moment to a few ppm; the tighter library
# default would burn millions of series terms per iteration step
FIT_SERIES_ACCURACY = Accuracy(rel_tol=1e-7, max_terms=2_000_000)

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class BisectTrace:
    """Bracketing record of a CF bisection solve."""

    iterations: int
    bracket_width: float
    capped: bool = False


@dataclass(frozen=True)
class FitReport:
    """A fitted scaled-t law plus how it was obtained."""

    fitted: ScaledT
    method: str
    r_used: float | None = None
    iterations: int = 0
    diagnostics: SeriesDiag | BisectTrace | None = None

    def __post_init__(self):
        if self.fitted.nu <= 2.0:
            raise DomainError(f"fitted nu must exceed 2, got {self.fitted.nu}")


@dataclass(frozen=True)
class RationalApprox:
    """(p1 nu + p2)/(nu + p3), the shape used for both h and g."""

    p1: float
    p2: float
    p3: float

    def __post_init__(self):
        if self.p3 <= -2.0:
            raise DomainError("p3 <= -2 puts the pole inside the nu > 2 domain")

    def __call__(self, nu):
        return (self.p1 * np.asarray(nu, dtype=float) + self.p2) / (np.asarray(nu, dtype=float) + self.p3)


def h_exact(nu_z: float) -> float:
    """Gamma((nu-1)/2) sqrt(nu-2) / Gamma(nu/2): the absolute-moment matching map."""
    if not nu_z > 2.0:
        raise DomainError(f"h_exact requires nu_z > 2, got {nu_z}")
    return math.exp(log_gamma((nu_z - 1.0) / 2.0) - log_gamma(nu_z / 2.0)) \
        * math.sqrt(nu_z - 2.0)


def g_exact(nu_z: float, rE: float) -> float:
    """CF of the second-moment-matched scaled t, as a function of nu_z.

    rE is |r| sqrt(E[Z^2]); g decreases from 1 at nu_z -> 2+ to
    exp(-rE^2/2) as nu_z -> infinity.
    """
    if not nu_z > 2.0:
        raise DomainError(f"g_exact requires nu_z > 2, got {nu_z}")
    if not rE > 0.0:
        raise DomainError(f"g_exact requires rE > 0, got {rE}")
    x = rE * math.sqrt(nu_z - 2.0)
    half = nu_z / 2.0
    val = half * math.log(x) + log_bessel_k(half, x) - (half - 1.0) * _LN2 \
        - log_gamma(half)
    return math.exp(min(val, 0.0))


# ---------------------------------------------------------------------------
# absolute-moment path
# ---------------------------------------------------------------------------


def fit_absmoment_k2(m2: float, m1abs: float) -> FitReport:
    """Closed-form (sigma_z, nu_z) from E[Z^2] and E[|Z|]."""
    if not (m2 > 0.0 and m1abs > 0.0):
        raise DomainError("fit_absmoment_k2 needs positive moments")
    ratio = math.sqrt(math.pi) * m1abs / math.sqrt(m2)
    if ratio >= math.sqrt(2.0):
        raise InfeasibleFitError(
            f"sqrt(pi) E|Z|/sqrt(E[Z^2]) = {ratio:.6f} is not below sqrt(2); "
            "the moment pair is outside the scaled-t family")
    nu_z = (math.pi * m1abs - 2.0 * math.sqrt(2.0 * m2)) \
        / (math.sqrt(math.pi) * m1abs - math.sqrt(2.0 * m2))
    if nu_z <= 2.0 + NU_EPS:
        raise InfeasibleFitError(f"closed form yields nu_z = {nu_z:.6f} <= 2")
    sigma_z = math.sqrt((math.pi - 2.0 * math.sqrt(math.pi)) * m1abs * m2
                        / (math.pi * m1abs - 2.0 * math.sqrt(2.0 * m2)))
    return FitReport(ScaledT(sigma_z, nu_z), ABS_MOMENT)


def fit_absmoment_iter(zc: LinComb,
                       acc: Accuracy = FIT_SERIES_ACCURACY) -> FitReport:
    """Absolute-moment fit for any K >= 1 by pairwise folding.

    Starts from the first term and repeatedly fits {current fit, next term}
    with the exact running E[Z^2] of the original terms.
    """
    for t in zc.terms:
        if t.nu <= 2.0:
            raise MomentError(f"fit_absmoment_iter requires nu > 2, got {t.nu}")
    sigma_z, nu_z = zc.terms[0].sigma, zc.terms[0].nu
    m2_running = sigma_z ** 2 * nu_z / (nu_z - 2.0)
    diag = None
    for step, term in enumerate(zc.terms[1:], start=1):
        m2_running += term.sigma ** 2 * term.nu / (term.nu - 2.0)
        try:
            m1abs, diag = abs_moment_k2(TTerm(sigma_z, nu_z), term, acc)
            report = fit_absmoment_k2(m2_running, m1abs)
        except (InfeasibleFitError, DomainError) as exc:
            raise InfeasibleFitError(f"fold step {step}: {exc}") from exc
        sigma_z, nu_z = report.fitted.sigma, report.fitted.nu
    return FitReport(ScaledT(sigma_z, nu_z), ABS_MOMENT,
                     iterations=len(zc) - 1, diagnostics=diag)


# ---------------------------------------------------------------------------
# characteristic-function path
# ---------------------------------------------------------------------------


def fit_cf_closed(zc: LinComb) -> FitReport:
    """CF fit at the canonical r = E[Z^2]^(-1/2), via the rational g-approximation."""
    m2 = second_moment(zc)
    r = 1.0 / math.sqrt(m2)
    c = cf_z(zc, r)
    if c <= G_P1 + 1e-9:
        raise InfeasibleFitError(
            f"CF value {c:.8f} at r=E[Z^2]^(-1/2) is at or below the large-nu "
            f"plateau {G_P1}; the closed form has no solution")
    if c >= 1.0 - 1e-12:
        raise InfeasibleFitError(f"CF value {c:.12f} is degenerately close to 1")
    nu_z = (-G_P2 - (-G_P3) * c) / (G_P1 - c)
    if nu_z <= 2.0 + NU_EPS:
        raise InfeasibleFitError(f"closed form yields nu_z = {nu_z:.6f} <= 2")
    sigma_z = math.sqrt((c - 1.0) * m2 / (G_SIGMA_NUM - G_SIGMA_SLOPE * c))
    return FitReport(ScaledT(sigma_z, nu_z), CF_CLOSED, r_used=r)


def fit_cf_bisect(zc: LinComb, r: float) -> FitReport:
    """CF fit at a caller-chosen r > 0, solving g(nu_z) = CF_Z(r) by bisection."""
    if not r > 0.0:
        raise DomainError(f"fit_cf_bisect requires r > 0, got {r}")
    m2 = second_moment(zc)
    target = cf_z(zc, r)
    rE = r * math.sqrt(m2)
    lo, hi = 2.0 + NU_EPS, NU_MAX
    g_lo = g_exact(lo, rE)
    g_hi = g_exact(hi, rE)
    if target >= g_lo:
        raise NoSolutionError(
            f"CF_Z(r) = {target:.9f} is not below g(2+eps) = {g_lo:.9f}; "
            "no nu_z > 2 solves the matching equation")
    if target <= g_hi - 1e-9:
        raise NoSolutionError(
            f"CF_Z(r) = {target:.9g} is below g(nu_max) = {g_hi:.9g}; "
            "no solution with nu_z <= 1e4 (choose a smaller r)")
    if target <= g_hi:
        # numerically indistinguishable from the nu -> infinity plateau
        trace = BisectTrace(iterations=0, bracket_width=0.0, capped=True)
        sigma_z = math.sqrt((NU_MAX - 2.0) * m2 / NU_MAX)
        return FitReport(ScaledT(sigma_z, NU_MAX), CF_BISECT, r_used=r,
                         iterations=0, diagnostics=trace)
    iterations = 0
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if g_exact(mid, rE) > target:
            lo = mid
        else:
            hi = mid
        iterations += 1
    nu_z = 0.5 * (lo + hi)
    capped = NU_MAX - nu_z <= 1e-6
    trace = BisectTrace(iterations=iterations, bracket_width=hi - lo, capped=capped)
    sigma_z = math.sqrt((nu_z - 2.0) * m2 / nu_z)
    return FitReport(ScaledT(sigma_z, nu_z), CF_BISECT, r_used=r,
                     iterations=iterations, diagnostics=trace)


# ---------------------------------------------------------------------------
# second + fourth moment benchmark
# ---------------------------------------------------------------------------


def fit_moment4(zc: LinComb) -> FitReport:
    """Benchmark fit matching E[Z^2] and E[Z^4]; needs every nu_i > 4."""
    m2 = second_moment(zc)
    m4 = fourth_moment(zc)
    kurtosis = m4 / (m2 * m2)
    if kurtosis <= 3.0:
        raise InfeasibleFitError(
            f"kurtosis {kurtosis:.6f} <= 3 cannot be matched by a scaled t")
    nu_z = (4.0 * kurtosis - 6.0) / (kurtosis - 3.0)
    sigma_z = math.sqrt((nu_z - 2.0) * m2 / nu_z)
    return FitReport(ScaledT(sigma_z, nu_z), MOMENT4)


# ---------------------------------------------------------------------------
# rational-approximation recalibration (validation tool)
# ---------------------------------------------------------------------------


def refit_rational(which: str, domain: tuple[float, float] = (2.0, 100.0),
                   rE: float = 1.0, n_points: int = 200) -> RationalApprox:
    """Re-derive the free constant of the h or g rational approximation.

    p1 is pinned to the analytic large-nu limit and the nu -> 2 boundary
    relation pins one more constant; the remaining one is least-squares
    fitted on a log-spaced grid.  This exists to audit the published
    constants, not to replace them.
    """
    lo, hi = domain
    if not 2.0 <= lo < hi:
        raise DomainError(f"domain must sit inside (2, inf), got {domain}")
    lo = max(lo, 2.0 + 1e-6)
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), n_points))
    if which == "h":
        target = np.array([h_exact(v) for v in grid])
        p1, p2 = H_P1, H_P2

        def loss(p3):
            return float(np.sum(((p1 * grid + p2) / (grid + p3) - target) ** 2))

        res = minimize_scalar(loss, bounds=(-1.999, -1.0), method="bounded")
        return RationalApprox(p1, p2, float(res.x))
    if which == "g":
        target = np.array([g_exact(v, rE) for v in grid])
        p1 = math.exp(-0.5 * rE * rE)

        def loss(p2):
            p3 = 2.0 * p1 + p2 - 2.0
            return float(np.sum(((p1 * grid + p2) / (grid + p3) - target) ** 2))

        res = minimize_scalar(loss, bounds=(-1.5, -0.2), method="bounded")
        p2 = float(res.x)
        return RationalApprox(p1, p2, 2.0 * p1 + p2 - 2.0)
    raise DomainError(f"which must be 'h' or 'g', got {which!r}")
