"""Null calibration and maximal thresholding tests.

Under the null, each Y_j is asymptotically chi-square(1), so with
t = sqrt(lambda_p(s)) the thresholding statistics have leading-order null
moments built from truncated Gaussian moments:

    gamma = 0:  mean = 2 p PhiBar(t)
                var  = 2 p PhiBar(t) (1 - 2 PhiBar(t))
    gamma = 1:  mean = 2 p phi(t)            (equals sqrt(2/pi) p^(1-s))
                var  = 2 p^(1-s) sqrt((s/pi) log p)
    gamma = 2:  mean = p (2 t phi(t) + 2 PhiBar(t))
                var  = p (2 (t**3 + 3 t) phi(t) + 6 PhiBar(t))

The standardized statistic is (T_gamma(s) - mean) / sd. Its maximum over the
data-driven grid

    S_n = { Y_j / (2 log p) : 1 <= Y_j < 2 (1 - eta) log p } u {1 - eta},

augmented with the validity floor s = 1/(2 log p) whenever observations
fall below threshold Y = 1, converges, after the norming
a = sqrt(2 log log p) and
b = 2 log log p + (1/2) log log log p - (1/2) log(4 pi / (1 - eta)**2),
to a standard Gumbel law, which supplies critical values and p-values.

The floor is not cosmetic. The variance expressions above are
leading-order forms whose validity requires the threshold t to be bounded
away from zero: below s = 1/(2 log p) (that is, t < 1) the gamma in
{0, 1} standard deviations stop decreasing in s, and the gamma = 1 form
stops approximating a variance at all, which would let the standardized
null statistic at the smallest observed level grow like sqrt(p) and
swamp the maximum with noise. On [1/(2 log p), 1 - eta] the means and
standard deviations are monotone decreasing for every gamma, which is
also what lets the continuous supremum be attained on the finite grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, DomainError
from .stats import (
    MarginalSummary,
    SampleMatrix,
    marginal_summaries,
    normal_pdf,
    normal_survival,
    threshold_statistic,
)

__all__ = [
    "NullMoments",
    "GumbelNorming",
    "TestReport",
    "null_moments",
    "standardized_statistic",
    "candidate_grid",
    "restricted_grid",
    "maximal_statistic",
    "gumbel_norming",
    "critical_value",
    "run_test",
]

_GAMMAS = (0, 1, 2)


@dataclass(frozen=True)
class NullMoments:
    """Leading-order null mean and standard deviation of T_gamma(s)."""

    gamma: int
    s: float
    mean: float
    sd: float


@dataclass(frozen=True)
class GumbelNorming:
    """Centering and scaling constants for the maximal statistic, at y = log p."""

    a: float
    b: float
    eta: float


@dataclass(frozen=True)
class TestReport:
    """Outcome of one maximal thresholding test."""

    gamma: int
    m_hat: float
    argmax_s: float
    norming: GumbelNorming
    critical_value: float
    alpha: float
    p_value: float
    reject: bool


def null_moments(gamma: int, s: float, p: int) -> NullMoments:
    """Null mean and sd of T_gamma(s) in dimension p, leading-order forms."""
    if gamma not in _GAMMAS:
        raise DomainError(f"gamma must be one of 0, 1, 2, got {gamma}")
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    if p < 3:
        raise DomainError(f"p must be at least 3, got {p}")
    s_arr = np.asarray([float(s)])
    mean, sd = _null_mean_sd_grid(s_arr, p)[gamma]
    return NullMoments(gamma=gamma, s=float(s), mean=float(mean[0]), sd=float(sd[0]))


def standardized_statistic(summary: MarginalSummary, gamma: int, s: float) -> float:
    """(T_gamma(s) - null mean) / null sd; the null mean estimate is the

    leading-order null mean itself (known-variance calibration).
    """
    nm = null_moments(gamma, s, summary.p)
    if nm.sd == 0.0:
        raise CalibrationError(
            f"null sd underflows to zero at s={s}; statistic undefined there"
        )
    return (threshold_statistic(summary, gamma, s) - nm.mean) / nm.sd


def candidate_grid(summary: MarginalSummary, eta: float) -> np.ndarray:
    """Data-driven grid S_n, ascending and deduplicated.

    Every observed Y_j between 1 and the cap 2 (1 - eta) log p contributes
    the level s = Y_j / (2 log p) at which it sits exactly on the
    threshold; the anchor 1 - eta is always included. Observations with
    0 < Y_j < 1 sit below the validity floor of the null sd formulas and
    contribute the floor level 1/(2 log p) instead (see _grid_from_y).
    """
    if summary.p < 3:
        raise DomainError(f"p must be at least 3 for the grid, got {summary.p}")
    return _grid_from_y(summary.y, summary.p, eta)


def _grid_from_y(y: np.ndarray, p: int, eta: float) -> np.ndarray:
    """candidate_grid on raw arrays; shared with the Monte Carlo hot path.

    Levels below s = 1/(2 log p), equivalently thresholds below Y = 1, are
    excluded: that is exactly where the null sd approximations stop being
    monotone decreasing (and, for the L1 statistic, stop being variances at
    all; its standardized null value at the smallest observed level grows
    like sqrt(p), which would let noise artifacts dominate the maximum).
    On [1/(2 log p), 1-eta] the monotonicity that lets the maximum be
    attained on the observed levels holds for all three statistics. When
    levels are dropped by this floor, the floor itself joins the grid so
    the maximum over the valid continuous range is still attained exactly.
    """
    _check_eta(eta)
    logp = math.log(p)
    cap = 2.0 * (1.0 - eta) * logp
    floor = min(0.5 / logp, 1.0 - eta)
    # The floor stands for threshold Y = 1; its recomputed threshold must
    # not exceed 1 or observations at Y ~ 1 drop out at the floor level.
    while 2.0 * floor * logp > 1.0:
        floor = math.nextafter(floor, 0.0)
    kept = y[(y >= 1.0) & (y < cap)]
    keep = kept / (2.0 * logp)
    # The s -> 2 s log p round trip can overshoot the generating observation
    # by an ulp, silently dropping it from the exceedance set at its own
    # level (and with it the attainment of the continuous maximum); nudge
    # each level down until its threshold readmits its observation.
    lam = 2.0 * keep * logp
    while np.any(lam > kept):
        mask = lam > kept
        keep[mask] = np.nextafter(keep[mask], 0.0)
        lam[mask] = 2.0 * keep[mask] * logp
    # Clipping can land a candidate one ulp outside [floor, 1-eta]; raising
    # to the guarded floor keeps every kept observation admitted there.
    keep = np.clip(keep, floor, 1.0 - eta)
    parts = [keep, [1.0 - eta]]
    if np.any((y > 0.0) & (y < 1.0)):
        parts.append([floor])
    return np.unique(np.concatenate(parts))


def restricted_grid(summary: MarginalSummary, eta: float, theta: float) -> np.ndarray:
    """Grid filtered to s > max(1 - theta, 0); the anchor 1 - eta is retained.

    Matches the sparsity levels identifiable when p = n**(1/theta); for
    theta >= 1 this is the full grid.
    """
    if not theta > 0.0:
        raise DomainError(f"theta must be positive, got {theta}")
    grid = candidate_grid(summary, eta)
    lower = max(1.0 - theta, 0.0)
    return np.unique(np.concatenate([grid[grid > lower], [1.0 - eta]]))


def maximal_statistic(
    summary: MarginalSummary,
    gamma: int,
    eta: float,
    *,
    theta: float | None = None,
) -> tuple[float, float]:
    """Maximum of the standardized statistic over the candidate grid.

    Returns (m_hat, argmax_s); ties go to the smallest s. Passing theta
    maximizes over restricted_grid instead of the full grid. Runs the
    O(p log p) sorted-prefix path; results match maximizing
    standardized_statistic pointwise up to summation-order rounding.
    """
    if gamma not in _GAMMAS:
        raise DomainError(f"gamma must be one of 0, 1, 2, got {gamma}")
    grid = (
        restricted_grid(summary, eta, theta)
        if theta is not None
        else candidate_grid(summary, eta)
    )
    standardized = standardized_over_grid(summary.y, summary.p, grid)[gamma]
    idx = int(np.argmax(standardized))  # first max = smallest s on ascending grid
    m_hat = float(standardized[idx])
    if not math.isfinite(m_hat):
        raise CalibrationError("standardized statistic is degenerate on the whole grid")
    return m_hat, float(grid[idx])


def standardized_over_grid(
    y: np.ndarray, p: int, s_grid: np.ndarray
) -> dict[int, np.ndarray]:
    """Standardized statistics for all three gammas over an ascending s grid.

    Vectorized engine shared by maximal_statistic and the Monte Carlo
    harness. Thresholds are recomputed as 2 * s * log(p), term for term the
    lambda_p expression, so exceedance sets agree with the scalar path
    exactly; the per-set sums are prefix sums over the descending order
    statistics. Grid entries where the null sd underflows to zero (possible
    only for degenerate constructed data at s below ~1e-300) are reported
    as -inf.
    """
    s_grid = np.asarray(s_grid, dtype=np.float64)
    logp = math.log(p)
    lam = 2.0 * s_grid * logp
    y_asc = np.sort(np.asarray(y, dtype=np.float64))
    counts = y_asc.size - np.searchsorted(y_asc, lam, side="left")
    y_desc = y_asc[::-1]
    prefix1 = np.concatenate(([0.0], np.cumsum(np.sqrt(y_desc))))
    prefix2 = np.concatenate(([0.0], np.cumsum(y_desc)))
    totals = {
        0: counts.astype(np.float64),
        1: prefix1[counts],
        2: prefix2[counts],
    }
    moments = _null_mean_sd_grid(s_grid, p)
    out: dict[int, np.ndarray] = {}
    for gamma in _GAMMAS:
        mean, sd = moments[gamma]
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (totals[gamma] - mean) / sd
        out[gamma] = np.where(sd > 0.0, z, -np.inf)
    return out


def gumbel_norming(p: int, eta: float) -> GumbelNorming:
    """Norming constants a, b evaluated at y = log p.

    Requires log log p > 0 (p >= 3) for b to be defined; warns below p = 16,
    where log log log p <= 0 and the asymptotics are unreliable.
    """
    _check_eta(eta)
    if p < 3:
        raise CalibrationError(
            f"norming constants need log(log(p)) > 0; p={p} is too small"
        )
    if p < 16:
        warnings.warn(
            f"Gumbel norming at p={p} is asymptotically unreliable (p < 16)",
            RuntimeWarning,
            stacklevel=2,
        )
    loglogp = math.log(math.log(p))
    a = math.sqrt(2.0 * loglogp)
    b = (
        2.0 * loglogp
        + 0.5 * math.log(loglogp)
        - 0.5 * math.log(4.0 * math.pi / (1.0 - eta) ** 2)
    )
    return GumbelNorming(a=a, b=b, eta=eta)


def critical_value(alpha: float, p: int, eta: float) -> float:
    """Level-alpha critical value B = (E_alpha + b) / a, E_alpha the Gumbel quantile."""
    _check_alpha(alpha)
    norming = gumbel_norming(p, eta)
    e_alpha = -math.log(-math.log(1.0 - alpha))
    return (e_alpha + norming.b) / norming.a


def run_test(
    x: SampleMatrix | np.ndarray,
    gamma: int,
    alpha: float = 0.05,
    eta: float = 0.05,
) -> TestReport:
    """Run one maximal thresholding test at level alpha.

    Rejects when the maximal standardized statistic exceeds the Gumbel
    critical value; the p-value is 1 - gumbel_cdf(a * m_hat - b). Emits a
    RuntimeWarning when log(p) > n**(1/3), where the Gaussian calibration
    underlying the null moments degrades.
    """
    _check_alpha(alpha)
    summary = marginal_summaries(x)
    if math.log(summary.p) > summary.n ** (1.0 / 3.0):
        warnings.warn(
            f"log(p)={math.log(summary.p):.2f} exceeds n**(1/3)="
            f"{summary.n ** (1.0 / 3.0):.2f}; calibration accuracy degrades in "
            "this regime",
            RuntimeWarning,
            stacklevel=2,
        )
    m_hat, argmax_s = maximal_statistic(summary, gamma, eta)
    norming = gumbel_norming(summary.p, eta)
    b_alpha = critical_value(alpha, summary.p, eta)
    # 1 - exp(-exp(-u)) via expm1 keeps precision for small p-values.
    p_value = float(-math.expm1(-math.exp(-(norming.a * m_hat - norming.b))))
    return TestReport(
        gamma=gamma,
        m_hat=m_hat,
        argmax_s=argmax_s,
        norming=norming,
        critical_value=b_alpha,
        alpha=alpha,
        p_value=p_value,
        reject=bool(m_hat > b_alpha),
    )


def _null_mean_sd_grid(
    s_grid: np.ndarray, p: int
) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Vectorized null means and sds for all gammas over an s grid."""
    logp = math.log(p)
    lam = 2.0 * s_grid * logp
    t = np.sqrt(lam)
    phi = normal_pdf(t)
    surv = normal_survival(t)
    mean0 = 2.0 * p * surv
    var0 = 2.0 * p * surv * (1.0 - 2.0 * surv)
    mean1 = 2.0 * p * phi
    var1 = 2.0 * np.exp((1.0 - s_grid) * logp) * np.sqrt(s_grid / math.pi * logp)
    mean2 = p * (2.0 * t * phi + 2.0 * surv)
    var2 = p * (2.0 * (t**3 + 3.0 * t) * phi + 6.0 * surv)
    return {
        0: (mean0, np.sqrt(var0)),
        1: (mean1, np.sqrt(var1)),
        2: (mean2, np.sqrt(var2)),
    }


def _check_eta(eta: float) -> None:
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
