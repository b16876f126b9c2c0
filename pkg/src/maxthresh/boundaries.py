"""Detection boundaries, separation rates, and power-regime classification.

A sparse alternative is parameterized by (beta, r): the number of nonzero
coordinates is m = p**(1-beta) with beta in (1/2, 1), and each signal mean
is sqrt(2 r log(p) / n) with r > 0. The detection boundary

    rho*(beta) = beta - 1/2                 for 1/2 < beta <= 3/4
               = (1 - sqrt(1 - beta))**2    for 3/4 < beta < 1

splits detectable from undetectable: for r > rho*(beta) some thresholding
level s separates the alternative from the null, for r < rho*(beta) none
does. When the grid of usable levels is restricted to s > 1 - theta
(dimensionality p = n**(1/theta)), the boundary rises to rho*_theta.

The separation functions Delta quantify the standardized mean shift at a
fixed level s. On r > s they satisfy, exactly,

    Delta_2 / Delta_1 = (r/s)**(3/4),   Delta_1 / Delta_0 = (r/s)**(1/4),

which is the leading-order reason the L2 statistic dominates L1, and L1
dominates the exceedance count, for strong signals. The four-case form of
the L2 separation (delta2_separation) carries its slowly varying constants
so finite-p comparisons are meaningful; its case-4 exponent is
(1 - beta - (sqrt(s) - sqrt(r))**2) / 2, the form consistent with the
case-4 divergence window sqrt(r) +/- sqrt(1 - beta) (the alternative
printed form with 2 sqrt(r) contradicts that window and is not used).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import DomainError, SingularityError

__all__ = [
    "SignalRegime",
    "RegimeClassification",
    "CaseDecision",
    "detection_boundary",
    "restricted_boundary",
    "delta_gamma0",
    "delta2_separation",
    "detectable_cases",
    "exists_detectable_s",
    "classify_regime",
]

PowerOrder = Literal["strict", "equivalent", "undetectable"]


@dataclass(frozen=True)
class SignalRegime:
    """Sparsity/strength pair: m = p**(1-beta) signals of strength r."""

    beta: float
    r: float

    def __post_init__(self) -> None:
        if not 0.5 < self.beta < 1.0:
            raise DomainError(f"beta must lie in (1/2, 1), got {self.beta}")
        if not self.r > 0.0:
            raise DomainError(f"r must be positive, got {self.r}")


@dataclass(frozen=True)
class RegimeClassification:
    """Detectability and the predicted ordering of the three tests' powers."""

    detectable: bool
    power_order: PowerOrder
    boundary_value: float


@dataclass(frozen=True)
class CaseDecision:
    """Which of the four separation cases (s, r, beta) falls in, and whether

    the L2 separation diverges there (the level s is detectable).
    """

    case: int
    detectable: bool


def detection_boundary(beta: float) -> float:
    """Unrestricted detection boundary rho*(beta)."""
    _check_beta(beta)
    if beta <= 0.75:
        return beta - 0.5
    return (1.0 - math.sqrt(1.0 - beta)) ** 2


def restricted_boundary(beta: float, theta: float) -> float:
    """Boundary rho*_theta(beta) when levels are restricted to s > 1 - theta.

    For theta >= 1 the restriction is vacuous and the unrestricted boundary
    applies. For theta < 1:

        (sqrt(1-theta) - sqrt(1-beta-theta/2))**2   if 1/2 < beta <= (3-theta)/4
        beta - 1/2                                  if (3-theta)/4 < beta <= 3/4
        (1 - sqrt(1-beta))**2                       if 3/4 < beta < 1
    """
    _check_beta(beta)
    if not theta > 0.0:
        raise DomainError(f"theta must be positive, got {theta}")
    if theta >= 1.0:
        return detection_boundary(beta)
    if beta <= (3.0 - theta) / 4.0:
        inner = 1.0 - beta - theta / 2.0
        if inner < 0.0:
            raise DomainError(
                f"first branch needs 1 - beta - theta/2 >= 0, got {inner}"
            )
        return (math.sqrt(1.0 - theta) - math.sqrt(inner)) ** 2
    if beta <= 0.75:
        return beta - 0.5
    return (1.0 - math.sqrt(1.0 - beta)) ** 2


def delta_gamma0(gamma: int, s: float, r: float, beta: float, p: int) -> float:
    """Separation Delta_{gamma,0}(s; r, beta) against the null-calibrated sd.

    On r > s the three statistics differ only through powers of r/s:

        Delta_{gamma,0} = (s pi log p)**(1/4) * f_gamma * p**(1/2 - beta + s/2),
        f_0 = 1,  f_1 = (r/s)**(1/4),  f_2 = r/s.

    On r < s all three coincide:

        Delta_{gamma,0} = L * p**(1/2 - beta - (sqrt(s)-sqrt(r))**2 + s/2),
        L = s**(1/4) / (2 (sqrt(s)-sqrt(r)) (pi log p)**(1/4)).

    s = r is a pole of the r < s prefactor and raises a singularity error.
    """
    if gamma not in (0, 1, 2):
        raise DomainError(f"gamma must be one of 0, 1, 2, got {gamma}")
    _check_level_regime(s, r, beta, p)
    logp = math.log(p)
    if r > s:
        factor = {0: 1.0, 1: (r / s) ** 0.25, 2: r / s}[gamma]
        return (s * math.pi * logp) ** 0.25 * factor * p ** (0.5 - beta + s / 2.0)
    gap = math.sqrt(s) - math.sqrt(r)
    prefactor = s**0.25 / (2.0 * gap * (math.pi * logp) ** 0.25)
    return prefactor * p ** (0.5 - beta - gap**2 + s / 2.0)


def delta2_separation(s: float, r: float, beta: float, p: int) -> float:
    """Four-case L2 separation Delta_2(s; r, beta) with slowly varying constants.

    Case 1 (s <= r, s <= beta): sqrt(2) (pi s)**(1/4) (r/s) (log p)**(1/4)
        times p**((1+s-2 beta)/2).
    Case 2 (s <= r, s > beta): (1/2) (r log p)**(1/2) times p**((1-beta)/2).
    Case 3 (s > r, s <= (sqrt(s)-sqrt(r))**2 + beta):
        s**(1/4) (log p)**(-1/4) / (sqrt(2) pi**(1/4) (sqrt(s)-sqrt(r)))
        times p**(1/2 - beta + r - (sqrt(s)-2 sqrt(r))**2 / 2).
    Case 4 (s > r, s > (sqrt(s)-sqrt(r))**2 + beta):
        (2 sqrt(pi) (sqrt(s)-sqrt(r)))**(-1/2) (log p)**(-1/4)
        times p**((1 - beta - (sqrt(s)-sqrt(r))**2)/2).

    Case boundaries follow the printed non-strict inequalities; continuity
    across them is not asserted (the constants are leading-order only).
    """
    _check_level_regime(s, r, beta, p)
    logp = math.log(p)
    sq_s = math.sqrt(s)
    sq_r = math.sqrt(r)
    if s <= r:
        if s <= beta:
            c1 = math.sqrt(2.0) * (math.pi * s) ** 0.25 * (r / s) * logp**0.25
            return c1 * p ** ((1.0 + s - 2.0 * beta) / 2.0)
        c2 = 0.5 * math.sqrt(r * logp)
        return c2 * p ** ((1.0 - beta) / 2.0)
    gap = sq_s - sq_r
    if s <= gap**2 + beta:
        c3 = s**0.25 * logp**-0.25 / (math.sqrt(2.0) * math.pi**0.25 * gap)
        return c3 * p ** (0.5 - beta + r - (sq_s - 2.0 * sq_r) ** 2 / 2.0)
    c4 = (2.0 * math.sqrt(math.pi) * gap) ** -0.5 * logp**-0.25
    return c4 * p ** ((1.0 - beta - gap**2) / 2.0)


def detectable_cases(s: float, r: float, beta: float) -> CaseDecision:
    """Case label for (s, r, beta) and whether the L2 separation diverges there.

    Case 1 (s <= r, s <= beta) diverges iff s > 2 beta - 1.
    Case 2 (s <= r, s > beta) always diverges.
    Case 3 (s > r, s <= (sqrt(s)-sqrt(r))**2 + beta) diverges iff
        1 - 2 beta + 2 r > 0 and |sqrt(s) - 2 sqrt(r)| < sqrt(1 - 2 beta + 2 r).
    Case 4 (s > r, s > (sqrt(s)-sqrt(r))**2 + beta) diverges iff
        |sqrt(s) - sqrt(r)| < sqrt(1 - beta).
    """
    SignalRegime(beta=beta, r=r)
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    sq_s = math.sqrt(s)
    sq_r = math.sqrt(r)
    if s <= r:
        if s <= beta:
            return CaseDecision(case=1, detectable=s > 2.0 * beta - 1.0)
        return CaseDecision(case=2, detectable=True)
    if s <= (sq_s - sq_r) ** 2 + beta:
        disc = 1.0 - 2.0 * beta + 2.0 * r
        ok = disc > 0.0 and abs(sq_s - 2.0 * sq_r) < math.sqrt(max(disc, 0.0))
        return CaseDecision(case=3, detectable=ok)
    return CaseDecision(case=4, detectable=abs(sq_s - sq_r) < math.sqrt(1.0 - beta))


def exists_detectable_s(r: float, beta: float) -> bool:
    """Exact decision of `exists s in (0,1) with detectable_cases(...) true`.

    Every inequality in detectable_cases is an interval condition in
    u = sqrt(s), so the detectable set is a finite union of u intervals
    whose endpoints are known in closed form. Probing the midpoint of each
    gap between consecutive critical points decides existence without the
    resolution limits of an s grid (near the curved boundary branch the
    detectable window can be arbitrarily narrow).
    """
    SignalRegime(beta=beta, r=r)
    return any(
        detectable_cases(s, r, beta).detectable for s in _probe_levels(r, beta)
    )


def classify_regime(r: float, beta: float) -> RegimeClassification:
    """Detectability and power ordering of the three tests at (r, beta).

    r > 2 beta - 1: all three detect, with strictly ordered asymptotic
    power (count <= L1 <= L2). rho*(beta) < r <= 2 beta - 1: detectable and
    asymptotically equivalent. r <= rho*(beta): undetectable (the boundary
    itself is classified as undetectable; detectability is strict).
    """
    SignalRegime(beta=beta, r=r)
    boundary = detection_boundary(beta)
    if r > 2.0 * beta - 1.0:
        order: PowerOrder = "strict"
    elif r > boundary:
        order = "equivalent"
    else:
        order = "undetectable"
    return RegimeClassification(
        detectable=r > boundary, power_order=order, boundary_value=boundary
    )


def _probe_levels(r: float, beta: float) -> list[float]:
    """Levels hitting every interval of constant case and detectability.

    All case conditions are interval conditions in u = sqrt(s) with closed
    form endpoints, so probing the midpoint between consecutive endpoints
    visits every interval of the induced partition of (0, 1). The case 3
    exponent vertex u = 2 sqrt(r) is appended (when interior) so the scan
    also lands on the most favorable interior level.
    """
    sq_r = math.sqrt(r)
    critical = [0.0, 1.0, sq_r, math.sqrt(beta), math.sqrt(2.0 * beta - 1.0)]
    if r > 0.0:
        critical.append((r + beta) / (2.0 * sq_r))
    disc3 = 1.0 - 2.0 * beta + 2.0 * r
    if disc3 > 0.0:
        critical.append(2.0 * sq_r - math.sqrt(disc3))
        critical.append(2.0 * sq_r + math.sqrt(disc3))
    width4 = math.sqrt(1.0 - beta)
    critical.append(sq_r - width4)
    critical.append(sq_r + width4)
    points = sorted({u for u in critical if 0.0 <= u <= 1.0} | {0.0, 1.0})
    probes = [0.5 * (lo + hi) for lo, hi in zip(points[:-1], points[1:])]
    if 2.0 * sq_r < 1.0:
        probes.append(2.0 * sq_r)
    return [u * u for u in probes if 0.0 < u < 1.0]


def _case_exponent(s: float, r: float, beta: float) -> float:
    """p-exponent of the four-case L2 separation (slowly varying parts dropped)."""
    sq_s = math.sqrt(s)
    sq_r = math.sqrt(r)
    if s <= r:
        if s <= beta:
            return (1.0 + s - 2.0 * beta) / 2.0
        return (1.0 - beta) / 2.0
    if s <= (sq_s - sq_r) ** 2 + beta:
        return 0.5 - beta + r - (sq_s - 2.0 * sq_r) ** 2 / 2.0
    return (1.0 - beta - (sq_s - sq_r) ** 2) / 2.0


def _check_beta(beta: float) -> None:
    if not 0.5 < beta < 1.0:
        raise DomainError(f"beta must lie in (1/2, 1), got {beta}")


def _check_level_regime(s: float, r: float, beta: float, p: int) -> None:
    SignalRegime(beta=beta, r=r)
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    if p < 3:
        raise DomainError(f"p must be at least 3, got {p}")
    if s == r:
        raise SingularityError("s = r is a singular point of the separation formulas")
