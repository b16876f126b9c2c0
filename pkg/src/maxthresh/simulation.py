"""Monte Carlo harness: correlated Gaussian noise, sparse faint signals,

empirical size and power, and size-adjusted critical values.

The noise rows follow the Toeplitz covariance sigma_ij = rho**|i-j|,
sampled exactly by the AR(1) recursion

    W[i, 0] = eps_0,    W[i, j] = rho * W[i, j-1] + sqrt(1 - rho**2) * eps_j,

in O(n p) per replication. Alternatives plant m = floor(p**(1-beta)) signal
columns of amplitude sqrt(2 r log(p) / n) at locations drawn uniformly
without replacement, redrawn each replication by default.

Reproducibility contract: replication k of a scenario draws from generators
seeded by (master_seed, sha256(scenario_id), role, k) with role tags
noise = 0, locations = 1, calibration = 2. Size and power replications share
the noise role (so power at r = 0 is bitwise the size run), while
mc_calibrate consumes only the calibration role, keeping size-adjusted
evaluation independent of the calibration sample. Results are therefore
identical for any execution order or degree of parallelism.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .calibration import _grid_from_y, critical_value, standardized_over_grid
from .errors import DataError, DomainError
from .stats import SampleMatrix

__all__ = [
    "DEFAULT_SEED",
    "PRESET_CELLS",
    "ScenarioConfig",
    "AlternativeSpec",
    "PowerEstimate",
    "generate_noise",
    "plant_signals",
    "sample_mhats",
    "mc_size",
    "mc_power",
    "mc_calibrate",
    "scenario_presets",
]

DEFAULT_SEED = 1729

# (p, n) cells of the simulation design, keyed by the preset names the CLI
# accepts. fig1/fig2 follow p = exp(1.90 n**0.3 + 2.30); fig3/fig4 follow
# p = n**1.25 + 184.
PRESET_CELLS: dict[str, tuple[int, int]] = {
    "fig1": (2000, 30),
    "fig2": (20000, 100),
    "fig3": (500, 100),
    "fig4": (936, 200),
}

_PRESET_RHOS = (0.3, 0.5)
_PRESET_BETAS = (0.6, 0.7, 0.8)
_PRESET_RS = (0.1, 0.3, 0.5, 0.6, 0.8, 0.9, 1.1, 1.2)

_ROLE_NOISE = 0
_ROLE_LOCATIONS = 1
_ROLE_CALIBRATION = 2
_STREAM_ROLES = {"noise": _ROLE_NOISE, "calibration": _ROLE_CALIBRATION}

_CALIBRATIONS = ("gumbel", "mc_adjusted")


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation cell; r = 0 encodes the null."""

    p: int
    n: int
    rho: float
    beta: float
    r: float
    alpha: float = 0.05
    eta: float = 0.05
    reps: int = 2000
    master_seed: int = DEFAULT_SEED
    scenario_id: str = "scenario"

    def __post_init__(self) -> None:
        if self.p < 2 or self.n < 2:
            raise DomainError(f"need p >= 2 and n >= 2, got p={self.p}, n={self.n}")
        if not 0.0 <= self.rho < 1.0:
            raise DomainError(f"rho must lie in [0, 1), got {self.rho}")
        if self.r < 0.0:
            raise DomainError(f"r must be nonnegative, got {self.r}")
        if self.reps < 1:
            raise DomainError(f"reps must be at least 1, got {self.reps}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.eta < 1.0:
            raise DomainError(f"eta must lie in (0, 1), got {self.eta}")
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class AlternativeSpec:
    """Planted alternative: m signal columns at `locations` shifted by `amplitude`.

    r = 0 is the null embedding (amplitude 0). Locations are 0-based column
    indices.
    """

    beta: float
    r: float
    m: int
    locations: np.ndarray
    amplitude: float

    def __post_init__(self) -> None:
        if not 0.5 < self.beta < 1.0:
            raise DomainError(f"beta must lie in (1/2, 1), got {self.beta}")
        if self.r < 0.0:
            raise DomainError(f"r must be nonnegative, got {self.r}")
        locations = np.asarray(self.locations, dtype=np.int64)
        if self.m < 1:
            raise DomainError(f"signal count m must be at least 1, got {self.m}")
        if locations.shape != (self.m,) or np.unique(locations).size != self.m:
            raise DataError("locations must be m distinct indices")
        if self.amplitude < 0.0:
            raise DomainError(f"amplitude must be nonnegative, got {self.amplitude}")
        object.__setattr__(self, "locations", locations)

    @classmethod
    def draw(
        cls, p: int, n: int, beta: float, r: float, rng: np.random.Generator
    ) -> "AlternativeSpec":
        """Draw locations uniformly without replacement; m = floor(p**(1-beta))."""
        m = signal_count(p, beta)
        locations = np.sort(rng.choice(p, size=m, replace=False))
        amplitude = math.sqrt(2.0 * r * math.log(p) / n)
        return cls(beta=beta, r=r, m=m, locations=locations, amplitude=amplitude)


@dataclass(frozen=True)
class PowerEstimate:
    """Rejection frequency over Monte Carlo replications."""

    gamma: int
    rejection_rate: float
    mc_standard_error: float
    reps: int
    calibration: str


def signal_count(p: int, beta: float) -> int:
    """m = floor(p**(1-beta))."""
    if not 0.5 < beta < 1.0:
        raise DomainError(f"beta must lie in (1/2, 1), got {beta}")
    return int(math.floor(p ** (1.0 - beta)))


def generate_noise(p: int, n: int, rho: float, stream: np.random.Generator) -> SampleMatrix:
    """n independent AR(1)-structured Gaussian rows with Corr = rho**|i-j|."""
    return SampleMatrix(_noise_array(p, n, rho, stream))


def plant_signals(x: SampleMatrix, spec: AlternativeSpec) -> SampleMatrix:
    """Add spec.amplitude to every entry of each signal column (pure; copies)."""
    if spec.locations.size and (
        spec.locations.min() < 0 or spec.locations.max() >= x.p
    ):
        raise DataError(
            f"signal locations must lie in [0, {x.p}), got range "
            f"[{spec.locations.min()}, {spec.locations.max()}]"
        )
    values = x.values.copy()
    values[:, spec.locations] += spec.amplitude
    return SampleMatrix(values)


def sample_mhats(
    config: ScenarioConfig,
    *,
    null: bool,
    reps: int | None = None,
    stream: str = "noise",
    redraw_locations: bool = True,
) -> np.ndarray:
    """Maximal statistics for all three gammas over seeded replications.

    Returns an array of shape (reps, 3) with columns gamma = 0, 1, 2, the
    raw material for rejection rates, calibrated quantiles, and paired
    comparisons. `stream` selects the noise substream role: "noise" for
    size/power replications, "calibration" for the disjoint draws that
    mc_calibrate consumes.
    """
    if stream not in _STREAM_ROLES:
        raise DomainError(f"stream must be 'noise' or 'calibration', got {stream!r}")
    role = _STREAM_ROLES[stream]
    n_reps = config.reps if reps is None else int(reps)
    if n_reps < 1:
        raise DomainError(f"reps must be at least 1, got {n_reps}")
    planted = (not null) and config.r > 0.0
    out = np.empty((n_reps, 3), dtype=np.float64)
    for k in range(n_reps):
        rng = _replication_rng(config, role, k)
        w = _noise_array(config.p, config.n, config.rho, rng)
        if planted:
            loc_rng = _replication_rng(
                config, _ROLE_LOCATIONS, k if redraw_locations else 0
            )
            alt = AlternativeSpec.draw(config.p, config.n, config.beta, config.r, loc_rng)
            w[:, alt.locations] += alt.amplitude
        xbar = w.mean(axis=0)
        y = config.n * xbar**2
        grid = _grid_from_y(y, config.p, config.eta)
        standardized = standardized_over_grid(y, config.p, grid)
        for gamma in (0, 1, 2):
            out[k, gamma] = standardized[gamma].max()
    return out


def mc_size(
    config: ScenarioConfig,
    gamma: int,
    calibration: str = "gumbel",
    *,
    critical_value: float | None = None,
    null_reps: int | None = None,
) -> PowerEstimate:
    """Empirical size: rejection frequency over null replications.

    calibration="gumbel" rejects at the asymptotic critical value;
    "mc_adjusted" rejects at the mc_calibrate quantile (computed on the
    disjoint calibration substream unless critical_value is supplied).
    """
    return _mc_rejection_rate(
        config, gamma, calibration, True, critical_value, null_reps, True
    )


def mc_power(
    config: ScenarioConfig,
    gamma: int,
    calibration: str = "gumbel",
    *,
    critical_value: float | None = None,
    null_reps: int | None = None,
    redraw_locations: bool = True,
) -> PowerEstimate:
    """Empirical power at (beta, r); r = 0 reduces exactly to mc_size."""
    return _mc_rejection_rate(
        config,
        gamma,
        calibration,
        config.r == 0.0,
        critical_value,
        null_reps,
        redraw_locations,
    )


def mc_calibrate(config: ScenarioConfig, gamma: int, null_reps: int) -> float:
    """Size-adjusted critical value: empirical upper-alpha quantile of the

    null maximal statistic over null_reps replications of the dedicated
    calibration substream (disjoint from size/power replications).
    """
    if gamma not in (0, 1, 2):
        raise DomainError(f"gamma must be one of 0, 1, 2, got {gamma}")
    if null_reps < 1000:
        raise DomainError(f"null_reps must be at least 1000, got {null_reps}")
    mhats = sample_mhats(config, null=True, reps=null_reps, stream="calibration")
    return upper_quantile(mhats[:, gamma], config.alpha)


def upper_quantile(values: np.ndarray, alpha: float) -> float:
    """Empirical upper-alpha quantile: the (floor(alpha N) + 1)-th largest value.

    Exceeding it strictly happens for at most floor(alpha N) of the sample,
    so the in-sample rejection rate is within 1/N below alpha.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise DataError("quantile needs a nonempty 1-d sample")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    k = int(math.floor(alpha * values.size))
    return float(np.sort(values)[::-1][min(k, values.size - 1)])


def scenario_presets(
    reps: int = 2000, master_seed: int = DEFAULT_SEED
) -> list[ScenarioConfig]:
    """The full simulation grid: 4 (p,n) cells x 2 rho x 3 beta x 8 r."""
    configs = []
    for name, (p, n) in PRESET_CELLS.items():
        for rho in _PRESET_RHOS:
            for beta in _PRESET_BETAS:
                for r in _PRESET_RS:
                    configs.append(
                        ScenarioConfig(
                            p=p,
                            n=n,
                            rho=rho,
                            beta=beta,
                            r=r,
                            reps=reps,
                            master_seed=master_seed,
                            scenario_id=f"{name}-rho{rho}-beta{beta}-r{r}",
                        )
                    )
    return configs


def _mc_rejection_rate(
    config: ScenarioConfig,
    gamma: int,
    calibration: str,
    null: bool,
    critical: float | None,
    null_reps: int | None,
    redraw_locations: bool,
) -> PowerEstimate:
    if gamma not in (0, 1, 2):
        raise DomainError(f"gamma must be one of 0, 1, 2, got {gamma}")
    if calibration not in _CALIBRATIONS:
        raise DomainError(
            f"calibration must be one of {_CALIBRATIONS}, got {calibration!r}"
        )
    if critical is not None:
        calibration = "mc_adjusted"
        threshold = float(critical)
    elif calibration == "gumbel":
        threshold = critical_value(config.alpha, config.p, config.eta)
    else:
        threshold = mc_calibrate(
            config, gamma, null_reps if null_reps is not None else max(1000, config.reps)
        )
    mhats = sample_mhats(
        config, null=null, stream="noise", redraw_locations=redraw_locations
    )[:, gamma]
    rate = float(np.mean(mhats > threshold))
    se = math.sqrt(rate * (1.0 - rate) / mhats.size)
    return PowerEstimate(
        gamma=gamma,
        rejection_rate=rate,
        mc_standard_error=se,
        reps=int(mhats.size),
        calibration=calibration,
    )


def _noise_array(p: int, n: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    if not 0.0 <= rho < 1.0:
        raise DomainError(f"rho must lie in [0, 1), got {rho}")
    eps = rng.standard_normal((n, p))
    if rho == 0.0:
        return eps
    eps[:, 1:] *= math.sqrt(1.0 - rho * rho)
    return lfilter([1.0], [1.0, -rho], eps, axis=1)


def _replication_rng(config: ScenarioConfig, role: int, k: int) -> np.random.Generator:
    sid = int.from_bytes(
        hashlib.sha256(config.scenario_id.encode("utf-8")).digest()[:8], "big"
    )
    seq = np.random.SeedSequence(entropy=[config.master_seed, sid, role, k])
    return np.random.default_rng(seq)
