"""Size-adjusted power of the three tests across signal strengths.

One Monte Carlo cell (p=500, n=100, AR(1) correlation 0.3, beta=0.8) is
swept over r. Critical values are calibrated on a dedicated null sample so
every test runs at the same empirical size; the r = 0 row reports that
size. Above the boundary rho*(0.8) ~ 0.306 power climbs, and for
r > 2*beta - 1 = 0.6 the L2 test pulls ahead of L1 and the exceedance
count, in that order.
"""

import numpy as np

from maxthresh import ScenarioConfig, detection_boundary, sample_mhats, upper_quantile

P, N, RHO, BETA = 500, 100, 0.3, 0.8
REPS, NULL_REPS, ALPHA = 400, 1000, 0.05

calibration_config = ScenarioConfig(
    p=P, n=N, rho=RHO, beta=BETA, r=0.0, alpha=ALPHA, reps=NULL_REPS,
    scenario_id="demo3",
)
null_mhats = sample_mhats(calibration_config, null=True, stream="calibration")
criticals = {g: upper_quantile(null_mhats[:, g], ALPHA) for g in (0, 1, 2)}

print(f"cell p={P}, n={N}, rho={RHO}, beta={BETA}, alpha={ALPHA}")
print(f"boundary rho*({BETA}) = {detection_boundary(BETA):.4f}, strict zone r > {2 * BETA - 1:.1f}")
print(f"adjusted criticals: hc {criticals[0]:.3f}, l1 {criticals[1]:.3f}, l2 {criticals[2]:.3f}")
print()

print(f"{'r':>4} {'hc':>7} {'l1':>7} {'l2':>7}   (mc se ~ {np.sqrt(0.25 / REPS):.3f} worst case)")
for r in (0.0, 0.3, 0.6, 0.9, 1.2):
    config = ScenarioConfig(
        p=P, n=N, rho=RHO, beta=BETA, r=r, alpha=ALPHA, reps=REPS,
        scenario_id="demo3",
    )
    mhats = sample_mhats(config, null=False)
    rates = [float(np.mean(mhats[:, g] > criticals[g])) for g in (0, 1, 2)]
    tag = "size" if r == 0.0 else ""
    print(f"{r:>4.1f} {rates[0]:>7.3f} {rates[1]:>7.3f} {rates[2]:>7.3f}   {tag}")
