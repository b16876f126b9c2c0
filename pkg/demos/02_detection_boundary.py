"""Walk the sparse-signal phase diagram.

For sparsity beta and strength r, the detection boundary rho*(beta) splits
the plane into a detectable and an undetectable region, and r = 2 beta - 1
splits the detectable region into a zone where the three tests are
asymptotically equivalent and a zone where the L2 test strictly dominates.
The separation functions quantify that dominance at finite p.
"""

import numpy as np

from maxthresh import (
    classify_regime,
    delta2_separation,
    delta_gamma0,
    detectable_cases,
    detection_boundary,
    restricted_boundary,
)

# ------------------------------------------------------------ boundaries

print("beta      rho*   rho*_theta(0.5)   2*beta-1")
for beta in np.linspace(0.55, 0.95, 9):
    print(
        f"{beta:4.2f} {detection_boundary(beta):9.4f} "
        f"{restricted_boundary(beta, 0.5):13.4f} {2 * beta - 1:10.2f}"
    )
print()

# ------------------------------------------------------- regime examples

for beta, r in ((0.8, 1.2), (0.8, 0.45), (0.8, 0.2), (0.6, 0.15)):
    regime = classify_regime(r, beta)
    print(
        f"beta={beta}, r={r}: boundary {regime.boundary_value:.4f}, "
        f"detectable={regime.detectable}, power order {regime.power_order}"
    )
print()

# ------------------------------------- separation ratios on r > s levels

s, r, beta, p = 0.4, 0.8, 0.65, 10**5
d = {g: delta_gamma0(g, s, r, beta, p) for g in (0, 1, 2)}
print(f"separations at s={s}, r={r}, beta={beta}, p={p}:")
print(f"  hc {d[0]:.3f}, l1 {d[1]:.3f}, l2 {d[2]:.3f}")
print(f"  l1/hc = {d[1] / d[0]:.6f} = (r/s)**0.25 = {(r / s) ** 0.25:.6f}")
print(f"  l2/l1 = {d[2] / d[1]:.6f} = (r/s)**0.75 = {(r / s) ** 0.75:.6f}")
print()

# ------------------------------------------- divergence decides detection

good = (0.55, 0.3, 0.7)  # detectable level for (r, beta) above the boundary
bad = (0.1, 0.5, 0.6)  # level below the divergence threshold
print("L2 separation as p grows (detectable level vs useless level):")
print("         p   detectable   useless")
for p in (10**3, 10**5, 10**7, 10**9):
    print(
        f"{p:>10d} {delta2_separation(*good, p):>12.2f} "
        f"{delta2_separation(*bad, p):>9.4f}"
    )
print(
    f"case({good[0]}, r={good[1]}, beta={good[2]}) = "
    f"{detectable_cases(*good)}"
)
print(f"case({bad[0]}, r={bad[1]}, beta={bad[2]}) = {detectable_cases(*bad)}")
