"""Closed-form average ages versus the power-splitting ratio.

Tabulates the downlink age, the uplink age (renewal composition and the
literal published expression, which trail each other by exactly half a
block), and the weighted sum for several uplink weights. The weighted
curve diverges at both ends of the ratio axis and has a unique interior
minimum for every interior weight.
"""

import numpy as np

from twoway_aoi import SystemParams, derive_constants
from twoway_aoi.analytic import avg_downlink_aoi, avg_uplink_aoi, weighted_sum_aoi

params = SystemParams()
print(f"base load theta = {params.theta:.4f}")

rhos = np.linspace(0.05, 0.95, 19)
weights = (0.3, 0.5, 0.8)

header = f"{'rho':>6} {'dl_aoi':>10} {'ul_renewal':>12} {'ul_literal':>12}" + "".join(
    f" {'w=' + str(w):>10}" for w in weights)
print(header)
for rho in rhos:
    loads = derive_constants(params, rho)
    dl = avg_downlink_aoi(loads.dl_load)
    ul = avg_uplink_aoi(loads.ul_load, params.harvest_eff, "renewal")
    ul_lit = avg_uplink_aoi(loads.ul_load, params.harvest_eff, "literal")
    cells = "".join(f" {weighted_sum_aoi(params, rho, w).weighted:>10.2f}" for w in weights)
    print(f"{rho:>6.2f} {dl:>10.2f} {ul:>12.2f} {ul_lit:>12.2f}{cells}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fine = np.linspace(0.02, 0.98, 400)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for w in weights:
        ax.semilogy(fine, [weighted_sum_aoi(params, r, w).weighted for r in fine],
                    label=f"w = {w}")
    ax.set_xlabel("power-splitting ratio rho")
    ax.set_ylabel("weighted-sum average age (blocks)")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig("age_vs_rho.png", dpi=140)
    print("\nwrote age_vs_rho.png")
except ImportError:
    print("\nmatplotlib not available; table only")
