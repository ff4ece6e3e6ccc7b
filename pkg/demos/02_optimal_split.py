"""Optimal power-splitting ratio as a function of the uplink weight.

Sweeps the weight from 0 to 1 and solves for the age-minimizing ratio at
each point. The ratio is non-decreasing in the weight (more uplink
priority pulls power toward energy transfer). The optimal age starts at
its global minimum at w = 0, rises while the expensive uplink gains
influence, and falls again near w = 1 where the optimizer hands almost
all power to energy transfer.
"""

import numpy as np

from twoway_aoi import SystemParams, sweep_w

params = SystemParams()
points = sweep_w(params, np.linspace(0.0, 1.0, 41))

print(f"{'w':>6} {'rho*':>10} {'aoi*':>10} {'method':>10} {'iters':>6}")
for pt in points:
    res = pt.result
    print(f"{pt.w:>6.3f} {res.rho_star:>10.6f} {res.aoi_star:>10.2f} "
          f"{res.method:>10} {res.iterations:>6}")

aoi = [pt.result.aoi_star for pt in points]
peak = int(np.argmax(aoi))
print(f"\noptimal age minimal at w = 0 ({aoi[0]:.2f} blocks), "
      f"peaks at w = {points[peak].w:.3f} ({aoi[peak]:.2f}), "
      f"then falls to {aoi[-1]:.2f} at w = 1")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ws = [pt.w for pt in points]
    ax1.plot(ws, [pt.result.rho_star for pt in points], marker=".")
    ax1.set_xlabel("uplink weight w")
    ax1.set_ylabel("optimal ratio rho*")
    ax1.grid(alpha=0.3)
    ax2.plot(ws, aoi, marker=".")
    ax2.set_xlabel("uplink weight w")
    ax2.set_ylabel("optimal weighted age (blocks)")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig("optimal_split.png", dpi=140)
    print("wrote optimal_split.png")
except ImportError:
    pass
