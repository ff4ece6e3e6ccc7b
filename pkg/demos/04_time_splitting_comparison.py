"""Time splitting vs power splitting at matched energy allocation.

For each packet generation probability p, the time-splitting system is
simulated as specified (full-power data when the queue is busy, full-power
energy transfer when idle) and compared against a power-splitting system
whose ratio equals the long-run energy-block fraction 1 - p(1 + theta).
The weighted data rates track each other closely; the time-splitting age
overtakes the power-splitting age once p grows, because its uplink
harvesting is interrupted by downlink busy periods.
"""

from dataclasses import replace

from twoway_aoi import SimConfig, SystemParams, run_power_splitting, run_time_splitting
from twoway_aoi.analytic import ts_equivalent_rho

params = SystemParams()
w = params.weight_uplink
n = 1_000_000

print(f"{'p':>7} {'rho_ts':>8} {'efrac':>8} {'R_ts':>10} {'R_ps':>10} "
      f"{'aoi_ts':>9} {'aoi_ps':>9}")
for p in (0.002, 0.005, 0.008, 0.012, 0.015):
    rho_ts = ts_equivalent_rho(p, params.theta)
    ts = run_time_splitting(params, p,
                            SimConfig(num_blocks=n, seed=7, scheme="time_split", gen_prob=p))
    ps = run_power_splitting(replace(params, split_ratio=rho_ts), rho_ts,
                             SimConfig(num_blocks=n, seed=7))
    r_ts = (1 - w) * ts.dl_rate + w * ts.ul_rate
    r_ps = (1 - w) * ps.dl_rate + w * ps.ul_rate
    print(f"{p:>7.3f} {rho_ts:>8.3f} {ts.energy_block_fraction:>8.4f} "
          f"{r_ts:>10.6f} {r_ps:>10.6f} {ts.weighted_aoi:>9.1f} {ps.weighted_aoi:>9.1f}")

print("\nthe energy-block fraction matches 1 - p(1+theta); the weighted rates differ "
      "by a few percent\nwhile the time-splitting age exceeds the power-splitting age "
      "at the larger p values")
