"""Closed-form service-time distributions, moments, and average ages.

Downlink service is a shifted Poisson: a packet needs 1 + Poisson(load)
blocks, where the load is packet length over mean per-block nats. The
uplink service compounds the same count distribution with the number of
blocks needed to bank enough energy per transmit block. Average ages
follow the zero-wait renewal form  E(S) + 1/2 + E(S^2) / (2 E(S))  in
discrete blocks.

Two uplink forms are exposed. ``renewal`` composes the compound moments
with the renewal formula and is the default; ``literal`` reproduces the
published closed expression, which is lower by exactly 1/2 (a constant
absorbed incorrectly during its simplification). The simulator decides
empirically which one the sample paths follow; see the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .model import SystemParams, derive_constants

__all__ = [
    "MomentPair",
    "AoiBreakdown",
    "downlink_service_pmf",
    "downlink_service_moments",
    "renewal_aoi",
    "avg_downlink_aoi",
    "harvest_slot_pmf",
    "harvest_slot_moments",
    "uplink_tx_count_moments",
    "uplink_service_moments",
    "avg_uplink_aoi",
    "weighted_sum_aoi",
    "data_rates",
    "ts_equivalent_rho",
]

UPLINK_FORMS = ("renewal", "literal")


class MomentPair(NamedTuple):
    """First and second raw moments of a service-time distribution, in blocks."""

    m1: float
    m2: float


@dataclass(frozen=True)
class AoiBreakdown:
    """Average ages of both directions and their weighted sum, in blocks."""

    downlink: float
    uplink: float
    weighted: float
    rho: float
    w: float


def _shifted_poisson_log_pmf(load: float, j: int) -> float:
    # log of Pr{S = j} for S = 1 + Poisson(load); load > 0, j >= 1
    return (j - 1) * math.log(load) - load - math.lgamma(j)


def downlink_service_pmf(dl_load: float, j: int) -> float:
    """Pr{downlink service = j blocks}; shifted Poisson with mean 1 + load.

    Evaluated in log space so that large loads (hundreds of blocks) do not
    overflow the factorial.
    """
    if j < 1 or int(j) != j:
        raise ValueError(f"j must be a positive integer, got {j!r}")
    if dl_load < 0:
        raise ValueError(f"dl_load must be >= 0, got {dl_load!r}")
    if dl_load == 0.0:
        return 1.0 if j == 1 else 0.0
    return math.exp(_shifted_poisson_log_pmf(dl_load, int(j)))


def downlink_service_moments(dl_load: float) -> MomentPair:
    """Moments of the shifted-Poisson block count: (1 + x, x^2 + 3x + 1)."""
    if dl_load < 0:
        raise ValueError(f"dl_load must be >= 0, got {dl_load!r}")
    x = dl_load
    return MomentPair(1.0 + x, x * x + 3.0 * x + 1.0)


def renewal_aoi(moments: MomentPair) -> float:
    """Average age of a zero-wait renewal system: m1 + 1/2 + m2/(2 m1)."""
    m1, m2 = moments
    if not m1 > 0:
        raise ValueError(f"first moment must be positive, got {m1!r}")
    if math.isinf(m1) or math.isinf(m2):
        return math.inf
    return m1 + 0.5 + m2 / (2.0 * m1)


def avg_downlink_aoi(dl_load: float) -> float:
    """Average downlink age in blocks; infinite when the load is unbounded."""
    if math.isinf(dl_load):
        return math.inf
    x = dl_load
    aoi = 1.0 + x + (x * x + 4.0 * x + 2.0) / (2.0 * (1.0 + x))
    # same algebra as the renewal composition; guard against drift between the two
    assert math.isclose(aoi, renewal_aoi(downlink_service_moments(x)),
                        rel_tol=1e-9)
    return aoi


def harvest_slot_pmf(eta: float, j: int) -> float:
    """Pr{tau_H = j}: Poisson(1/eta) count of blocks to bank one threshold.

    ``tau_H`` can be zero when leftover energy already covers the next
    transmit block; the effective per-transmission time is max(1, tau_H).
    Values eta > 1 are accepted for limit checks.
    """
    if eta <= 0:
        raise ValueError(f"eta must be > 0, got {eta!r}")
    if j < 0 or int(j) != j:
        raise ValueError(f"j must be a nonnegative integer, got {j!r}")
    mu = 1.0 / eta
    return math.exp(j * math.log(mu) - mu - math.lgamma(j + 1)) if j else math.exp(-mu)


def harvest_slot_moments(eta: float) -> MomentPair:
    """Moments of s = max(1, tau_H): (1/eta + e^(-1/eta), 1/eta^2 + 1/eta + e^(-1/eta))."""
    if eta <= 0:
        raise ValueError(f"eta must be > 0, got {eta!r}")
    mu = 1.0 / eta
    tail = math.exp(-mu)
    return MomentPair(mu + tail, mu * mu + mu + tail)


def uplink_tx_count_moments(ul_load: float) -> MomentPair:
    """Moments of the number of uplink transmit blocks per packet.

    Same shifted-Poisson family as the downlink, with the uplink load.
    """
    if ul_load < 0:
        raise ValueError(f"ul_load must be >= 0, got {ul_load!r}")
    x = ul_load
    return MomentPair(1.0 + x, x * x + 3.0 * x + 1.0)


def uplink_service_moments(ul_load: float, eta: float) -> MomentPair:
    """Moments of the compound uplink service S_U = sum of S harvest slots.

    E(S_U) = E(S) E(s);  E(S_U^2) = E(S) E(s^2) + E(S^2 - S) E(s)^2.
    """
    if math.isinf(ul_load):
        return MomentPair(math.inf, math.inf)
    count = uplink_tx_count_moments(ul_load)
    slot = harvest_slot_moments(eta)
    m1 = count.m1 * slot.m1
    m2 = count.m1 * slot.m2 + (count.m2 - count.m1) * slot.m1 ** 2
    return MomentPair(m1, m2)


def avg_uplink_aoi(ul_load: float, eta: float, form: str = "renewal") -> float:
    """Average uplink age in blocks.

    ``renewal`` (default) composes the compound service moments with the
    renewal formula. ``literal`` evaluates the published closed expression,
    which equals the renewal value minus exactly 1/2 for every input.
    """
    if form not in UPLINK_FORMS:
        raise ValueError(f"form must be one of {UPLINK_FORMS}, got {form!r}")
    if math.isinf(ul_load):
        return math.inf
    if form == "renewal":
        return renewal_aoi(uplink_service_moments(ul_load, eta))
    if eta <= 0:
        raise ValueError(f"eta must be > 0, got {eta!r}")
    count_mean = 1.0 + ul_load
    a = 1.0 / eta + math.exp(-1.0 / eta)
    return (1.5 * count_mean * a
            + 0.5
            + 0.5 / (eta + eta * eta * math.exp(-1.0 / eta))
            - 0.5 * a / count_mean)


def weighted_sum_aoi(params: SystemParams, rho: float, w: float) -> AoiBreakdown:
    """Weighted-sum average age (1 - w) * downlink + w * uplink at a given split.

    Unbounded loads propagate: the result is infinite when rho = 1 with
    w < 1, or rho = 0 with w > 0. At w exactly 0 or 1 the starved side is
    excluded rather than multiplied by zero.
    """
    if not (0.0 <= rho <= 1.0):
        raise ValueError(f"rho must be in [0, 1], got {rho!r}")
    if not (0.0 <= w <= 1.0):
        raise ValueError(f"w must be in [0, 1], got {w!r}")
    loads = derive_constants(params, rho)
    dl = avg_downlink_aoi(loads.dl_load)
    ul = avg_uplink_aoi(loads.ul_load, params.harvest_eff)
    if w == 0.0:
        weighted = dl
    elif w == 1.0:
        weighted = ul
    else:
        weighted = (1.0 - w) * dl + w * ul
    return AoiBreakdown(downlink=dl, uplink=ul, weighted=weighted, rho=rho, w=w)


def data_rates(params: SystemParams, rho: float) -> tuple[float, float]:
    """Long-run (downlink, uplink) throughput in packets per block.

    Under zero wait the rate is the reciprocal mean service time; a starved
    side (rho at the boundary) has rate zero.
    """
    loads = derive_constants(params, rho)
    dl_m1 = downlink_service_moments(loads.dl_load).m1 if math.isfinite(loads.dl_load) else math.inf
    ul_m1 = uplink_service_moments(loads.ul_load, params.harvest_eff).m1
    dl_rate = 0.0 if math.isinf(dl_m1) else 1.0 / dl_m1
    ul_rate = 0.0 if math.isinf(ul_m1) else 1.0 / ul_m1
    return dl_rate, ul_rate


def ts_equivalent_rho(p: float, theta: float) -> float:
    """Energy-transfer block fraction of the time-splitting scheme, 1 - p(1 + theta).

    ``p`` is the per-block packet generation probability of the access
    point; it must lie in the stability region [0, 1/(1 + theta)].
    """
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta!r}")
    limit = 1.0 / (1.0 + theta)
    if not (0.0 <= p <= limit):
        raise ValueError(
            f"gen probability {p!r} outside the stable region: need p <= "
            f"1/(1+theta) = {limit:.6g} for theta = {theta:.6g}")
    return 1.0 - p * (1.0 + theta)
