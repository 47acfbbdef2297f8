"""Edge cost and latency models for cloud egress billing.

Two billing methods are modeled:

* PAYG (pay-as-you-go): billed per purchased Mbps per hour, hours rounded
  up, independent of utilization.
* PFDT (pay-for-data-transfer): billed per GB sent, independent of
  bandwidth; the node transmits at its full egress rate.

Units are fixed package-wide: bandwidth in Mbps (10^6 bit/s), data size in
GB (10^9 bytes), latency in seconds, money in USD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

from budgetpath.topology import NodeSpec

BITS_PER_GB = 8e9
BITS_PER_MBPS = 1e6
SECONDS_PER_HOUR = 3600.0


class BillingMethod(IntEnum):
    NONE = 0
    PAYG = 1
    PFDT = 2


@dataclass(frozen=True)
class NodeBillingConfig:
    """Billing method and configured egress bandwidth for one node.

    PFDT always runs at the node's full egress rate; PAYG runs at whatever
    bandwidth was purchased. Method NONE (off-path nodes, destination)
    carries bandwidth 0.
    """

    method: BillingMethod
    bandwidth_mbps: float


@dataclass(frozen=True)
class TransferRequest:
    """One bulk transfer to plan: endpoints, size, budget, iteration cap."""

    source: int
    destination: int
    data_size_gb: float
    budget_usd: float
    max_iterations: int

    def __post_init__(self) -> None:
        if self.data_size_gb <= 0:
            raise ValueError(f"data_size_gb must be > 0, got {self.data_size_gb}")
        if self.budget_usd < 0:
            raise ValueError(f"budget_usd must be >= 0, got {self.budget_usd}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")


def transfer_seconds(data_size_gb: float, bandwidth_mbps: float) -> float:
    """Time to push `data_size_gb` through an egress link at `bandwidth_mbps`."""
    if bandwidth_mbps <= 0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth_mbps}")
    return data_size_gb * BITS_PER_GB / (bandwidth_mbps * BITS_PER_MBPS)


def edge_latency(rtt_s: float, data_size_gb: float, bandwidth_mbps: float) -> float:
    """Total edge latency: one-way propagation (RTT/2) plus transmission time."""
    if rtt_s < 0:
        raise ValueError(f"rtt must be >= 0, got {rtt_s}")
    return rtt_s / 2.0 + transfer_seconds(data_size_gb, bandwidth_mbps)


def pfdt_cost(pfdt_rate: float, data_size_gb: float) -> float:
    """Per-volume cost: rate (USD/GB) times data size, bandwidth-independent."""
    if pfdt_rate < 0 or data_size_gb < 0:
        raise ValueError("pfdt_cost inputs must be non-negative")
    return pfdt_rate * data_size_gb


def billed_hours(data_size_gb: float, bandwidth_mbps: float) -> int:
    """PAYG billable duration: transfer time rounded up to hours, minimum 1."""
    return max(1, math.ceil(transfer_seconds(data_size_gb, bandwidth_mbps) / SECONDS_PER_HOUR))


def payg_cost(payg_rate: float, bandwidth_mbps: float, data_size_gb: float) -> float:
    """Per-bandwidth cost: rate (USD/Mbps/h) times bandwidth times billed hours."""
    if payg_rate < 0:
        raise ValueError(f"payg_rate must be >= 0, got {payg_rate}")
    return payg_rate * bandwidth_mbps * billed_hours(data_size_gb, bandwidth_mbps)


def data_threshold(payg_rate: float, pfdt_rate: float, bandwidth_mbps: float) -> float:
    """Data size (GB) at which one-hour PAYG cost equals PFDT cost.

    Below the threshold PFDT is the cheaper method. A zero PFDT rate makes
    PFDT free, so the threshold is +inf (PFDT always wins).
    """
    if pfdt_rate == 0:
        return math.inf
    return payg_rate * bandwidth_mbps / pfdt_rate


def node_cost(node: NodeSpec, config: NodeBillingConfig, data_size_gb: float) -> float:
    """Egress cost this node incurs for sending the payload once."""
    if config.method is BillingMethod.PFDT:
        assert node.pfdt_rate is not None
        return pfdt_cost(node.pfdt_rate, data_size_gb)
    if config.method is BillingMethod.PAYG:
        assert node.payg_rate is not None
        return payg_cost(node.payg_rate, config.bandwidth_mbps, data_size_gb)
    return 0.0


def select_billing(
    node: NodeSpec,
    bandwidth_candidate_mbps: float,
    data_size_gb: float,
    rule: str = "threshold",
) -> NodeBillingConfig:
    """Pick PAYG vs. PFDT for one node at a candidate PAYG bandwidth.

    `threshold` rule: strict D < D_thresh selects PFDT (at the node's full
    rate), otherwise PAYG at the candidate bandwidth. `exact-cost` rule:
    whichever method is strictly cheaper, ties going to PFDT since it is
    never slower. Nodes offering only one method always use it.
    """
    if not 0 < bandwidth_candidate_mbps <= node.max_egress_mbps:
        raise ValueError(
            f"candidate bandwidth {bandwidth_candidate_mbps} outside (0, {node.max_egress_mbps}]"
        )
    if rule not in ("threshold", "exact-cost"):
        raise ValueError(f"unknown billing rule {rule!r}")

    pfdt_config = NodeBillingConfig(BillingMethod.PFDT, node.max_egress_mbps)
    payg_config = NodeBillingConfig(BillingMethod.PAYG, bandwidth_candidate_mbps)

    if node.pfdt_rate is None:
        return payg_config
    if node.payg_rate is None:
        return pfdt_config

    if rule == "threshold":
        thresh = data_threshold(node.payg_rate, node.pfdt_rate, bandwidth_candidate_mbps)
        return pfdt_config if data_size_gb < thresh else payg_config

    cost_pfdt = pfdt_cost(node.pfdt_rate, data_size_gb)
    cost_payg = payg_cost(node.payg_rate, bandwidth_candidate_mbps, data_size_gb)
    return pfdt_config if cost_pfdt <= cost_payg else payg_config
