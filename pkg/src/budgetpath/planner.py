"""Transfer planning: billing-aware weight construction plus the bandwidth
binary search that shrinks PAYG rates until a budget-feasible path exists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from budgetpath.billing import (
    BillingMethod,
    NodeBillingConfig,
    TransferRequest,
    edge_latency,
    node_cost,
    select_billing,
)
from budgetpath.search import (
    PathResult,
    ReconstructionError,
    SearchError,
    WeightMatrices,
    search_min_latency,
)
from budgetpath.topology import Topology


@dataclass(frozen=True)
class Plan:
    """A chosen path with per-node billing and its predicted cost/latency.

    `configs` covers every node: on-path nodes except the destination carry
    a real method; the destination and off-path nodes are NONE (the final
    hop has no billed egress).
    """

    path: tuple[int, ...]
    configs: dict[int, NodeBillingConfig]
    predicted_cost_usd: float
    predicted_latency_s: float
    fraction_k: float
    iterations_used: int


@dataclass
class BinarySearchState:
    """Bracketed fraction search over a uniform bandwidth scale factor."""

    k: float = 0.5
    k_lower: float = 0.0
    k_upper: float = 1.0
    iteration: int = 0
    best_plan: Optional[Plan] = field(default=None)


def build_weights(
    topology: Topology,
    request: TransferRequest,
    fraction_k: float,
    rule: str = "threshold",
) -> tuple[WeightMatrices, dict[int, NodeBillingConfig]]:
    """Weights for one candidate configuration at bandwidth fraction `fraction_k`.

    Every node's PAYG candidate bandwidth is fraction_k times its cap; the
    billing rule then picks the method (PFDT restores the full rate). The
    egress cost of node i is attached to all of its outgoing edges; edge
    latency uses the sending node's configured bandwidth.
    """
    if not 0 < fraction_k <= 1:
        raise ValueError(f"fraction_k must be in (0, 1], got {fraction_k}")
    n = len(topology)
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    adjacency = np.zeros((n, n), dtype=bool)

    configs: dict[int, NodeBillingConfig] = {}
    for node in topology.nodes:
        configs[node.id] = select_billing(
            node, fraction_k * node.max_egress_mbps, request.data_size_gb, rule
        )
    for link in topology.links:
        config = configs[link.src]
        adjacency[link.src, link.dst] = True
        a[link.src, link.dst] = node_cost(topology.node(link.src), config, request.data_size_gb)
        b[link.src, link.dst] = edge_latency(link.rtt_s, request.data_size_gb, config.bandwidth_mbps)
    return WeightMatrices(a, b, adjacency), configs


def _finalize(
    topology: Topology,
    request: TransferRequest,
    result: PathResult,
    configs: dict[int, NodeBillingConfig],
    fraction_k: float,
    iterations_used: int,
) -> Plan:
    """Mask off-path nodes and recompute cost/latency from first principles."""
    on_path_senders = set(result.path[:-1])
    final_configs = {
        node_id: (
            config
            if node_id in on_path_senders
            else NodeBillingConfig(BillingMethod.NONE, 0.0)
        )
        for node_id, config in configs.items()
    }
    cost = sum(
        node_cost(topology.node(i), final_configs[i], request.data_size_gb)
        for i in result.path[:-1]
    )
    latency = sum(
        edge_latency(topology.rtt(u, v), request.data_size_gb, final_configs[u].bandwidth_mbps)
        for u, v in zip(result.path, result.path[1:])
    )
    return Plan(result.path, final_configs, cost, latency, fraction_k, iterations_used)


def plan_transfer_with_state(
    topology: Topology,
    request: TransferRequest,
    rule: str = "threshold",
) -> tuple[Optional[Plan], BinarySearchState]:
    """Plan a transfer, returning the final bracket state alongside the plan.

    Step 1 tries full bandwidth; on success the plan is returned with zero
    binary iterations. Otherwise a uniform bandwidth fraction is binary
    searched for exactly `max_iterations` rounds, keeping the most recent
    feasible plan. None means no round ever produced a feasible path: the
    budget is insufficient.
    """
    if not 0 <= request.source < len(topology):
        raise SearchError(f"source {request.source} is not a valid node id")
    if not 0 <= request.destination < len(topology):
        raise SearchError(f"destination {request.destination} is not a valid node id")

    def checked_search(weights: WeightMatrices) -> Optional[PathResult]:
        # a detected reconstruction abort means the search produced nothing
        # trustworthy at this configuration; treat it like an infeasible round
        try:
            return search_min_latency(
                weights, request.source, request.destination, request.budget_usd
            )
        except ReconstructionError:
            return None

    state = BinarySearchState()
    weights, configs = build_weights(topology, request, 1.0, rule)
    result = checked_search(weights)
    if result is not None:
        state.best_plan = _finalize(topology, request, result, configs, 1.0, 0)
        return state.best_plan, state

    while state.iteration < request.max_iterations:
        weights, configs = build_weights(topology, request, state.k, rule)
        result = checked_search(weights)
        if result is not None:
            state.best_plan = _finalize(
                topology, request, result, configs, state.k, request.max_iterations
            )
            state.k_lower = state.k
            state.k = (state.k + state.k_upper) / 2.0
        else:
            state.k_upper = state.k
            state.k = (state.k + state.k_lower) / 2.0
        state.iteration += 1
    return state.best_plan, state


def plan_transfer(
    topology: Topology,
    request: TransferRequest,
    rule: str = "threshold",
) -> Optional[Plan]:
    plan, _ = plan_transfer_with_state(topology, request, rule)
    return plan


_METHOD_NAMES = {BillingMethod.PAYG: "payg", BillingMethod.PFDT: "pfdt"}
_METHOD_VALUES = {"payg": BillingMethod.PAYG, "pfdt": BillingMethod.PFDT}


def plan_to_dict(plan: Plan) -> dict:
    """JSON-ready form; `per_node` lists only nodes with a billed method."""
    return {
        "path": list(plan.path),
        "per_node": {
            str(node_id): {
                "method": _METHOD_NAMES[config.method],
                "bandwidth_mbps": config.bandwidth_mbps,
            }
            for node_id, config in sorted(plan.configs.items())
            if config.method is not BillingMethod.NONE
        },
        "predicted_cost_usd": plan.predicted_cost_usd,
        "predicted_latency_s": plan.predicted_latency_s,
        "fraction_k": plan.fraction_k,
        "iterations_used": plan.iterations_used,
    }


def plan_from_dict(doc: dict, n_nodes: int) -> Plan:
    configs = {i: NodeBillingConfig(BillingMethod.NONE, 0.0) for i in range(n_nodes)}
    for node_id, entry in doc["per_node"].items():
        configs[int(node_id)] = NodeBillingConfig(
            _METHOD_VALUES[entry["method"]], float(entry["bandwidth_mbps"])
        )
    return Plan(
        path=tuple(doc["path"]),
        configs=configs,
        predicted_cost_usd=float(doc["predicted_cost_usd"]),
        predicted_latency_s=float(doc["predicted_latency_s"]),
        fraction_k=float(doc["fraction_k"]),
        iterations_used=int(doc["iterations_used"]),
    )


def save_plan(plan: Plan, path) -> None:
    with open(path, "w") as fh:
        json.dump(plan_to_dict(plan), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_plan(path, n_nodes: int) -> Plan:
    with open(path) as fh:
        return plan_from_dict(json.load(fh), n_nodes)
