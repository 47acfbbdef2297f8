"""Store-and-forward transfer prediction and planner-vs-baseline comparison.

Latency is additive per hop: every relay retransmits the full payload, so
each edge contributes its own propagation plus transmission time. The
naive baseline is a minimum-hop path with every node at full bandwidth on
per-volume billing, budget ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from budgetpath.billing import (
    BillingMethod,
    NodeBillingConfig,
    TransferRequest,
    edge_latency,
    node_cost,
)
from budgetpath.planner import build_weights, plan_transfer
from budgetpath.search import enumerate_best_path
from budgetpath.topology import Topology

NAIVE_DEFINITION = (
    "naive baseline: minimum-hop path (ties by summed rtt, then lexicographic), "
    "all nodes at full bandwidth, per-volume billing, budget ignored"
)


class SimulationError(ValueError):
    pass


def simulate_transfer(
    topology: Topology,
    path: Sequence[int],
    configs: dict[int, NodeBillingConfig],
    data_size_gb: float,
) -> tuple[float, float]:
    """Predicted (latency_s, cost_usd) of sending the payload along `path`."""
    path = tuple(path)
    for node_id in path[:-1]:
        config = configs.get(node_id)
        if config is None or config.method is BillingMethod.NONE:
            raise SimulationError(f"path node {node_id} has no billing config")
    latency = sum(
        edge_latency(topology.rtt(u, v), data_size_gb, configs[u].bandwidth_mbps)
        for u, v in zip(path, path[1:])
    )
    cost = sum(node_cost(topology.node(i), configs[i], data_size_gb) for i in path[:-1])
    return latency, cost


def naive_baseline(
    topology: Topology, request: TransferRequest
) -> tuple[tuple[int, ...], dict[int, NodeBillingConfig]]:
    """Minimum-hop path at full bandwidth with per-volume (PFDT) billing.

    Hop-count ties are broken by summed rtt, then lexicographic path.
    Nodes without a per-volume rate fall back to PAYG at full bandwidth.
    """
    src, dst = request.source, request.destination
    if src == dst:
        return (src,), {i: NodeBillingConfig(BillingMethod.NONE, 0.0) for i in range(len(topology))}

    # BFS levels, then enumerate all minimum-hop paths over the level DAG.
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt_frontier = []
        for u in frontier:
            for v in topology.neighbors(u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt_frontier.append(v)
        frontier = nxt_frontier
    if dst not in dist:
        raise SimulationError(f"no path from {src} to {dst}")

    candidates: list[tuple[float, tuple[int, ...]]] = []

    def collect(node: int, path: list[int], rtt_sum: float) -> None:
        if node == dst:
            candidates.append((rtt_sum, tuple(path)))
            return
        for v in topology.neighbors(node):
            if dist.get(v) == dist[node] + 1:
                path.append(v)
                collect(v, path, rtt_sum + topology.rtt(node, v))
                path.pop()

    collect(src, [src], 0.0)
    _, path = min(candidates, key=lambda item: (item[0], item[1]))

    configs = {i: NodeBillingConfig(BillingMethod.NONE, 0.0) for i in range(len(topology))}
    for node_id in path[:-1]:
        node = topology.node(node_id)
        method = BillingMethod.PFDT if node.pfdt_rate is not None else BillingMethod.PAYG
        configs[node_id] = NodeBillingConfig(method, node.max_egress_mbps)
    return path, configs


@dataclass(frozen=True)
class ReportRow:
    label: str
    path: Optional[tuple[int, ...]]
    latency_s: Optional[float]
    cost_usd: Optional[float]
    feasible: bool


@dataclass(frozen=True)
class SimulationReport:
    rows: tuple[ReportRow, ...]
    improvement: Optional[float]  # (naive - planner) latency, relative to naive

    def to_dict(self) -> dict:
        return {
            "definition": NAIVE_DEFINITION,
            "rows": [
                {
                    "label": r.label,
                    "path": list(r.path) if r.path is not None else None,
                    "latency_s": r.latency_s,
                    "cost_usd": r.cost_usd,
                    "feasible": r.feasible,
                }
                for r in self.rows
            ],
            "improvement": self.improvement,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        header = ["label", "path", "latency_s", "cost_usd", "feasible"]
        cells = [header]
        for r in self.rows:
            cells.append(
                [
                    r.label,
                    "->".join(map(str, r.path)) if r.path is not None else "-",
                    f"{r.latency_s:.3f}" if r.latency_s is not None else "-",
                    f"{r.cost_usd:.4f}" if r.cost_usd is not None else "-",
                    "yes" if r.feasible else "no",
                ]
            )
        widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
        lines = [f"# {NAIVE_DEFINITION}"]
        for row in cells:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if self.improvement is not None:
            lines.append(f"latency improvement over naive: {self.improvement:.1%}")
        return "\n".join(lines) + "\n"


def compare(
    topology: Topology,
    request: TransferRequest,
    rule: str = "threshold",
    oracle_max_nodes: int = 12,
) -> SimulationReport:
    """Planner vs. naive baseline vs. (on small graphs) the exact oracle."""
    rows = []
    plan = plan_transfer(topology, request, rule)
    planner_latency = None
    if plan is not None:
        latency, cost = simulate_transfer(topology, plan.path, plan.configs, request.data_size_gb)
        planner_latency = latency
        rows.append(ReportRow("planner", plan.path, latency, cost, cost <= request.budget_usd))
    else:
        rows.append(ReportRow("planner (insufficient budget)", None, None, None, False))

    naive_path, naive_configs = naive_baseline(topology, request)
    naive_latency, naive_cost = simulate_transfer(
        topology, naive_path, naive_configs, request.data_size_gb
    )
    rows.append(
        ReportRow("naive", naive_path, naive_latency, naive_cost, naive_cost <= request.budget_usd)
    )

    if plan is not None and len(topology) <= oracle_max_nodes:
        weights, configs = build_weights(topology, request, plan.fraction_k, rule)
        best = enumerate_best_path(
            weights, request.source, request.destination, request.budget_usd, oracle_max_nodes
        )
        if best is not None:
            oracle_configs = {
                i: configs[i] if i in set(best.path[:-1])
                else NodeBillingConfig(BillingMethod.NONE, 0.0)
                for i in configs
            }
            latency, cost = simulate_transfer(
                topology, best.path, oracle_configs, request.data_size_gb
            )
            rows.append(
                ReportRow("oracle", best.path, latency, cost, cost <= request.budget_usd)
            )

    improvement = None
    if planner_latency is not None and naive_latency > 0:
        improvement = (naive_latency - planner_latency) / naive_latency
    return SimulationReport(tuple(rows), improvement)
