"""Two-weight path search: minimize summed latency under a summed-cost cap.

`search_min_latency` is a Dijkstra variant keeping a single best-latency
label per node while discarding labels whose accumulated cost exceeds the
cap. The single-label pruning is a heuristic: it can discard a feasible
label whose higher latency would have been the only way to stay under the
cap further on. `enumerate_best_path` is the exact (exponential) reference
used to quantify that gap on small graphs.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np


class SearchError(ValueError):
    """Invalid search inputs."""


class ReconstructionError(RuntimeError):
    """The predecessor chain produced a path violating the cost cap.

    The shared predecessor array holds one parent per node and later labels
    may overwrite it; reconstruction is validated so corruption surfaces as
    this error instead of a silently wrong answer.
    """


@dataclass(frozen=True)
class WeightMatrices:
    """Per-edge cost (a, USD) and latency (b, seconds) weights plus adjacency."""

    a: np.ndarray
    b: np.ndarray
    adjacency: np.ndarray

    def __post_init__(self) -> None:
        n = self.adjacency.shape[0]
        if self.adjacency.shape != (n, n) or self.a.shape != (n, n) or self.b.shape != (n, n):
            raise SearchError("weight matrices must be square and same-shaped")
        if self.adjacency.diagonal().any():
            raise SearchError("self-loops are not allowed")
        present_a = self.a[self.adjacency]
        present_b = self.b[self.adjacency]
        for name, vals in (("a", present_a), ("b", present_b)):
            if vals.size and (not np.isfinite(vals).all() or (vals < 0).any()):
                raise SearchError(f"{name} weights on present edges must be finite and >= 0")

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def successors(self, node: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[node])


@dataclass(frozen=True)
class PathResult:
    """A concrete path with its recomputed cost and latency totals."""

    path: tuple[int, ...]
    total_a: float
    total_b: float


def _path_totals(weights: WeightMatrices, path: tuple[int, ...]) -> tuple[float, float]:
    total_a = 0.0
    total_b = 0.0
    for u, v in zip(path, path[1:]):
        if not weights.adjacency[u, v]:
            raise ReconstructionError(f"reconstructed path uses absent edge ({u}, {v})")
        total_a += float(weights.a[u, v])
        total_b += float(weights.b[u, v])
    return total_a, total_b


def _check_node(weights: WeightMatrices, node: int, label: str) -> None:
    if not 0 <= node < weights.n:
        raise SearchError(f"{label} {node} is not a valid node id")


def search_min_latency(
    weights: WeightMatrices,
    source: int,
    destination: int,
    cost_cap: float,
) -> PathResult | None:
    """Least-latency path whose summed cost stays within `cost_cap`.

    Pops the frontier label with minimum accumulated latency (ties broken
    by accumulated cost, then node id) and returns on the first destination
    pop. A label is only pushed when its cost respects the cap and its
    latency strictly improves the node's best. None means no label ever
    reached the destination, i.e. the configuration is too expensive.
    """
    _check_node(weights, source, "source")
    _check_node(weights, destination, "destination")
    if cost_cap < 0:
        raise SearchError(f"cost_cap must be >= 0, got {cost_cap}")

    n = weights.n
    prev = np.full(n, -1, dtype=int)
    min_b = np.full(n, math.inf)
    min_b[source] = 0.0
    frontier: list[tuple[float, float, int]] = [(0.0, 0.0, source)]

    while frontier:
        curr_b, curr_a, node = heapq.heappop(frontier)
        if node == destination:
            path = [node]
            while path[-1] != source:
                parent = int(prev[path[-1]])
                if parent < 0 or parent in path:
                    raise ReconstructionError(f"broken predecessor chain at node {path[-1]}")
                path.append(parent)
            path.reverse()
            total_a, total_b = _path_totals(weights, tuple(path))
            if total_a > cost_cap:
                raise ReconstructionError(
                    f"reconstructed path cost {total_a} exceeds cap {cost_cap}"
                )
            return PathResult(tuple(path), total_a, total_b)
        for nxt in weights.successors(node):
            new_a = curr_a + float(weights.a[node, nxt])
            new_b = curr_b + float(weights.b[node, nxt])
            if new_a <= cost_cap and new_b < min_b[nxt]:
                min_b[nxt] = new_b
                prev[nxt] = node
                heapq.heappush(frontier, (new_b, new_a, int(nxt)))
    return None


def enumerate_best_path(
    weights: WeightMatrices,
    source: int,
    destination: int,
    cost_cap: float,
    max_nodes: int = 12,
    force: bool = False,
) -> PathResult | None:
    """Exact reference: enumerate every simple path and keep the best.

    Minimizes total latency among cap-feasible paths; ties broken by lower
    cost, then lexicographic path. Exponential, so guarded to small graphs
    unless `force` is set.
    """
    _check_node(weights, source, "source")
    _check_node(weights, destination, "destination")
    if weights.n > max_nodes and not force:
        raise SearchError(f"oracle enumeration refused for n={weights.n} > {max_nodes}")

    best: PathResult | None = None

    def visit(node: int, total_a: float, total_b: float, path: list[int], on_path: set[int]) -> None:
        nonlocal best
        if total_a > cost_cap:
            return
        if node == destination:
            candidate = PathResult(tuple(path), total_a, total_b)
            if best is None or (candidate.total_b, candidate.total_a, candidate.path) < (
                best.total_b,
                best.total_a,
                best.path,
            ):
                best = candidate
            return
        for nxt in weights.successors(node):
            nxt = int(nxt)
            if nxt in on_path:
                continue
            path.append(nxt)
            on_path.add(nxt)
            visit(nxt, total_a + float(weights.a[node, nxt]), total_b + float(weights.b[node, nxt]), path, on_path)
            on_path.remove(nxt)
            path.pop()

    visit(source, 0.0, 0.0, [source], {source})
    return best
