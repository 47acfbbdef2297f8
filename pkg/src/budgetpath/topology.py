"""Data-plane graph model: cloud instances, links, and RTT probing.

Topology files are JSON documents with top-level `nodes` and `links`
arrays. RTTs are milliseconds at the file boundary and seconds internally.
"""

from __future__ import annotations

import json
import logging
import math
import shutil
import statistics
import subprocess
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional

log = logging.getLogger(__name__)

_NODE_KEYS = {
    "id",
    "name",
    "public_address",
    "max_egress_mbps",
    "payg_usd_per_mbps_hour",
    "pfdt_usd_per_gb",
}
_LINK_KEYS = {"src", "dst", "rtt_ms"}


class TopologyError(ValueError):
    """Raised for malformed or invalid topology documents."""


@dataclass(frozen=True)
class NodeSpec:
    """One cloud instance / edge router.

    Rates may be absent (None) individually, but not both: a node must
    offer at least one billing method.
    """

    id: int
    name: str
    public_address: str
    max_egress_mbps: float
    payg_rate: Optional[float]  # USD per Mbps per hour
    pfdt_rate: Optional[float]  # USD per GB

    def validate(self) -> None:
        if self.max_egress_mbps <= 0:
            raise TopologyError(f"node {self.id} ({self.name}): max_egress_mbps must be > 0")
        if self.payg_rate is None and self.pfdt_rate is None:
            raise TopologyError(f"node {self.id} ({self.name}): no billing rate given")
        for label, rate in (("payg", self.payg_rate), ("pfdt", self.pfdt_rate)):
            if rate is not None and (rate < 0 or not math.isfinite(rate)):
                raise TopologyError(f"node {self.id} ({self.name}): invalid {label} rate {rate}")


@dataclass(frozen=True)
class LinkSpec:
    """A directed physical connection; rtt_s is the measured round trip in seconds."""

    src: int
    dst: int
    rtt_s: float


@dataclass(frozen=True)
class Topology:
    nodes: tuple[NodeSpec, ...]
    links: tuple[LinkSpec, ...]
    directed: bool = True

    def __post_init__(self) -> None:
        ids = [n.id for n in self.nodes]
        if ids != list(range(len(self.nodes))):
            raise TopologyError(f"node ids must be unique and contiguous from 0, got {ids}")
        for node in self.nodes:
            node.validate()
        seen: set[tuple[int, int]] = set()
        for link in self.links:
            if link.src == link.dst:
                raise TopologyError(f"link ({link.src}, {link.dst}): self-loop")
            for end in (link.src, link.dst):
                if not 0 <= end < len(self.nodes):
                    raise TopologyError(
                        f"link ({link.src}, {link.dst}): endpoint {end} is not a node id"
                    )
            if link.rtt_s < 0 or not math.isfinite(link.rtt_s):
                raise TopologyError(f"link ({link.src}, {link.dst}): invalid rtt {link.rtt_s}")
            if (link.src, link.dst) in seen:
                raise TopologyError(f"duplicate directed link ({link.src}, {link.dst})")
            seen.add((link.src, link.dst))

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, node_id: int) -> NodeSpec:
        return self.nodes[node_id]

    def rtt(self, src: int, dst: int) -> float:
        for link in self.links:
            if link.src == src and link.dst == dst:
                return link.rtt_s
        raise KeyError(f"no link ({src}, {dst})")

    def neighbors(self, node_id: int) -> list[int]:
        return sorted(link.dst for link in self.links if link.src == node_id)


def expand_undirected(topology: Topology) -> Topology:
    """Add the reverse of every link with the same rtt. Idempotent.

    A pre-existing reverse link with a different rtt is a conflict, not a
    silent overwrite.
    """
    by_pair = {(l.src, l.dst): l for l in topology.links}
    links = list(topology.links)
    for link in topology.links:
        reverse = by_pair.get((link.dst, link.src))
        if reverse is None:
            links.append(LinkSpec(link.dst, link.src, link.rtt_s))
        elif reverse.rtt_s != link.rtt_s:
            raise TopologyError(
                f"links ({link.src}, {link.dst}) and ({link.dst}, {link.src}) disagree on rtt "
                "in undirected mode"
            )
    return Topology(topology.nodes, tuple(links), directed=True)


def _parse_rate(entry: dict, key: str, where: str) -> Optional[float]:
    value = entry.get(key)
    if value is None:
        return None
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise TopologyError(f"{where}: {key} must be a number or null")
    return float(value)


def topology_from_dict(doc: dict, mode: str = "undirected") -> Topology:
    if mode not in ("directed", "undirected"):
        raise TopologyError(f"unknown mode {mode!r}")
    if not isinstance(doc, dict):
        raise TopologyError("topology document must be an object")
    unknown = set(doc) - {"nodes", "links"}
    if unknown:
        raise TopologyError(f"unknown top-level keys: {sorted(unknown)}")

    nodes = []
    for entry in doc.get("nodes", []):
        extra = set(entry) - _NODE_KEYS
        if extra:
            raise TopologyError(f"node entry {entry.get('id')}: unknown keys {sorted(extra)}")
        where = f"node {entry.get('id')}"
        nodes.append(
            NodeSpec(
                id=int(entry["id"]),
                name=str(entry["name"]),
                public_address=str(entry["public_address"]),
                max_egress_mbps=float(entry["max_egress_mbps"]),
                payg_rate=_parse_rate(entry, "payg_usd_per_mbps_hour", where),
                pfdt_rate=_parse_rate(entry, "pfdt_usd_per_gb", where),
            )
        )

    links = []
    for entry in doc.get("links", []):
        extra = set(entry) - _LINK_KEYS
        if extra:
            raise TopologyError(
                f"link ({entry.get('src')}, {entry.get('dst')}): unknown keys {sorted(extra)}"
            )
        links.append(LinkSpec(int(entry["src"]), int(entry["dst"]), float(entry["rtt_ms"]) / 1000.0))

    topology = Topology(tuple(nodes), tuple(links), directed=True)
    if mode == "undirected":
        topology = expand_undirected(topology)
    return topology


def topology_to_dict(topology: Topology) -> dict:
    """Serialize as a fully directed document; re-loading in directed mode round-trips."""
    return {
        "nodes": [
            {
                "id": n.id,
                "name": n.name,
                "public_address": n.public_address,
                "max_egress_mbps": n.max_egress_mbps,
                "payg_usd_per_mbps_hour": n.payg_rate,
                "pfdt_usd_per_gb": n.pfdt_rate,
            }
            for n in topology.nodes
        ],
        "links": [{"src": l.src, "dst": l.dst, "rtt_ms": l.rtt_s * 1000.0} for l in topology.links],
    }


def load_topology(path, mode: str = "undirected") -> Topology:
    """Load and validate a topology file; undirected mode symmetrizes the link set."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"{path}: malformed JSON: {exc}") from exc
    except OSError as exc:
        raise TopologyError(f"{path}: {exc}") from exc
    return topology_from_dict(doc, mode=mode)


def save_topology(topology: Topology, path) -> None:
    with open(path, "w") as fh:
        json.dump(topology_to_dict(topology), fh, indent=2)
        fh.write("\n")


def _ping_once(address: str, timeout_s: float = 2.0) -> Optional[float]:
    """Single ICMP echo via the system ping; returns RTT in seconds or None."""
    cmd = ["ping", "-c", "1", "-W", str(int(math.ceil(timeout_s))), address]
    try:
        out = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout_s + 2)
    except subprocess.TimeoutExpired:
        return None
    if out.returncode != 0:
        return None
    for token in out.stdout.split():
        if token.startswith("time="):
            try:
                return float(token[len("time=") :]) / 1000.0
            except ValueError:
                return None
    return None


def probe_rtts(
    topology: Topology,
    attempts: int,
    prober: Optional[Callable[[str], Optional[float]]] = None,
) -> Topology:
    """Re-measure every link's rtt as the median of `attempts` probes.

    Links whose probes all fail keep their original rtt and are logged as
    warnings. Only the availability of a probing mechanism is fatal.
    """
    if attempts < 1:
        raise ValueError(f"attempts must be >= 1, got {attempts}")
    if prober is None:
        if shutil.which("ping") is None:
            raise RuntimeError("no ping executable available for probing")
        prober = _ping_once

    links = []
    for link in topology.links:
        address = topology.node(link.dst).public_address
        samples = [s for s in (prober(address) for _ in range(attempts)) if s is not None]
        if samples:
            links.append(replace(link, rtt_s=statistics.median(samples)))
        else:
            log.warning(
                "link (%d, %d): no probe succeeded for %s; keeping rtt %.3f ms",
                link.src,
                link.dst,
                address,
                link.rtt_s * 1000.0,
            )
            links.append(link)
    return Topology(topology.nodes, tuple(links), directed=topology.directed)


def iter_edges(topology: Topology) -> Iterable[tuple[int, int, float]]:
    for link in topology.links:
        yield link.src, link.dst, link.rtt_s
