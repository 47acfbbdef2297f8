"""Shared test machinery: random instance generators, an independent
X25519 reference implementation, and a cryptokey-routing walker.
"""

from __future__ import annotations

import math
import random

import numpy as np

from budgetpath.search import WeightMatrices
from budgetpath.topology import LinkSpec, NodeSpec, Topology
from budgetpath.tunnels import TunnelSpec, clamp_scalar

# --- random instances -------------------------------------------------

def random_weights(rng: random.Random, n: int, edge_prob: float = 0.45) -> WeightMatrices:
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    adjacency = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < edge_prob:
                adjacency[i, j] = True
                a[i, j] = rng.uniform(0.0, 1.0)
                b[i, j] = rng.uniform(0.01, 1.0)
    return WeightMatrices(a, b, adjacency)


def random_topology(rng: random.Random, n_min: int = 2, n_max: int = 7) -> Topology:
    n = rng.randint(n_min, n_max)
    nodes = []
    for i in range(n):
        roll = rng.random()
        payg = round(rng.uniform(0.005, 0.05), 4) if roll < 0.85 else None
        pfdt = round(rng.uniform(0.01, 0.2), 4) if (roll > 0.15 or payg is None) else None
        nodes.append(
            NodeSpec(
                id=i,
                name=f"n{i}",
                public_address=f"203.0.113.{100 + i}",
                max_egress_mbps=rng.choice([10.0, 50.0, 100.0, 200.0]),
                payg_rate=payg,
                pfdt_rate=pfdt,
            )
        )
    links = []
    seen = set()
    # spanning chain keeps most instances connected, then random extras
    order = list(range(n))
    rng.shuffle(order)
    for u, v in zip(order, order[1:]):
        links.append((u, v))
        seen.update([(u, v)])
    for _ in range(n):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v and (u, v) not in seen:
            seen.add((u, v))
            links.append((u, v))
    link_specs = []
    for u, v in links:
        rtt = rng.uniform(0.001, 0.3)
        link_specs.append(LinkSpec(u, v, rtt))
        if (v, u) not in seen:
            seen.add((v, u))
            link_specs.append(LinkSpec(v, u, rtt))
    return Topology(tuple(nodes), tuple(link_specs))


# --- independent X25519 reference (Montgomery ladder) ------------------

_P = 2**255 - 19
_A24 = 121665
BASE_POINT = (9).to_bytes(32, "little")


def x25519_reference(scalar: bytes, point: bytes = BASE_POINT) -> bytes:
    k = int.from_bytes(clamp_scalar(scalar), "little")
    x1 = int.from_bytes(point, "little") & ((1 << 255) - 1)
    x2, z2, x3, z3 = 1, 0, x1, 1
    swap = 0
    for t in reversed(range(255)):
        k_t = (k >> t) & 1
        swap ^= k_t
        if swap:
            x2, x3, z2, z3 = x3, x2, z3, z2
        swap = k_t
        a = (x2 + z2) % _P
        aa = a * a % _P
        b = (x2 - z2) % _P
        bb = b * b % _P
        e = (aa - bb) % _P
        c = (x3 + z3) % _P
        d = (x3 - z3) % _P
        da = d * a % _P
        cb = c * b % _P
        x3 = (da + cb) % _P
        x3 = x3 * x3 % _P
        z3 = (da - cb) % _P
        z3 = z3 * z3 % _P
        z3 = z3 * x1 % _P
        x2 = aa * bb % _P
        z2 = e * (aa + _A24 * e) % _P
    if swap:
        x2, z2 = x3, z3
    return (x2 * pow(z2, _P - 2, _P) % _P).to_bytes(32, "little")


# --- cryptokey routing simulation --------------------------------------

def route_packet(specs: list[TunnelSpec], start: TunnelSpec, dst_ip: str) -> list[int]:
    """Walk a packet through the overlay by longest-prefix AllowedIPs match.

    Returns the node ids visited, destination included. Raises if no peer
    routes the address or a forwarding loop forms.
    """
    import ipaddress

    by_pubkey = {s.keypair.public_b64: s for s in specs}
    dst = ipaddress.ip_address(dst_ip)
    current = start
    visited = [current.node_id]
    for _ in range(len(specs) + 1):
        own = ipaddress.ip_interface(current.overlay_address).ip
        if own == dst:
            return visited
        matches = []
        for peer in current.peers:
            for prefix in peer.allowed_ips:
                net = ipaddress.ip_network(prefix)
                if dst in net:
                    matches.append((net.prefixlen, peer))
        if not matches:
            raise AssertionError(f"node {current.node_id}: no route to {dst}")
        _, peer = max(matches, key=lambda m: m[0])
        current = by_pubkey[peer.public_key_b64]
        visited.append(current.node_id)
    raise AssertionError(f"forwarding loop: {visited}")


def is_connected(weights: WeightMatrices, source: int, destination: int) -> bool:
    seen = {source}
    stack = [source]
    while stack:
        u = stack.pop()
        for v in weights.successors(u):
            if int(v) not in seen:
                seen.add(int(v))
                stack.append(int(v))
    return destination in seen
