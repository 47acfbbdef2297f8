"""Render a planned path as chained WireGuard tunnels.

Each path node gets an overlay address, a fresh Curve25519 keypair and
peer entries for its path-adjacent nodes. AllowedIPs are set so cryptokey
routing forwards a packet addressed to the destination overlay address
hop by hop along the planned order (and symmetrically in reverse).
Interior hops terminate one tunnel and re-encrypt into the next.
"""

from __future__ import annotations

import base64
import ipaddress
import json
import secrets
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey

from budgetpath.planner import Plan
from budgetpath.topology import Topology

DEFAULT_KEEPALIVE_S = 25
DEFAULT_LISTEN_PORT = 51820


class TunnelError(ValueError):
    """Invalid tunnel build or parse inputs."""


def clamp_scalar(raw: bytes) -> bytes:
    """Clamp 32 entropy bytes into a valid Curve25519 scalar."""
    if len(raw) != 32:
        raise TunnelError(f"scalar must be 32 bytes, got {len(raw)}")
    scalar = bytearray(raw)
    scalar[0] &= 248
    scalar[31] &= 127
    scalar[31] |= 64
    return bytes(scalar)


@dataclass(frozen=True)
class KeyPair:
    private: bytes  # clamped 32-byte scalar
    public: bytes  # Curve25519 point

    @property
    def private_b64(self) -> str:
        return base64.b64encode(self.private).decode()

    @property
    def public_b64(self) -> str:
        return base64.b64encode(self.public).decode()


def generate_keypair(entropy: bytes) -> KeyPair:
    """Deterministically derive a clamped keypair from 32 entropy bytes."""
    private = clamp_scalar(entropy)
    public = (
        X25519PrivateKey.from_private_bytes(private)
        .public_key()
        .public_bytes(serialization.Encoding.Raw, serialization.PublicFormat.Raw)
    )
    return KeyPair(private, public)


def keypair_from_private_b64(text: str) -> KeyPair:
    raw = base64.b64decode(text)
    if raw != clamp_scalar(raw):
        raise TunnelError("private key is not clamped")
    return generate_keypair(raw)


@dataclass(frozen=True)
class PeerEntry:
    public_key_b64: str
    endpoint: str
    allowed_ips: tuple[str, ...]
    keepalive_s: Optional[int] = DEFAULT_KEEPALIVE_S


@dataclass(frozen=True)
class TunnelSpec:
    node_id: int
    overlay_address: str  # host address with prefix length, e.g. 10.44.0.1/24
    listen_port: int
    keypair: KeyPair
    peers: tuple[PeerEntry, ...]

    @property
    def is_relay(self) -> bool:
        return len(self.peers) == 2


def build_tunnels(
    plan: Plan,
    topology: Topology,
    overlay_subnet: str = "10.44.0.0/24",
    base_port: int = DEFAULT_LISTEN_PORT,
    entropy_source: Optional[Callable[[], bytes]] = None,
    identity_keys: Optional[dict[int, KeyPair]] = None,
) -> list[TunnelSpec]:
    """One TunnelSpec per path node, chained along the planned hop order.

    Keys are fresh per build by default; `identity_keys` (node id -> pair)
    supplies stable identities for the nodes it covers.

    The i-th path node gets the i-th usable host address of the overlay
    subnet. The toward-destination peer carries the /32 (or /128) overlay
    addresses of every downstream node, the toward-source peer every
    upstream one, so transit traffic is routed onward at each relay.
    Distinct hosts share `base_port`; when two path nodes share a public
    address (loopback test setups) each node gets base_port + path index.
    """
    path = plan.path
    if len(path) < 2:
        raise TunnelError(f"path must have at least 2 nodes, got {len(path)}")
    if entropy_source is None:
        entropy_source = lambda: secrets.token_bytes(32)

    network = ipaddress.ip_network(overlay_subnet, strict=True)
    hosts = []
    for host in network.hosts():
        hosts.append(host)
        if len(hosts) == len(path):
            break
    if len(hosts) < len(path):
        raise TunnelError(
            f"overlay subnet {overlay_subnet} has fewer than {len(path)} usable hosts"
        )

    public_addresses = [topology.node(i).public_address for i in path]
    shared_host = len(set(public_addresses)) < len(public_addresses)
    ports = [base_port + i if shared_host else base_port for i in range(len(path))]
    identity_keys = identity_keys or {}
    keypairs = [
        identity_keys[node_id] if node_id in identity_keys else generate_keypair(entropy_source())
        for node_id in path
    ]
    host_bits = network.max_prefixlen

    def host_prefix(index: int) -> str:
        return f"{hosts[index]}/{host_bits}"

    specs = []
    for i, node_id in enumerate(path):
        peers = []
        if i > 0:
            peers.append(
                PeerEntry(
                    public_key_b64=keypairs[i - 1].public_b64,
                    endpoint=f"{public_addresses[i - 1]}:{ports[i - 1]}",
                    allowed_ips=tuple(host_prefix(j) for j in range(i)),
                )
            )
        if i < len(path) - 1:
            peers.append(
                PeerEntry(
                    public_key_b64=keypairs[i + 1].public_b64,
                    endpoint=f"{public_addresses[i + 1]}:{ports[i + 1]}",
                    allowed_ips=tuple(host_prefix(j) for j in range(i + 1, len(path))),
                )
            )
        specs.append(
            TunnelSpec(
                node_id=node_id,
                overlay_address=f"{hosts[i]}/{network.prefixlen}",
                listen_port=ports[i],
                keypair=keypairs[i],
                peers=tuple(peers),
            )
        )
    return specs


def render_conf(spec: TunnelSpec) -> str:
    """wg-quick compatible INI text; field order is part of the contract."""
    lines = [f"# Node: {spec.node_id}"]
    if spec.is_relay:
        lines.append("# Relay node: enable IP forwarding (e.g. net.ipv4.ip_forward=1) so transit traffic is passed on.")
    lines += [
        "[Interface]",
        f"PrivateKey = {spec.keypair.private_b64}",
        f"Address = {spec.overlay_address}",
        f"ListenPort = {spec.listen_port}",
    ]
    for peer in spec.peers:
        lines += [
            "",
            "[Peer]",
            f"PublicKey = {peer.public_key_b64}",
            f"Endpoint = {peer.endpoint}",
            f"AllowedIPs = {', '.join(peer.allowed_ips)}",
        ]
        if peer.keepalive_s is not None:
            lines.append(f"PersistentKeepalive = {peer.keepalive_s}")
    return "\n".join(lines) + "\n"


def parse_conf(text: str) -> TunnelSpec:
    """Inverse of render_conf; round-trips every spec this module emits."""
    node_id: Optional[int] = None
    interface: dict[str, str] = {}
    peers: list[dict[str, str]] = []
    current: Optional[dict[str, str]] = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# Node:"):
                node_id = int(line.split(":", 1)[1])
            continue
        if line == "[Interface]":
            current = interface
        elif line == "[Peer]":
            current = {}
            peers.append(current)
        else:
            if current is None or "=" not in line:
                raise TunnelError(f"unparseable line: {line!r}")
            key, value = line.split("=", 1)
            current[key.strip()] = value.strip()
    if node_id is None or "PrivateKey" not in interface:
        raise TunnelError("missing node comment or [Interface] section")
    return TunnelSpec(
        node_id=node_id,
        overlay_address=interface["Address"],
        listen_port=int(interface["ListenPort"]),
        keypair=keypair_from_private_b64(interface["PrivateKey"]),
        peers=tuple(
            PeerEntry(
                public_key_b64=p["PublicKey"],
                endpoint=p["Endpoint"],
                allowed_ips=tuple(s.strip() for s in p["AllowedIPs"].split(",")),
                keepalive_s=int(p["PersistentKeepalive"]) if "PersistentKeepalive" in p else None,
            )
            for p in peers
        ),
    )


def write_tunnel_files(specs: list[TunnelSpec], topology: Topology, out_dir) -> dict:
    """Write one conf per node plus a manifest mapping names to keys/files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {}
    for spec in specs:
        node = topology.node(spec.node_id)
        conf_name = f"{node.name}.conf"
        (out / conf_name).write_text(render_conf(spec))
        manifest[node.name] = {
            "public_address": node.public_address,
            "conf_file": conf_name,
            "public_key": spec.keypair.public_b64,
        }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
