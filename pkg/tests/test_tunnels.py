import random

import pytest

from budgetpath.billing import BillingMethod, NodeBillingConfig
from budgetpath.planner import Plan
from budgetpath.topology import LinkSpec, NodeSpec, Topology
from budgetpath.tunnels import (
    TunnelError,
    build_tunnels,
    clamp_scalar,
    generate_keypair,
    parse_conf,
    render_conf,
    write_tunnel_files,
)
from helpers import route_packet, x25519_reference

# RFC 7748 section 6.1 Diffie-Hellman vector (Alice's key pair)
RFC7748_SCALAR = bytes.fromhex(
    "77076d0a7318a57d3c16c17251b26645df4c2f87ebc0992ab177fba51db92c2a")
RFC7748_PUBLIC = bytes.fromhex(
    "8520f0098930a754748b7ddcb43ef75a0dbf3a0d26381af4eba4a98eaa9b4e6a")


def make_topology(n, shared_address=False):
    nodes = tuple(
        NodeSpec(i, f"node{i}", "127.0.0.1" if shared_address else f"198.51.100.{i+1}",
                 100.0, 0.021, 0.081)
        for i in range(n))
    links = []
    for i in range(n - 1):
        links += [LinkSpec(i, i + 1, 0.01), LinkSpec(i + 1, i, 0.01)]
    return Topology(nodes, tuple(links))


def make_plan(path, n):
    configs = {
        i: NodeBillingConfig(BillingMethod.PFDT, 100.0)
        if i in set(path[:-1]) else NodeBillingConfig(BillingMethod.NONE, 0.0)
        for i in range(n)
    }
    return Plan(tuple(path), configs, 0.081 * (len(path) - 1), 80.0 * (len(path) - 1), 1.0, 0)


def seeded_entropy(seed):
    rng = random.Random(seed)
    return lambda: rng.randbytes(32)


class TestKeys:
    def test_clamp_bits(self):
        pair = generate_keypair(bytes([0x42] * 32))
        assert pair.private[0] & 0x07 == 0
        assert pair.private[31] & 0x80 == 0
        assert pair.private[31] & 0x40 == 0x40

    def test_distinct_entropy_distinct_keys(self):
        k1 = generate_keypair(bytes([1] * 32))
        k2 = generate_keypair(bytes([2] * 32))
        assert k1.public != k2.public

    def test_rfc7748_vector(self):
        pair = generate_keypair(RFC7748_SCALAR)
        assert pair.public == RFC7748_PUBLIC
        assert x25519_reference(RFC7748_SCALAR) == RFC7748_PUBLIC

    def test_reference_agrees_on_random_scalars(self):
        rng = random.Random(8)
        for _ in range(10):
            entropy = rng.randbytes(32)
            assert generate_keypair(entropy).public == x25519_reference(entropy)

    def test_base64_form(self):
        pair = generate_keypair(bytes([7] * 32))
        assert len(pair.public_b64) == 44
        assert pair.public_b64.endswith("=")

    def test_rejects_short_entropy(self):
        with pytest.raises(TunnelError):
            generate_keypair(b"short")


class TestBuildTunnels:
    def test_two_node_chain(self):
        topo = make_topology(2)
        specs = build_tunnels(make_plan([0, 1], 2), topo, entropy_source=seeded_entropy(1))
        assert len(specs) == 2
        assert all(len(s.peers) == 1 for s in specs)
        assert specs[0].peers[0].allowed_ips == ("10.44.0.2/32",)
        assert specs[1].peers[0].allowed_ips == ("10.44.0.1/32",)

    def test_four_node_allowed_ips_closure(self):
        topo = make_topology(4)
        specs = build_tunnels(make_plan([0, 1, 2, 3], 4), topo, entropy_source=seeded_entropy(2))
        a = specs[1]  # second hop
        assert len(a.peers) == 2
        toward_source, toward_dest = a.peers
        assert toward_source.allowed_ips == ("10.44.0.1/32",)
        assert toward_dest.allowed_ips == ("10.44.0.3/32", "10.44.0.4/32")
        assert specs[0].overlay_address == "10.44.0.1/24"
        assert [len(s.peers) for s in specs] == [1, 2, 2, 1]

    def test_subnet_exhaustion(self):
        topo = make_topology(4)
        with pytest.raises(TunnelError, match="usable hosts"):
            build_tunnels(make_plan([0, 1, 2, 3], 4), topo, overlay_subnet="10.44.0.0/30",
                          entropy_source=seeded_entropy(3))

    def test_path_too_short(self):
        topo = make_topology(2)
        with pytest.raises(TunnelError, match="at least 2"):
            build_tunnels(make_plan([0], 2), topo)

    def test_shared_address_gets_distinct_ports(self):
        topo = make_topology(3, shared_address=True)
        specs = build_tunnels(make_plan([0, 1, 2], 3), topo, entropy_source=seeded_entropy(4))
        assert [s.listen_port for s in specs] == [51820, 51821, 51822]

    def test_distinct_hosts_share_port(self):
        topo = make_topology(3)
        specs = build_tunnels(make_plan([0, 1, 2], 3), topo, entropy_source=seeded_entropy(4))
        assert {s.listen_port for s in specs} == {51820}

    def test_identity_keys_override_fresh_ones(self):
        topo = make_topology(3)
        stable = generate_keypair(bytes([9] * 32))
        specs = build_tunnels(make_plan([0, 1, 2], 3), topo,
                              entropy_source=seeded_entropy(12),
                              identity_keys={1: stable})
        assert specs[1].keypair == stable
        assert specs[0].keypair != stable
        # peers of the stable node reference its supplied public key
        assert specs[0].peers[0].public_key_b64 == stable.public_b64
        assert specs[2].peers[0].public_key_b64 == stable.public_b64

    def test_key_uniqueness(self):
        topo = make_topology(6)
        specs = build_tunnels(make_plan(list(range(6)), 6), topo,
                              entropy_source=seeded_entropy(5))
        publics = [s.keypair.public_b64 for s in specs]
        assert len(set(publics)) == len(publics)


class TestOverlayRouting:
    @pytest.mark.parametrize("length", [2, 3, 4, 5, 6])
    def test_packets_traverse_planned_order_both_ways(self, length):
        topo = make_topology(length)
        path = list(range(length))
        specs = build_tunnels(make_plan(path, length), topo, entropy_source=seeded_entropy(length))
        forward = route_packet(specs, specs[0], f"10.44.0.{length}")
        assert forward == path
        backward = route_packet(specs, specs[-1], "10.44.0.1")
        assert backward == list(reversed(path))


class TestRenderParse:
    def test_endpoint_has_one_peer_section(self):
        topo = make_topology(3)
        specs = build_tunnels(make_plan([0, 1, 2], 3), topo, entropy_source=seeded_entropy(6))
        assert render_conf(specs[0]).count("[Peer]") == 1
        assert render_conf(specs[1]).count("[Peer]") == 2

    def test_field_order(self):
        topo = make_topology(2)
        spec = build_tunnels(make_plan([0, 1], 2), topo, entropy_source=seeded_entropy(7))[0]
        text = render_conf(spec)
        assert text.index("PrivateKey") < text.index("Address") < text.index("ListenPort")
        peer = text[text.index("[Peer]"):]
        assert peer.index("PublicKey") < peer.index("Endpoint") < peer.index("AllowedIPs")

    def test_round_trip(self):
        topo = make_topology(4)
        for spec in build_tunnels(make_plan([0, 1, 2, 3], 4), topo,
                                  entropy_source=seeded_entropy(8)):
            assert parse_conf(render_conf(spec)) == spec

    def test_relay_forwarding_note(self):
        topo = make_topology(3)
        specs = build_tunnels(make_plan([0, 1, 2], 3), topo, entropy_source=seeded_entropy(9))
        assert "ip_forward" in render_conf(specs[1])
        assert "ip_forward" not in render_conf(specs[0])

    def test_private_key_never_in_peer_sections(self):
        topo = make_topology(4)
        specs = build_tunnels(make_plan([0, 1, 2, 3], 4), topo, entropy_source=seeded_entropy(10))
        privates = {s.keypair.private_b64 for s in specs}
        for spec in specs:
            text = render_conf(spec)
            peer_text = text[text.index("[Peer]"):]
            assert not any(p in peer_text for p in privates)


class TestManifest:
    def test_files_and_manifest(self, tmp_path):
        topo = make_topology(3)
        specs = build_tunnels(make_plan([0, 1, 2], 3), topo, entropy_source=seeded_entropy(11))
        manifest = write_tunnel_files(specs, topo, tmp_path)
        for i in range(3):
            assert (tmp_path / f"node{i}.conf").exists()
            assert manifest[f"node{i}"]["conf_file"] == f"node{i}.conf"
        assert (tmp_path / "manifest.json").exists()
