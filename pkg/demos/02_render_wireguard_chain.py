"""Render a planned path as chained WireGuard configurations.

Builds a plan on the testbed, assigns overlay addresses and keys, and
prints the wg-quick config for each node on the path. Keys here come from
a seeded generator so the output is reproducible; drop `entropy_source`
for real secrets.
"""

import random
from pathlib import Path

from budgetpath import TransferRequest, build_tunnels, load_topology, plan_transfer, render_conf

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

topology = load_topology(FIXTURES / "testbed6.json")
plan = plan_transfer(topology, TransferRequest(0, 5, 1.0, 0.50, 10))
assert plan is not None

rng = random.Random(7)
specs = build_tunnels(plan, topology, overlay_subnet="10.44.0.0/24",
                      entropy_source=lambda: rng.randbytes(32))

for spec in specs:
    name = topology.node(spec.node_id).name
    role = "relay" if spec.is_relay else "endpoint"
    print(f"--- {name} ({role}, overlay {spec.overlay_address}) " + "-" * 20)
    print(render_conf(spec))
