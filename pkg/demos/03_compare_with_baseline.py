"""Compare the planner against the naive minimum-hop baseline.

Uses a small synthetic graph with two candidate relays: a low-RTT one with
a tenth of the bandwidth, and a higher-RTT one at full rate. The naive
baseline tie-breaks on RTT and lands on the slow relay; the planner sees
per-hop transmission time and avoids it.
"""

from budgetpath import TransferRequest, compare
from budgetpath.topology import LinkSpec, NodeSpec, Topology

nodes = (
    NodeSpec(0, "source", "198.51.100.1", 100.0, 0.021, 0.081),
    NodeSpec(1, "slow-relay", "198.51.100.2", 10.0, 0.021, 0.081),
    NodeSpec(2, "fast-relay", "198.51.100.3", 100.0, 0.021, 0.081),
    NodeSpec(3, "destination", "198.51.100.4", 100.0, 0.021, 0.081),
)
links = (
    LinkSpec(0, 1, 0.010), LinkSpec(1, 3, 0.010),  # low rtt, slow relay
    LinkSpec(0, 2, 0.050), LinkSpec(2, 3, 0.050),  # higher rtt, fast relay
)
topology = Topology(nodes, links)

report = compare(topology, TransferRequest(0, 3, 1.0, 5.0, 5))
print(report.to_table())
