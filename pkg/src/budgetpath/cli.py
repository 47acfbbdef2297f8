"""Command line front end.

Exit codes: 0 success, 2 infeasible (insufficient budget / no path),
1 usage or input error. Only `probe` touches the network; `--seed` makes
key generation byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from budgetpath.billing import TransferRequest
from budgetpath.planner import load_plan, plan_to_dict, plan_transfer, save_plan
from budgetpath.search import SearchError, enumerate_best_path
from budgetpath.simulate import SimulationError, compare
from budgetpath.topology import TopologyError, load_topology, probe_rtts, save_topology
from budgetpath.tunnels import (
    TunnelError,
    build_tunnels,
    keypair_from_private_b64,
    write_tunnel_files,
)
from budgetpath.planner import build_weights

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2

FIXTURE_DIR_ENV = "BUDGETPATH_FIXTURE_DIR"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; our contract reserves 2
    # for infeasibility, so remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _resolve(path: str) -> str:
    if os.path.exists(path):
        return path
    fixture_dir = os.environ.get(FIXTURE_DIR_ENV)
    if fixture_dir:
        candidate = os.path.join(fixture_dir, path)
        if os.path.exists(candidate):
            return candidate
    return path


def _add_topology_args(parser) -> None:
    parser.add_argument("--topology", required=True, help="topology JSON file")
    parser.add_argument("--mode", choices=["directed", "undirected"], default="undirected")


def _add_request_args(parser) -> None:
    parser.add_argument("--src", type=int, required=True)
    parser.add_argument("--dst", type=int, required=True)
    parser.add_argument("--data-gb", type=float, required=True)
    parser.add_argument("--budget-usd", type=float, required=True)
    parser.add_argument("--iterations", type=int, default=30)
    parser.add_argument("--rule", choices=["threshold", "exact-cost"], default="threshold")


def _request(args) -> TransferRequest:
    return TransferRequest(args.src, args.dst, args.data_gb, args.budget_usd, args.iterations)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_plan(args) -> int:
    topology = load_topology(_resolve(args.topology), args.mode)
    plan = plan_transfer(topology, _request(args), args.rule)
    if plan is None:
        print("insufficient budget: no feasible path found", file=sys.stderr)
        return EXIT_INFEASIBLE
    text = json.dumps(plan_to_dict(plan), indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)
    print(
        f"path {'->'.join(map(str, plan.path))}  cost ${plan.predicted_cost_usd:.4f}  "
        f"latency {plan.predicted_latency_s:.2f}s  k={plan.fraction_k}",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_render_wg(args) -> int:
    topology = load_topology(_resolve(args.topology), args.mode)
    plan = load_plan(args.plan, len(topology))
    entropy_source = None
    if args.seed is not None:
        rng = random.Random(args.seed)
        entropy_source = lambda: rng.randbytes(32)
    identity_keys = None
    if args.keys:
        with open(args.keys) as fh:
            identity_keys = {
                int(node_id): keypair_from_private_b64(private)
                for node_id, private in json.load(fh).items()
            }
    specs = build_tunnels(plan, topology, args.subnet, args.port, entropy_source, identity_keys)
    manifest = write_tunnel_files(specs, topology, args.out_dir)
    print(
        f"wrote {len(specs)} tunnel configs to {args.out_dir} "
        "(apply with wg-quick up <file> on each host)",
        file=sys.stderr,
    )
    for name in sorted(manifest):
        print(f"  {name}: {manifest[name]['public_key']}", file=sys.stderr)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    topology = load_topology(_resolve(args.topology), args.mode)
    report = compare(topology, _request(args), args.rule)
    text = report.to_table() if args.format == "table" else report.to_json()
    _emit(text, args.out)
    print("simulation complete", file=sys.stderr)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    topology = load_topology(_resolve(args.topology), args.mode)
    request = _request(args)
    weights, _ = build_weights(topology, request, args.fraction, args.rule)
    result = enumerate_best_path(
        weights, request.source, request.destination, request.budget_usd,
        max_nodes=args.max_nodes,
    )
    if result is None:
        print("no feasible path", file=sys.stderr)
        return EXIT_INFEASIBLE
    _emit(
        json.dumps(
            {
                "path": list(result.path),
                "total_cost_usd": result.total_a,
                "total_latency_s": result.total_b,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        args.out,
    )
    return EXIT_OK


def _cmd_probe(args) -> int:
    topology = load_topology(_resolve(args.topology), args.mode)
    probed = probe_rtts(topology, args.attempts)
    save_topology(probed, args.out)
    print(f"probed {len(probed.links)} links, wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="budgetpath", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", parents=[], help="find a budget-feasible minimum-latency path")
    _add_topology_args(p)
    _add_request_args(p)
    p.add_argument("--out", help="write plan JSON here (default stdout)")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("render-wg", help="render a plan as chained WireGuard configs")
    _add_topology_args(p)
    p.add_argument("--plan", required=True, help="plan JSON from the plan subcommand")
    p.add_argument("--subnet", default="10.44.0.0/24")
    p.add_argument("--port", type=int, default=51820)
    p.add_argument("--seed", type=int, help="deterministic key entropy (tests only)")
    p.add_argument("--keys", help="JSON file of node id -> base64 private key for stable identities")
    p.add_argument("--out-dir", default="out")
    p.set_defaults(func=_cmd_render_wg)

    p = sub.add_parser("simulate", help="compare planner, naive baseline and oracle")
    _add_topology_args(p)
    _add_request_args(p)
    p.add_argument("--format", choices=["table", "structured"], default="table")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("oracle", help="exact exhaustive search (small graphs)")
    _add_topology_args(p)
    _add_request_args(p)
    p.add_argument("--fraction", type=float, default=1.0)
    p.add_argument("--max-nodes", type=int, default=12)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("probe", help="measure link RTTs with ping")
    _add_topology_args(p)
    p.add_argument("--attempts", type=int, default=3)
    p.add_argument("--out", required=True, help="write probed topology here")
    p.set_defaults(func=_cmd_probe)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    except (
        TopologyError,
        TunnelError,
        SearchError,
        SimulationError,
        ValueError,
        RuntimeError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
