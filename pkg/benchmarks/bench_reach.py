"""Benchmark the reachability kernels on growing AND fan-outs.

The protocol family here is a hub blasting an AND step at n peers: its
marking graph has roughly 2^n * n/2 states, which makes the exploration
cost easy to dial. Both kernels run over the identical compiled arc
arrays, so the table isolates the kernel speedup.

Usage:
    python benchmarks/bench_reach.py [--sizes 6 8 10] [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

from parley import parse_protocol
from parley.cpn import _kernel_py, translate
from parley.cpn.reach import compile_net

try:
    from parley.cpn import _kernel_c
except ImportError:
    _kernel_c = None


def fanout_protocol(n: int) -> str:
    roles = "\n".join(f"  node{i}: process" for i in range(1, n + 1))
    branches = "\n".join(
        f"    pm blast-{i}: hub -> node{i} request async"
        for i in range(1, n + 1)
    )
    return (
        f"protocol fanout-{n}\n"
        f"roles {{\n  hub: process\n{roles}\n}}\n"
        f"messages {{\n  cm blast AND {{\n{branches}\n  }}\n}}\n"
    )


def explore_args(net, max_nodes: int):
    arrays = compile_net(net)
    return (
        bytes(net.initial.counts),
        len(net.places),
        *arrays[:6],
        arrays[6],
        max_nodes,
        8,
    )


def best_time(kernel, args, repeats: int) -> tuple[float, int, int]:
    best = float("inf")
    nodes = edges = 0
    for _ in range(repeats):
        started = time.perf_counter()
        result = kernel.explore(*args)
        elapsed = time.perf_counter() - started
        best = min(best, elapsed)
        nodes, edges = len(result[0]), len(result[1])
        if not result[6]:
            raise SystemExit("bound tripped; raise --max-nodes")
    return best, nodes, edges


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--sizes",
        type=int,
        nargs="+",
        default=[6, 7, 8, 9, 10],
        help="AND fan-out widths to explore",
    )
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--max-nodes", type=int, default=2_000_000)
    args = parser.parse_args()

    if _kernel_c is None:
        print("compiled kernel not built; timing the pure kernel only")

    header = f"{'n':>3} {'nodes':>9} {'edges':>10} {'pure':>9}"
    if _kernel_c is not None:
        header += f" {'compiled':>9} {'speedup':>8}"
    print(header)
    for n in args.sizes:
        net = translate(parse_protocol(fanout_protocol(n)))
        kernel_args = explore_args(net, args.max_nodes)
        pure, nodes, edges = best_time(
            _kernel_py, kernel_args, args.repeats
        )
        row = f"{n:>3} {nodes:>9} {edges:>10} {pure:>8.3f}s"
        if _kernel_c is not None:
            fast, c_nodes, c_edges = best_time(
                _kernel_c, kernel_args, args.repeats
            )
            if (c_nodes, c_edges) != (nodes, edges):
                raise SystemExit(
                    f"kernel disagreement at n={n}: "
                    f"{(c_nodes, c_edges)} != {(nodes, edges)}"
                )
            row += f" {fast:>8.3f}s {pure / fast:>7.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
