"""Pure-Python reachability kernel.

Same interface and bit-identical output as the compiled kernel in
``_kernel_c.pyx``; keep the two in lockstep. Markings travel as bytes
(one token count per place, in net place order), transitions as flat
CSR-style arc arrays.
"""

from __future__ import annotations


def explore(
    initial: bytes,
    num_places: int,
    tin_off,
    tin_place,
    tin_w,
    tout_off,
    tout_place,
    tout_w,
    enabled,
    max_nodes: int,
    max_tokens: int,
):
    """Breadth-first marking graph up to the node/token bounds.

    Returns (nodes, edge_src, edge_t, edge_dst, parent_node, parent_trans,
    bounded, reason). Nodes are in discovery order; parent pointers record
    the discovery edge, so walking them yields a shortest firing path.
    A tripped bound returns the partial graph with bounded=False.
    """
    root = bytes(initial)
    nodes = [root]
    visited = {root: 0}
    edge_src: list[int] = []
    edge_t: list[int] = []
    edge_dst: list[int] = []
    parent_node = [-1]
    parent_trans = [-1]
    num_trans = len(tin_off) - 1
    i = 0
    while i < len(nodes):
        cur = nodes[i]
        for t in range(num_trans):
            if not enabled[t]:
                continue
            ok = True
            for a in range(tin_off[t], tin_off[t + 1]):
                if cur[tin_place[a]] < tin_w[a]:
                    ok = False
                    break
            if not ok:
                continue
            succ = bytearray(cur)
            for a in range(tin_off[t], tin_off[t + 1]):
                succ[tin_place[a]] -= tin_w[a]
            for a in range(tout_off[t], tout_off[t + 1]):
                p = tout_place[a]
                v = succ[p] + tout_w[a]
                if v > max_tokens:
                    return (
                        nodes, edge_src, edge_t, edge_dst,
                        parent_node, parent_trans, False, "max-tokens",
                    )
                succ[p] = v
            key = bytes(succ)
            j = visited.get(key, -1)
            if j < 0:
                if len(nodes) >= max_nodes:
                    return (
                        nodes, edge_src, edge_t, edge_dst,
                        parent_node, parent_trans, False, "max-nodes",
                    )
                j = len(nodes)
                visited[key] = j
                nodes.append(key)
                parent_node.append(i)
                parent_trans.append(t)
            edge_src.append(i)
            edge_t.append(t)
            edge_dst.append(j)
        i += 1
    return (
        nodes, edge_src, edge_t, edge_dst,
        parent_node, parent_trans, True, "",
    )


def backward_reachable(num_nodes: int, edge_src, edge_dst, seeds):
    """Bitmap (bytes) of nodes that can reach any seed via the edges."""
    mark = bytearray(num_nodes)
    rev: list[list[int]] = [[] for _ in range(num_nodes)]
    for k in range(len(edge_src)):
        rev[edge_dst[k]].append(edge_src[k])
    stack = []
    for s in seeds:
        if not mark[s]:
            mark[s] = 1
            stack.append(s)
    while stack:
        n = stack.pop()
        for m in rev[n]:
            if not mark[m]:
                mark[m] = 1
                stack.append(m)
    return bytes(mark)
