# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled reachability kernel.

Interface and output are bit-identical to ``_kernel_py``; keep the two in
lockstep. The hot loops (enabledness checks, successor construction) run
on typed memoryviews; dedup stays in a Python dict keyed by marking bytes.
"""

import array as _array

from cpython cimport array


def explore(
    initial,
    int num_places,
    int[:] tin_off,
    int[:] tin_place,
    int[:] tin_w,
    int[:] tout_off,
    int[:] tout_place,
    int[:] tout_w,
    const unsigned char[:] enabled,
    int max_nodes,
    int max_tokens,
):
    """Breadth-first marking graph up to the node/token bounds."""
    cdef bytes root = bytes(initial)
    nodes = [root]
    visited = {root: 0}
    edge_src = []
    edge_t = []
    edge_dst = []
    parent_node = [-1]
    parent_trans = [-1]
    cdef int num_trans = tin_off.shape[0] - 1
    cdef int i = 0, t, a, p, v, j
    cdef bint ok
    cdef bytes cur_b, key
    cdef const unsigned char[:] cur
    scratch = bytearray(num_places)
    cdef unsigned char[:] succ = scratch
    while i < len(nodes):
        cur_b = <bytes> nodes[i]
        cur = cur_b
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
            succ[:] = cur
            for a in range(tin_off[t], tin_off[t + 1]):
                succ[tin_place[a]] -= <unsigned char> tin_w[a]
            for a in range(tout_off[t], tout_off[t + 1]):
                p = tout_place[a]
                v = succ[p] + tout_w[a]
                if v > max_tokens:
                    return (
                        nodes, edge_src, edge_t, edge_dst,
                        parent_node, parent_trans, False, "max-tokens",
                    )
                succ[p] = <unsigned char> v
            key = bytes(scratch)
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


def backward_reachable(int num_nodes, edge_src, edge_dst, seeds):
    """Bitmap (bytes) of nodes that can reach any seed via the edges."""
    cdef array.array src_a = _array.array("i", edge_src)
    cdef array.array dst_a = _array.array("i", edge_dst)
    cdef Py_ssize_t ecount = len(src_a)
    cdef int[:] src = src_a
    cdef int[:] dst = dst_a
    cdef array.array off_a = _array.array("i", bytes(4 * (num_nodes + 2)))
    cdef int[:] off = off_a
    cdef array.array radj_a = _array.array(
        "i", bytes(4 * ecount if ecount else 4)
    )
    cdef int[:] radj = radj_a
    cdef Py_ssize_t k
    cdef int n, m, a
    # Counting sort of edges by destination into a reverse-CSR layout.
    for k in range(ecount):
        off[dst[k] + 2] += 1
    for n in range(2, num_nodes + 2):
        off[n] += off[n - 1]
    for k in range(ecount):
        m = dst[k] + 1
        radj[off[m]] = src[k]
        off[m] += 1
    mark_b = bytearray(num_nodes)
    cdef unsigned char[:] mark = mark_b
    cdef array.array stack_a = _array.array(
        "i", bytes(4 * (num_nodes if num_nodes else 1))
    )
    cdef int[:] stack = stack_a
    cdef Py_ssize_t depth = 0
    for s in seeds:
        n = s
        if not mark[n]:
            mark[n] = 1
            stack[depth] = n
            depth += 1
    while depth:
        depth -= 1
        n = stack[depth]
        for a in range(off[n], off[n + 1]):
            m = radj[a]
            if not mark[m]:
                mark[m] = 1
                stack[depth] = m
                depth += 1
    return bytes(mark_b)
