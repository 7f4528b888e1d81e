"""Signed Jacobian graph and consistency (balance) detection.

At interior states the off-diagonal sign pattern of the multi-virus
Jacobian is fixed by the parameters alone: within-virus entries inherit
the sign of B^k[i, j], and every cross-virus block is a nonpositive
diagonal. The signed graph built from that pattern decides monotonicity:
the flow can preserve an orthant order exactly when every undirected
cycle carries an even number of negative edges. A single virus has no
negative edges at all; two viruses give the balanced cross-layer pattern;
three or more create node triangles with three negative edges, so the
graph is never consistent.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .model import MultiVirusSystem


@dataclass(frozen=True)
class SignedGraph:
    """Signed directed graph over the m*n stacked state coordinates.

    edges holds (from, to, sign) triples for the structurally nonzero
    off-diagonal Jacobian entries at interior states; there are never
    self-loops. Node v = k*n + i is coordinate i of virus k.
    """

    node_count: int
    edges: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class ConsistencyVerdict:
    """Outcome of the balance check on a signed graph.

    When consistent, gauge is a +-1 labeling with gauge[u]*gauge[v]*sign = +1
    on every edge. When inconsistent, witness_cycle lists the nodes of an
    undirected cycle whose edge signs multiply to -1 (consecutive nodes are
    adjacent, and the last node closes back to the first).
    """

    consistent: bool
    witness_cycle: tuple[int, ...] | None = None
    gauge: tuple[int, ...] | None = None


def signed_jacobian_graph(system: MultiVirusSystem) -> SignedGraph:
    """Signed graph of the Jacobian's interior off-diagonal pattern.

    Within virus k, B^k[i, j] > 0 (i != j) contributes a "+" edge
    k*n+j -> k*n+i. For viruses k != l, a "-" edge l*n+i -> k*n+i exists
    whenever row i of B^k is nonzero, which makes (B^k x^k)_i positive at
    interior states.
    """
    m, n = system.m, system.n
    edges: list[tuple[int, int, int]] = []
    for k in range(m):
        Bk = system.B[k]
        for i in range(n):
            for j in range(n):
                if i != j and Bk[i, j] > 0.0:
                    edges.append((k * n + j, k * n + i, +1))
        row_active = np.any(Bk != 0.0, axis=1)
        for l in range(m):
            if l == k:
                continue
            for i in range(n):
                if row_active[i]:
                    edges.append((l * n + i, k * n + i, -1))
    return SignedGraph(node_count=m * n, edges=tuple(edges))


def _pair_signs(g: SignedGraph) -> dict[tuple[int, int], set[int]]:
    pairs: dict[tuple[int, int], set[int]] = {}
    for u, v, s in g.edges:
        key = (min(u, v), max(u, v))
        pairs.setdefault(key, set()).add(s)
    return pairs


def is_consistent(g: SignedGraph) -> ConsistencyVerdict:
    """Decide balance of the signed graph, treating edges as undirected.

    Parallel edges of equal sign merge; an opposite-signed parallel pair is
    itself an odd cycle and is returned as a 2-node witness. Otherwise a
    breadth-first parity traversal either produces a +-1 gauge or, at the
    first parity conflict, a witness cycle assembled from the two
    traversal-tree paths (breadth-first order keeps it short).
    """
    pairs = _pair_signs(g)
    for (u, v), signs in pairs.items():
        if len(signs) == 2:
            return ConsistencyVerdict(consistent=False, witness_cycle=(u, v))
    adjacency: dict[int, list[tuple[int, int]]] = {v: [] for v in range(g.node_count)}
    for (u, v), signs in pairs.items():
        s = next(iter(signs))
        adjacency[u].append((v, s))
        adjacency[v].append((u, s))
    color = [0] * g.node_count
    parent: dict[int, int | None] = {}
    for root in range(g.node_count):
        if color[root] != 0:
            continue
        color[root] = 1
        parent[root] = None
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, s in adjacency[u]:
                expected = color[u] * s
                if color[v] == 0:
                    color[v] = expected
                    parent[v] = u
                    queue.append(v)
                elif color[v] != expected:
                    return ConsistencyVerdict(
                        consistent=False,
                        witness_cycle=_conflict_cycle(parent, u, v),
                    )
    return ConsistencyVerdict(consistent=True, gauge=tuple(color))


def _conflict_cycle(parent: dict[int, int | None], u: int, v: int) -> tuple[int, ...]:
    """Cycle through the conflict edge (u, v) via the traversal tree."""
    path_u = _root_path(parent, u)
    path_v = _root_path(parent, v)
    common = {node: idx for idx, node in enumerate(path_u)}
    for j, node in enumerate(path_v):
        if node in common:
            i = common[node]
            # u ... lca ... v, closed by the conflict edge (v, u)
            return tuple(path_u[: i + 1] + list(reversed(path_v[:j])))
    raise AssertionError("conflict endpoints share a traversal tree root")


def _root_path(parent: dict[int, int | None], node: int) -> list[int]:
    path = [node]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path


def cycle_sign_product(g: SignedGraph, cycle) -> int:
    """Product of edge signs along a closed node cycle (undirected).

    A 2-node cycle over an opposite-signed parallel pair multiplies both
    signs, hence -1. Raises ValueError if consecutive nodes are not
    adjacent in g.
    """
    pairs = _pair_signs(g)
    nodes = list(cycle)
    if len(nodes) == 2:
        key = (min(nodes), max(nodes))
        signs = pairs.get(key)
        if signs is None:
            raise ValueError(f"nodes {nodes} are not adjacent")
        product = 1
        for s in signs:
            product *= s
        return product
    product = 1
    for a, b in zip(nodes, nodes[1:] + nodes[:1]):
        key = (min(a, b), max(a, b))
        signs = pairs.get(key)
        if signs is None:
            raise ValueError(f"nodes {a} and {b} are not adjacent")
        product *= next(iter(signs))
    return product


def verify_gauge(g: SignedGraph, gauge) -> bool:
    """True iff gauge[u]*gauge[v]*sign = +1 for every edge of g."""
    gauge = list(gauge)
    return all(gauge[u] * gauge[v] * s == 1 for u, v, s in g.edges)


__all__ = [
    "ConsistencyVerdict",
    "SignedGraph",
    "cycle_sign_product",
    "is_consistent",
    "signed_jacobian_graph",
    "verify_gauge",
]
