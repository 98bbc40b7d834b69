"""Exact cycle homomorphism counts, quotient combinatorics and count bounds.

All counts are Python ints.  ``hom_brute`` and ``labeled_copies`` enumerate
maps directly and serve as oracles for the walk-based ``hom_cycle``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .graph import Edge, Graph, RegimeParams, cycle_graph

BRUTE_BUDGET = 10**8
_INT64_SAFE = 2**62


class BudgetExceeded(ValueError):
    pass


# --- closed walks ---------------------------------------------------------------

def _walk_sum_int64(g: Graph, t: int, block: int = 256) -> int:
    a = g.to_sparse(np.int64)
    total = 0
    for start in range(0, g.n, block):
        stop = min(start + block, g.n)
        # column j holds walk counts from start vertex start+j
        w = np.zeros((g.n, stop - start), dtype=np.int64)
        w[np.arange(start, stop), np.arange(stop - start)] = 1
        for _ in range(t):
            w = a @ w
        total += int((w * w).sum())
    return total


def _walk_sum_bigint(g: Graph, t: int) -> int:
    adj = [sorted(g.neighbors(v)) for v in range(g.n)]
    total = 0
    for s in range(g.n):
        if not adj[s]:
            continue
        vec = {s: 1}
        for _ in range(t):
            nxt: dict[int, int] = {}
            for u, c in vec.items():
                for w in adj[u]:
                    nxt[w] = nxt.get(w, 0) + c
            vec = nxt
        total += sum(c * c for c in vec.values())
    return total


def hom_cycle(g: Graph, t: int) -> int:
    """Hom(C_{2t}, G) = number of closed walks of length 2t.

    For each start vertex s the walk-count vector A^t e_s is built by t
    neighbour sums; the closed 2t-walks through s number ||A^t e_s||^2.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    if g.num_edges == 0:
        return 0
    dmax = max(g.degrees)
    if g.n * dmax ** (2 * t) < _INT64_SAFE:
        return _walk_sum_int64(g, t)
    return _walk_sum_bigint(g, t)


def _component_subgraphs(g: Graph) -> list[tuple[list[int], Graph]]:
    out = []
    for comp in g.components():
        pos = {v: i for i, v in enumerate(comp)}
        es = [(pos[u], pos[v]) for u, v in g.edges if u in pos]
        out.append((comp, Graph(len(comp), es)))
    return out


def hom_cycle_edge(g: Graph, t: int, e: Edge) -> int:
    """Homomorphisms of C_{2t} whose image uses the edge ``e`` at least once."""
    u, v = e
    if not g.has_edge(u, v):
        raise ValueError(f"{e} is not an edge")
    return hom_cycle(g, t) - hom_cycle(g.without_edges([e]), t)


def hom_cycle_edge_all(g: Graph, t: int) -> dict[Edge, int]:
    """``hom_cycle_edge`` for every edge, computed one component at a time."""
    out: dict[Edge, int] = {}
    for comp, sub in _component_subgraphs(g):
        total = hom_cycle(sub, t)
        for a, b in sub.sorted_edges():
            out[(comp[a], comp[b])] = total - hom_cycle(sub.without_edges([(a, b)]), t)
    return out


# --- brute force oracles -------------------------------------------------------

def _check_budget(h: Graph, g: Graph, budget: int) -> None:
    if h.n and g.n ** h.n > budget:
        raise BudgetExceeded(f"{g.n}^{h.n} maps exceed the budget {budget}")


def _bfs_order(h: Graph) -> list[int]:
    order, seen = [], set()
    for s in sorted(range(h.n), key=lambda v: -h.degree(v)):
        if s in seen:
            continue
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop(0)
            order.append(u)
            for w in sorted(h.neighbors(u)):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return order


def _count_maps(h: Graph, g: Graph, injective: bool) -> int:
    order = _bfs_order(h)
    back = [[w for w in h.neighbors(order[i]) if w in order[:i]] for i in range(len(order))]
    phi: dict[int, int] = {}
    used: set[int] = set()
    all_targets = range(g.n)

    def rec(i: int) -> int:
        if i == len(order):
            return 1
        x = order[i]
        if back[i]:
            cands = set(g.neighbors(phi[back[i][0]]))
            for w in back[i][1:]:
                cands &= g.neighbors(phi[w])
        else:
            cands = all_targets
        total = 0
        for c in cands:
            if injective and c in used:
                continue
            phi[x] = c
            used.add(c)
            total += rec(i + 1)
            used.discard(c)
        phi.pop(x, None)
        return total

    return rec(0)


def hom_brute(h: Graph, g: Graph, budget: int = BRUTE_BUDGET) -> int:
    """Number of maps V(h) -> V(g) sending every edge of h onto an edge of g."""
    _check_budget(h, g, budget)
    return _count_maps(h, g, injective=False)


def labeled_copies(h: Graph, g: Graph, budget: int = BRUTE_BUDGET) -> int:
    """N(h, g): injective homomorphisms."""
    _check_budget(h, g, budget)
    if h.n > g.n:
        return 0
    return _count_maps(h, g, injective=True)


# --- set partitions and quotients ------------------------------------------------

def restricted_growth_strings(m: int) -> Iterator[tuple[int, ...]]:
    """All set partitions of ``range(m)`` as RGS, in lexicographic order."""
    if m == 0:
        yield ()
        return
    a = [0] * m
    while True:
        yield tuple(a)
        j = m - 1
        while j > 0 and a[j] == max(a[:j]) + 1:
            j -= 1
        if j == 0:
            return
        a[j] += 1
        for k in range(j + 1, m):
            a[k] = 0


def quotient(h: Graph, rgs: tuple[int, ...]) -> tuple[Graph, bool]:
    """h/π with multi-edges merged; the flag reports whether a loop arises."""
    k = max(rgs) + 1 if rgs else 0
    loop = False
    es = set()
    for u, v in h.edges:
        a, b = rgs[u], rgs[v]
        if a == b:
            loop = True
        else:
            es.add((a, b) if a < b else (b, a))
    return Graph(k, es), loop


@dataclass(frozen=True)
class QuotientGraph:
    partition: tuple[int, ...]
    graph: Graph
    has_loop: bool

    @property
    def is_tree(self) -> bool:
        return not self.has_loop and self.graph.num_edges == self.graph.n - 1

    def rgs_string(self) -> str:
        return "".join(str(x) if x < 10 else chr(ord("a") + x - 10) for x in self.partition)


def _check_t(t: int) -> None:
    if t < 2:
        raise ValueError("t must be at least 2 (C_2 is degenerate)")
    if t > 6:
        raise ValueError("t > 6 exceeds the partition enumeration budget")


def enumerate_quotients(t: int) -> Iterator[QuotientGraph]:
    """Every quotient C_{2t}/π, loops included, in RGS order."""
    _check_t(t)
    c = cycle_graph(2 * t)
    for rgs in restricted_growth_strings(2 * t):
        q, loop = quotient(c, rgs)
        yield QuotientGraph(rgs, q, loop)


def enumerate_simple_quotients(t: int) -> list[QuotientGraph]:
    return [q for q in enumerate_quotients(t) if not q.has_loop]


def tree_quotient_count(t: int) -> int:
    """Simple quotients of C_{2t} that are trees on t+1 vertices.

    Enumerates RGS prefixes directly, cutting a branch as soon as it creates
    a loop, exceeds t+1 blocks, or spans more than t distinct edges (none of
    which can be undone by extending the prefix).
    """
    _check_t(t)
    m = 2 * t
    count = 0
    a = [0] * m

    def rec(i: int, nblocks: int, edges: frozenset) -> None:
        nonlocal count
        if i == m:
            if a[m - 1] == a[0]:
                return
            es = edges | {(min(a[0], a[m - 1]), max(a[0], a[m - 1]))}
            if nblocks == t + 1 and len(es) == t:
                count += 1
            return
        for x in range(min(nblocks + 1, t + 1)):
            if x == a[i - 1]:
                continue
            a[i] = x
            e = (min(x, a[i - 1]), max(x, a[i - 1]))
            es = edges | {e}
            if len(es) > t:
                continue
            rec(i + 1, max(nblocks, x + 1), es)

    a[0] = 0
    rec(1, 1, frozenset())
    return count


def hom_via_quotients(h: Graph, g: Graph, budget: int = BRUTE_BUDGET) -> int:
    """Sum of labelled copies of the simple quotients h/π in g."""
    _check_budget(h, g, budget)
    total = 0
    for rgs in restricted_growth_strings(h.n):
        q, loop = quotient(h, rgs)
        if not loop:
            total += labeled_copies(q, g, budget)
    return total


# --- expectations -------------------------------------------------------------------

def expected_hom(params: RegimeParams) -> float:
    """Two-term leading approximation of E Hom(C_{2t}, G(n,p))."""
    n, p, t = params.n, params.p, params.t
    if n * p <= 1:
        raise ValueError("requires np > 1")
    catalan = math.comb(2 * t, t) // (t + 1)
    return (n * p) ** (2 * t) + catalan * n ** (t + 1) * p**t


def exact_expected_hom(n: int, p: float, t: int) -> float:
    """E Hom(C_{2t}, G(n,p)) exactly: sum over simple quotients of (n)_v p^e."""
    total = 0.0
    for q in enumerate_simple_quotients(t):
        total += math.perm(n, q.graph.n) * p**q.graph.num_edges
    return total


# --- bounds --------------------------------------------------------------------------

def path_hom_bound(g: Graph, ell: int) -> int:
    """(2 e(G))^ceil((ell+1)/2), with P_0 a vertex and P_{-1} empty.

    Valid for graphs without isolated vertices; for ell = 0 compare it
    with the number of non-isolated vertices.
    """
    if ell < -1:
        raise ValueError("ell must be >= -1")
    return (2 * g.num_edges) ** (-(-(ell + 1) // 2))


def path_for_bound(ell: int) -> Graph:
    """P_ell (ell edges); P_0 is one vertex, P_{-1} the empty graph."""
    return Graph(ell + 1, ((i, i + 1) for i in range(ell)))


def bipartite_hom_bound(g: Graph, u1, u2, t: int, alpha: float) -> float:
    """2 α t e^t + 2 Σ_{w ∈ U2} deg(w)^t for bipartite g with sides (U1, U2)."""
    u1, u2 = set(u1), set(u2)
    if u1 & u2:
        raise ValueError("U1 and U2 overlap")
    for a, b in g.edges:
        if not ((a in u1 and b in u2) or (a in u2 and b in u1)):
            raise ValueError(f"edge ({a}, {b}) does not cross the bipartition")
    e = g.num_edges
    if e - len(u1) > alpha * e:
        raise ValueError(f"precondition e - |U1| <= alpha e fails: {e - len(u1)} > {alpha * e}")
    return 2 * alpha * t * e**t + 2 * sum(g.degree(w) ** t for w in u2)


def minimal_alpha(g: Graph, u1) -> float:
    e = g.num_edges
    return max(0.0, (e - len(set(u1))) / e) if e else 0.0


def cycle_shape(t: int) -> tuple[int, int, int]:
    """(regularity, v_H, e_H) of C_{2t}."""
    return 2, 2 * t, 2 * t


def local_hom_bound(g: Graph, e: Edge, reg: int, v_h: int, e_h: int) -> float:
    """Per-edge bound for a reg-regular H with v_h vertices and e_h edges."""
    if reg < 2:
        raise ValueError("regularity must be at least 2")
    u, v = e
    if not g.has_edge(u, v):
        raise ValueError(f"{e} is not an edge")
    eg = g.num_edges
    return (
        4 * e_h
        * (2 * eg) ** (v_h / 2 - (2 * reg - 1) / reg)
        * (4 * g.degree(u) * g.degree(v)) ** ((reg - 1) / reg)
    )


def excess_hom_bound(g: Graph, g_sub: Graph, reg: int, v_h: int, e_h: int) -> float:
    """Bound on the summed per-edge counts over the edges of ``g_sub``."""
    if not g_sub.is_subgraph_of(g):
        raise ValueError("g_sub is not a subgraph of g")
    eg = g.num_edges
    if eg == 0:
        raise ValueError("g has no edges")
    return e_h * (2 * eg) ** (v_h / 2) * (g_sub.num_edges / eg) ** (1 / reg)
