"""Simple undirected graphs on ``[n]``, Erdős–Rényi sampling, and planting.

Vertices are the integers ``0..n-1``.  The text edge-list format written by
:func:`write_edge_list` is 1-based, everything else is 0-based.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


Edge = tuple[int, int]


def _norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple graph with an adjacency and degree index."""

    __slots__ = ("n", "edges", "_adj", "_deg")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError(f"vertex count must be nonnegative, got {n}")
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            es.add(_norm_edge(u, v))
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in es:
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self.edges = frozenset(es)
        self._adj = tuple(frozenset(a) for a in adj)
        self._deg = tuple(len(a) for a in adj)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> tuple[int, ...]:
        return self._deg

    def degree(self, v: int) -> int:
        return self._deg[v]

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def vertices(self) -> list[int]:
        """Non-isolated vertices, i.e. V(G) in the usual sense."""
        return [v for v in range(self.n) if self._deg[v] > 0]

    def is_subgraph_of(self, other: "Graph") -> bool:
        return self.n == other.n and self.edges <= other.edges

    def with_edges(self, extra: Iterable[Edge]) -> "Graph":
        return Graph(self.n, self.edges | {_norm_edge(u, v) for u, v in extra})

    def without_edges(self, drop: Iterable[Edge]) -> "Graph":
        return Graph(self.n, self.edges - {_norm_edge(u, v) for u, v in drop})

    def edge_difference(self, other: "Graph") -> "Graph":
        return Graph(self.n, self.edges - other.edges)

    def components(self) -> list[list[int]]:
        """Connected components of the non-isolated vertices, each sorted."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s] or self._deg[s] == 0:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self._adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def adjacency_matrix(self, dtype=float) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        return a

    def to_sparse(self, dtype=np.float64):
        from scipy.sparse import csr_matrix

        if not self.edges:
            return csr_matrix((self.n, self.n), dtype=dtype)
        e = np.array(sorted(self.edges), dtype=np.int64)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(len(rows), dtype=dtype)
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))


# --- named graphs -----------------------------------------------------------

def complete_graph(m: int, n: int | None = None) -> Graph:
    n = m if n is None else n
    return Graph(n, ((u, v) for u in range(m) for v in range(u + 1, m)))


def cycle_graph(k: int, n: int | None = None) -> Graph:
    if k < 3:
        raise ValueError("a simple cycle needs at least 3 vertices")
    n = k if n is None else n
    return Graph(n, ((i, (i + 1) % k) for i in range(k)))


def path_graph(num_vertices: int) -> Graph:
    return Graph(num_vertices, ((i, i + 1) for i in range(num_vertices - 1)))


def star_graph(d: int, n: int | None = None) -> Graph:
    """K_{1,d} centred at vertex 0."""
    n = d + 1 if n is None else n
    return Graph(n, ((0, i) for i in range(1, d + 1)))


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return Graph(offset, edges)


# --- parameters --------------------------------------------------------------

@dataclass(frozen=True)
class RegimeParams:
    """Sparsity regime and the large-deviation knobs (δ, δ̂, t, ε, η).

    ``eps`` and ``eta`` are only required to lie in (0, 1/4); the defaults
    are configuration, not canonical values.
    """

    n: int
    p: float
    delta: float = 0.5
    delta_hat: float = 1.0
    t: int = 3
    eps: float = 0.1
    eta: float = 0.1
    alpha: float = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        if self.delta <= 0 or self.delta_hat <= 0:
            raise ValueError("delta and delta_hat must be positive")
        if self.t < 2:
            raise ValueError("t must be at least 2")
        if not 0.0 < self.eps < 0.25 or not 0.0 < self.eta < 0.25:
            raise ValueError("eps and eta must lie in (0, 1/4)")
        a = math.log(1.0 / self.p) / math.log(self.n) if self.n > 1 else math.inf
        object.__setattr__(self, "alpha", a)

    @property
    def np(self) -> float:
        return self.n * self.p

    @property
    def varpi(self) -> float:
        """High-degree threshold; first branch up to and including the seam."""
        n = self.n
        if n < 3:
            raise ValueError("the high-degree threshold needs n >= 3")
        lg = math.log(n)
        if self.np <= lg ** (1.0 - self.eta / 2.0):
            return self.np * math.sqrt(lg / math.log(lg))
        return self.np ** (1.0 + self.eta)

    def low_degree_cutoff(self) -> float:
        return (1.0 + self.delta * (1.0 - self.eps)) * self.np

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("n", "p", "delta", "delta_hat", "t", "eps", "eta")}


# --- sampling ---------------------------------------------------------------

class SeededSampler:
    """Single-owner uniform stream; ``position`` counts uniforms consumed."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.position = 0
        self._rng = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, size: int) -> np.ndarray:
        self.position += size
        return self._rng.random(size)

    def choice(self, pool: np.ndarray, size: int) -> np.ndarray:
        # consumes from the same stream; position tracks draws requested
        self.position += size
        return self._rng.choice(pool, size=size, replace=False)


def _as_sampler(seed) -> SeededSampler:
    return seed if isinstance(seed, SeededSampler) else SeededSampler(seed)


def pair_uniforms(n: int, seed) -> np.ndarray:
    """One uniform per pair (u, v), u < v, in lexicographic order."""
    return _as_sampler(seed).uniform(n * (n - 1) // 2)


def _pairs_from_mask(n: int, mask: np.ndarray) -> list[Edge]:
    iu, ju = np.triu_indices(n, k=1)
    return list(zip(iu[mask].tolist(), ju[mask].tolist()))


def sample_er(n: int, p: float, seed) -> Graph:
    """G(n, p) from per-pair uniforms, so graphs at p1 <= p2 are nested."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    u = pair_uniforms(n, seed)
    return Graph(n, _pairs_from_mask(n, u < p))


def sample_inhomogeneous(n: int, probs: np.ndarray, seed) -> tuple[Graph, np.ndarray]:
    """Graph with pair ``k`` (lexicographic) present w.p. ``probs[k]``.

    Returns the graph together with the 0/1 indicator vector.
    """
    u = pair_uniforms(n, seed)
    mask = u < probs
    return Graph(n, _pairs_from_mask(n, mask)), mask


def plant_clique(g: Graph, m: int) -> Graph:
    """Add every pair inside the vertices ``0..m-1``."""
    if not 1 <= m <= g.n:
        raise ValueError(f"clique size {m} out of range for n={g.n}")
    return g.with_edges((u, v) for u in range(m) for v in range(u + 1, m))


def plant_hub(g: Graph, v: int, d: int, seed) -> Graph:
    """Connect ``v`` to uniformly chosen non-neighbours until deg(v) >= d."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    if d > g.n - 1 or d < 0:
        raise ValueError(f"target degree {d} impossible with n={g.n}")
    need = d - g.degree(v)
    if need <= 0:
        return g
    pool = np.array([w for w in range(g.n) if w != v and w not in g.neighbors(v)])
    chosen = _as_sampler(seed).choice(pool, need)
    return g.with_edges((v, int(w)) for w in chosen)


# --- surgery ------------------------------------------------------------------

def two_core(g: Graph) -> Graph:
    """Maximal subgraph of minimum degree >= 2 (empty if none)."""
    deg = list(g.degrees)
    removed = [False] * g.n
    queue = deque(v for v in range(g.n) if deg[v] <= 1)
    while queue:
        v = queue.popleft()
        if removed[v]:
            continue
        removed[v] = True
        for w in g.neighbors(v):
            if not removed[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    queue.append(w)
    return Graph(g.n, ((u, v) for u, v in g.edges if not removed[u] and not removed[v]))


def _check_vertices(g: Graph, s: Iterable[int]) -> set[int]:
    s = set(s)
    bad = [v for v in s if not 0 <= v < g.n]
    if bad:
        raise ValueError(f"vertices out of range: {sorted(bad)}")
    return s


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    s = _check_vertices(g, s)
    return Graph(g.n, ((u, v) for u, v in g.edges if u in s and v in s))


def bipartite_subgraph(g: Graph, a: Iterable[int], b: Iterable[int]) -> Graph:
    """Edges with one endpoint in ``a`` and the other in ``b``."""
    a, b = _check_vertices(g, a), _check_vertices(g, b)
    if a & b:
        raise ValueError("vertex sets must be disjoint")
    return Graph(
        g.n,
        ((u, v) for u, v in g.edges if (u in a and v in b) or (u in b and v in a)),
    )


@dataclass(frozen=True)
class DegreeStats:
    max_degree: int
    # None for a graph without edges: the minimum over V(G) is undefined
    min_degree: int | None
    histogram: dict[int, int]


def degree_stats(g: Graph) -> DegreeStats:
    nz = [d for d in g.degrees if d > 0]
    hist: dict[int, int] = {}
    for d in nz:
        hist[d] = hist.get(d, 0) + 1
    return DegreeStats(max(nz, default=0), min(nz) if nz else None, dict(sorted(hist.items())))


def is_forest(g: Graph) -> bool:
    return g.num_edges == len(g.vertices()) - len(g.components())


# --- serialization -------------------------------------------------------------

def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.num_edges}"]
    lines += [f"{u + 1} {v + 1}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError("missing 'n m' header")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"header announces {m} edges, found {len(body)}")
    g = Graph(n, ((int(u) - 1, int(v) - 1) for u, v in body))
    if g.num_edges != m:
        raise ValueError("duplicate edges in edge list")
    return g


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(g))


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        return parse_edge_list(fh.read())
