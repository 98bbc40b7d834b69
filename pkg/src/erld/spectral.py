"""Top adjacency eigenvalue and the classical bound suite around it."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Graph, is_forest

MAX_ITER = 10**6
SLACK = 1e-8
DENSE_LIMIT = 256


class ConvergenceError(RuntimeError):
    pass


def _component_radius(a, rng: np.random.Generator, tol: float, max_iter: int) -> float:
    """Perron root of a connected component's adjacency ``a``.

    Iterates on A + I so the Perron root strictly dominates even for
    bipartite components.  Stops on the Collatz–Wielandt bracket
    min (Bx)_i/x_i <= rho(B) <= max (Bx)_i/x_i, whose width bounds the error.
    """
    k = a.shape[0]
    if k == 1:
        return 0.0
    if k == 2:
        return 1.0
    x = rng.uniform(0.5, 1.5, size=k)
    for _ in range(max_iter):
        y = a @ x + x
        ratio = y / x
        lo, hi = ratio.min(), ratio.max()
        if hi - lo < tol:
            return 0.5 * (lo + hi) - 1.0
        x = y / np.linalg.norm(y)
    raise ConvergenceError(f"power iteration did not reach tol={tol} in {max_iter} steps")


def spectral_radius(g: Graph, tol: float = 1e-10, seed: int = 0, max_iter: int = MAX_ITER) -> float:
    """λ(G): the max of the per-component Perron roots."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if g.num_edges == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    best = 0.0
    for comp in g.components():
        k = len(comp)
        if k <= 2:
            best = max(best, float(k - 1))
            continue
        if k <= DENSE_LIMIT:
            pos = {v: i for i, v in enumerate(comp)}
            sub = np.zeros((k, k))
            for v in comp:
                for w in g.neighbors(v):
                    sub[pos[v], pos[w]] = 1.0
        else:
            idx = np.asarray(comp)
            sub = g.to_sparse()[idx][:, idx]
        best = max(best, _component_radius(sub, rng, tol, max_iter))
    return best


def bipartition(g: Graph) -> tuple[set[int], set[int]] | None:
    """2-colouring of the non-isolated vertices, or None if an odd cycle exists."""
    color: dict[int, int] = {}
    for s in g.vertices():
        if s in color:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if w not in color:
                    color[w] = 1 - color[u]
                    queue.append(w)
                elif color[w] == color[u]:
                    return None
    side0 = {v for v, c in color.items() if c == 0}
    side1 = {v for v, c in color.items() if c == 1}
    return side0, side1


def is_star(g: Graph) -> bool:
    vs = g.vertices()
    if not vs:
        return False
    dmax = max(g.degrees)
    return g.num_edges == dmax and len(vs) == dmax + 1


def neighbor_degree_bound(g: Graph, side) -> float:
    """max over v in ``side`` of sqrt(sum of neighbour degrees)."""
    return max((math.sqrt(sum(g.degree(u) for u in g.neighbors(v))) for v in side), default=0.0)


@dataclass
class BoundReport:
    lambda_: float
    sqrt_max_deg: float
    max_deg: float
    sqrt_2e: float
    forest_bound: float | None = None
    star_value: float | None = None
    bipartite_dd: float | None = None
    bipartite_neighbor: float | None = None
    excess_edge: float | None = None
    absent: dict[str, str] = field(default_factory=dict)

    def lower_bounds(self) -> dict[str, float]:
        out = {"sqrt_max_deg": self.sqrt_max_deg}
        if self.star_value is not None:
            out["star_value"] = self.star_value
        return out

    def upper_bounds(self) -> dict[str, float]:
        out = {"max_deg": self.max_deg, "sqrt_2e": self.sqrt_2e}
        for k in ("forest_bound", "star_value", "bipartite_dd", "bipartite_neighbor", "excess_edge"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out

    def violations(self, tol: float = SLACK) -> list[str]:
        bad = [k for k, v in self.lower_bounds().items() if v > self.lambda_ + tol]
        bad += [k for k, v in self.upper_bounds().items() if v < self.lambda_ - tol]
        return bad

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lambda_")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def bound_report(g: Graph, tol: float = 1e-10) -> BoundReport:
    lam = spectral_radius(g, tol)
    dmax = max(g.degrees, default=0)
    e = g.num_edges
    rep = BoundReport(lam, math.sqrt(dmax), float(dmax), math.sqrt(2 * e))

    if e == 0:
        rep.absent["forest_bound"] = "no edges"
    elif not is_forest(g):
        rep.absent["forest_bound"] = "graph has a cycle"
    elif dmax < 2:
        # a perfect matching has λ = 1 > 2√0
        rep.absent["forest_bound"] = "maximum degree below 2"
    else:
        rep.forest_bound = 2.0 * math.sqrt(dmax - 1)

    if is_star(g):
        rep.star_value = math.sqrt(dmax)
    else:
        rep.absent["star_value"] = "not a star"

    sides = bipartition(g) if e else None
    if sides is None:
        reason = "no edges" if e == 0 else "not bipartite"
        rep.absent["bipartite_dd"] = rep.absent["bipartite_neighbor"] = reason
    else:
        d1 = max(g.degree(v) for v in sides[0])
        d2 = max(g.degree(v) for v in sides[1])
        rep.bipartite_dd = math.sqrt(d1 * d2)
        rep.bipartite_neighbor = min(neighbor_degree_bound(g, s) for s in sides)

    vs = g.vertices()
    if vs and min(g.degree(v) for v in vs) >= 2:
        rep.excess_edge = math.sqrt(2 * (e - len(vs)) + dmax + 2)
    else:
        rep.absent["excess_edge"] = "minimum degree below 2"
    return rep


def subgraph_monotonicity_check(g: Graph, g_sub: Graph, tol: float = SLACK) -> bool:
    if not g_sub.is_subgraph_of(g):
        raise ValueError("g_sub is not a subgraph of g")
    return spectral_radius(g_sub) <= spectral_radius(g) + tol
