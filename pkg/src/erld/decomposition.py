"""Degree-class decomposition, core classification and edge pruning."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .graph import Edge, Graph, RegimeParams, bipartite_subgraph, induced_subgraph, is_forest, two_core
from .homomorphism import _component_subgraphs, expected_hom, hom_cycle, hom_cycle_edge_all

DEFAULT_C_BAR = 1.0
DEFAULT_C_STAR_FACTOR = 8.0


@dataclass(frozen=True)
class Decomposition:
    V_H: frozenset[int]
    V_M: frozenset[int]
    V_L1: frozenset[int]
    V_L2: frozenset[int]
    subgraphs: dict[str, Graph] = field(hash=False)

    def __getattr__(self, name):
        try:
            return self.__dict__["subgraphs"][name]
        except KeyError:
            raise AttributeError(name) from None

    # the edge-partitioning pieces; cores and forests refine some of them
    PIECES = ("G_H", "G_M", "G_L1", "G_L2", "G_HM", "G_ML", "G_L1L2", "G_HL1")

    def to_dict(self) -> dict:
        out = {k: sorted(getattr(self, k)) for k in ("V_H", "V_M", "V_L1", "V_L2")}
        out["subgraphs"] = {
            k: [[u, v] for u, v in g.sorted_edges()] for k, g in sorted(self.subgraphs.items())
        }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def star_forest_split(forest: Graph, v_h, v_l1) -> tuple[Graph, Graph]:
    """Split a V_H–V_L1 forest into its leaf stars and the remainder.

    The first graph holds the edges at V_L1 vertices of forest-degree one.
    """
    v_h, v_l1 = set(v_h), set(v_l1)
    if not is_forest(forest):
        raise ValueError("input is not a forest")
    for u, v in forest.edges:
        if not ((u in v_h and v in v_l1) or (u in v_l1 and v in v_h)):
            raise ValueError(f"edge ({u}, {v}) is not between V_H and V_L1")
    stars = [(u, v) for u, v in forest.edges
             if (u in v_l1 and forest.degree(u) == 1) or (v in v_l1 and forest.degree(v) == 1)]
    tilde = Graph(forest.n, stars)
    return tilde, forest.edge_difference(tilde)


def vertex_classes(g: Graph, params: RegimeParams):
    if params.n != g.n:
        raise ValueError(f"params.n={params.n} but graph has n={g.n}")
    hi = params.varpi
    lo = params.low_degree_cutoff()
    vs = g.vertices()
    v_h = {v for v in vs if g.degree(v) >= hi}
    # V_H wins when the two cut-offs overlap at small n
    v_l = {v for v in vs if g.degree(v) <= lo and v not in v_h}
    v_m = set(vs) - v_h - v_l
    v_l1 = {v for v in v_l if g.neighbors(v) & v_h}
    return v_h, v_m, v_l1, v_l - v_l1


def decompose(g: Graph, params: RegimeParams) -> Decomposition:
    v_h, v_m, v_l1, v_l2 = vertex_classes(g, params)
    v_l = v_l1 | v_l2
    sg = {
        "G_H": induced_subgraph(g, v_h),
        "G_M": induced_subgraph(g, v_m),
        "G_L1": induced_subgraph(g, v_l1),
        "G_L2": induced_subgraph(g, v_l2),
        "G_HM": bipartite_subgraph(g, v_h, v_m),
        "G_ML": bipartite_subgraph(g, v_m, v_l),
        "G_L1L2": bipartite_subgraph(g, v_l1, v_l2),
        "G_HL1": bipartite_subgraph(g, v_h, v_l1),
    }
    for name in ("L1L2", "L1", "HL1"):
        core = two_core(sg[f"G_{name}"])
        sg[f"hatG_{name}"] = core
        sg[f"F_{name}"] = sg[f"G_{name}"].edge_difference(core)
    sg["tildeF_HL1"], sg["hatF_HL1"] = star_forest_split(sg["F_HL1"], v_h, v_l1)
    return Decomposition(frozenset(v_h), frozenset(v_m), frozenset(v_l1), frozenset(v_l2), sg)


def prune_core(g: Graph, t: int, theta: float) -> tuple[Graph, int]:
    """Delete edges with per-edge cycle count below ``theta`` until none is left.

    The lowest current count goes first, ties by edge order.  Each deletion
    lowers Hom(C_2t, ·) by exactly the deleted edge's count, so the total
    loss is below theta times the number of deletions.
    """
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    local = hom_cycle_edge_all(g, t)
    edges = set(g.edges)
    removed = 0
    while local:
        e, c = min(local.items(), key=lambda kv: (kv[1], kv[0]))
        if c >= theta:
            break
        edges.discard(e)
        removed += 1
        # only the component that held e changes
        cur = Graph(g.n, edges)
        touched = set(e)
        for comp, sub in _component_subgraphs(cur):
            if touched & set(comp):
                total = hom_cycle(sub, t)
                for a, b in sub.sorted_edges():
                    local[(comp[a], comp[b])] = total - hom_cycle(sub.without_edges([(a, b)]), t)
        del local[e]
    return Graph(g.n, edges), removed


@dataclass
class CoreReport:
    is_preseed_surrogate: bool
    is_seed: bool
    is_core: bool
    is_strong_core: bool
    hom: int
    edges: int
    min_local: int | None
    conditions: dict[str, bool]
    thresholds: dict[str, float]

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["hom"] = str(self.hom)
        d["min_local"] = None if self.min_local is None else str(self.min_local)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def default_c_star(params: RegimeParams, factor: float = DEFAULT_C_STAR_FACTOR) -> float:
    return factor * params.delta_hat ** (1.0 / params.t)


def core_thresholds(params: RegimeParams, c_bar: float = DEFAULT_C_BAR, c_star: float | None = None) -> dict[str, float]:
    n, p, t, dh, eps = params.n, params.p, params.t, params.delta_hat, params.eps
    c_star = default_c_star(params) if c_star is None else c_star
    np2 = (n * p) ** 2
    npt = (n * p) ** (2 * t)
    edge_cap = c_bar * np2 * math.log(1 / p)
    return {
        "PS1_surrogate": dh * (1 - eps) * expected_hom(params) if n * p > 1 else math.inf,
        "S1": dh * (1 - 2 * eps) * npt,
        "C1": dh * (1 - 3 * eps) * npt,
        "SC1": dh * (1 - 6 * eps) * npt,
        "edge_cap": edge_cap,
        "SC2": c_star * np2,
        "C3": dh * eps * npt / edge_cap,
        "SC3": dh * eps / c_star * (n * p) ** (2 * t - 2),
        "c_bar": c_bar,
        "c_star": c_star,
    }


def classify(g: Graph, params: RegimeParams, c_bar: float = DEFAULT_C_BAR, c_star: float | None = None) -> CoreReport:
    """Evaluate the seed / core / strong-core conditions with exact counts.

    The pre-seed condition involves a conditional expectation; it is replaced
    by Hom(G) >= δ̂(1-ε)·E Hom plus the edge cap.
    """
    th = core_thresholds(params, c_bar, c_star)
    t = params.t
    hom = hom_cycle(g, t)
    e = g.num_edges
    local = hom_cycle_edge_all(g, t)
    min_local = min(local.values()) if local else None
    # vacuous for an edgeless graph; its Hom = 0 fails the count conditions anyway
    ml = math.inf if min_local is None else min_local
    cond = {
        "PS1_surrogate": hom >= th["PS1_surrogate"],
        "S1": hom >= th["S1"],
        "S2": e <= th["edge_cap"],
        "C1": hom >= th["C1"],
        "C2": e <= th["edge_cap"],
        "C3": ml >= th["C3"],
        "SC1": hom >= th["SC1"],
        "SC2": e <= th["SC2"],
        "SC3": ml >= th["SC3"],
    }
    return CoreReport(
        is_preseed_surrogate=cond["PS1_surrogate"] and cond["S2"],
        is_seed=cond["S1"] and cond["S2"],
        is_core=cond["C1"] and cond["C2"] and cond["C3"],
        is_strong_core=cond["SC1"] and cond["SC2"] and cond["SC3"],
        hom=hom,
        edges=e,
        min_local=min_local,
        conditions=cond,
        thresholds=th,
    )


def high_low_split(g: Graph, c0: float, params: RegimeParams) -> tuple[Graph, Graph]:
    """Edges with endpoint degree product >= C0 n^2 p^2, and the rest."""
    if c0 <= 0:
        raise ValueError("C0 must be positive")
    cut = c0 * params.np**2
    high = [(u, v) for u, v in g.edges if g.degree(u) * g.degree(v) >= cut]
    gh = Graph(g.n, high)
    return gh, g.edge_difference(gh)


def gamma_prune_step(g: Graph, gamma_star: float, params: RegimeParams) -> Graph:
    """Two-core of the subgraph induced on vertices of degree >= γ* np."""
    if gamma_star <= 0:
        raise ValueError("gamma_star must be positive")
    cut = gamma_star * params.np
    v1 = [v for v in range(g.n) if g.degree(v) >= cut]
    return two_core(induced_subgraph(g, v1))


def edge_partition_names(dec: Decomposition) -> dict[Edge, list[str]]:
    """For each edge, the partitioning pieces that contain it (should be one)."""
    owner: dict[Edge, list[str]] = {}
    for name in Decomposition.PIECES:
        for e in dec.subgraphs[name].edges:
            owner.setdefault(e, []).append(name)
    return owner
