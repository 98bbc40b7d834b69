"""The invariant suite behind ``erld verify``.

Every module's listed invariants are checked on small seeded fixtures.
Each check returns a :class:`Check`; the suite never raises on a
violation, it reports it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf
from scipy.stats import chi2_contingency

from . import decomposition as dec
from . import graph as gc
from . import homomorphism as hm
from . import montecarlo as mc
from . import rates
from . import spectral as sp

TOL = 1e-8


@dataclass
class Check:
    module: str
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "ok" if self.ok else "FAIL"
        tail = f"  ({self.detail})" if self.detail else ""
        return f"[{status}] {self.module}: {self.name}{tail}"


def random_graphs(count: int, n_max: int, seed: int, n_min: int = 2, probs=(0.2, 0.4, 0.6)):
    """Seeded fixture graphs of varying size and density."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        p = float(probs[i % len(probs)])
        out.append(gc.sample_er(n, p, mc.replicate_seed(seed, i)))
    return out


def _fails(items) -> str:
    items = list(items)
    return "" if not items else f"{len(items)} failures, first: {items[0]}"


# --- graph_core ---------------------------------------------------------------------

def check_graph_core() -> list[Check]:
    out = []
    cases = [(n, p, s) for n in (5, 20, 60) for p in (0.1, 0.5) for s in range(3)]
    bad = [c for c in cases if gc.sample_er(*c) != gc.sample_er(*c)]
    out.append(Check("graph_core", "sample_er reproducible", not bad, _fails(bad)))

    bad = []
    for n in (10, 40):
        for s in range(5):
            gs = [gc.sample_er(n, p, s) for p in (0.0, 0.05, 0.2, 0.5, 0.9, 1.0)]
            bad += [(n, s) for a, b in zip(gs, gs[1:]) if not a.is_subgraph_of(b)]
    out.append(Check("graph_core", "monotone coupling in p", not bad, _fails(bad)))

    bad = []
    for s in range(10):
        g = gc.sample_er(15, 0.2, s)
        if not g.is_subgraph_of(gc.plant_clique(g, 6)):
            bad.append(("clique", s))
        if not g.is_subgraph_of(gc.plant_hub(g, 3, 10, s)):
            bad.append(("hub", s))
    out.append(Check("graph_core", "plants are edge-supersets", not bad, _fails(bad)))

    bad = []
    for i, g in enumerate(random_graphs(60, 14, 11, probs=(0.1, 0.2, 0.3))):
        c = gc.two_core(g)
        degs = [c.degree(v) for v in c.vertices()]
        if not c.is_subgraph_of(g) or (degs and min(degs) < 2) or gc.two_core(c) != c:
            bad.append(i)
    out.append(Check("graph_core", "two_core: min degree 2, subgraph, idempotent", not bad, _fails(bad)))

    bad = [i for i, g in enumerate(random_graphs(20, 12, 12)) if gc.parse_edge_list(gc.format_edge_list(g)) != g]
    out.append(Check("graph_core", "edge-list round trip", not bad, _fails(bad)))
    return out


# --- spectral -----------------------------------------------------------------------

def check_spectral() -> list[Check]:
    out = []
    graphs = random_graphs(80, 30, 21, probs=(0.05, 0.1, 0.3))
    bad = []
    for i, g in enumerate(graphs):
        r = sp.bound_report(g)
        if r.violations(TOL):
            bad.append((i, r.violations(TOL)))
    out.append(Check("spectral", "bound report (i)-(viii) where applicable", not bad, _fails(bad)))

    rng = np.random.default_rng(22)
    bad = []
    for i, g in enumerate(graphs[:40]):
        es = g.sorted_edges()
        mask = rng.random(len(es)) < 0.5
        g1 = gc.Graph(g.n, [e for e, m in zip(es, mask) if m])
        g2 = g.edge_difference(g1)
        if sp.spectral_radius(g) > sp.spectral_radius(g1) + sp.spectral_radius(g2) + TOL:
            bad.append(i)
    out.append(Check("spectral", "edge-union subadditivity", not bad, _fails(bad)))

    bad = []
    for i in range(0, 20, 2):
        a, b = graphs[i], graphs[i + 1]
        u = gc.disjoint_union(a, b)
        if abs(sp.spectral_radius(u) - max(sp.spectral_radius(a), sp.spectral_radius(b))) > TOL:
            bad.append(i)
    out.append(Check("spectral", "disjoint union is max of parts", not bad, _fails(bad)))

    bad = []
    for i, g in enumerate(random_graphs(40, 16, 23, probs=(0.1, 0.2))):
        sides = sp.bipartition(g)
        if sides is None or g.num_edges == 0:
            continue
        lam = sp.spectral_radius(g)
        if any(sp.neighbor_degree_bound(g, s) < lam - TOL for s in sides):
            bad.append(i)
    out.append(Check("spectral", "bipartite bound (vii) from both sides", not bad, _fails(bad)))

    bad = []
    for i, g in enumerate(random_graphs(60, 30, 24, probs=(0.08, 0.12, 0.2))):
        c = gc.two_core(g)
        if c.num_edges:
            r = sp.bound_report(c)
            if r.excess_edge is None or r.excess_edge < r.lambda_ - TOL:
                bad.append(i)
    out.append(Check("spectral", "excess-edge bound (viii) on two-cores", not bad, _fails(bad)))

    exact = [
        (gc.complete_graph(7), 6.0),
        (gc.star_graph(9), 3.0),
        (gc.cycle_graph(11), 2.0),
    ]
    bad = [repr(g) for g, v in exact if abs(sp.spectral_radius(g) - v) > TOL]
    out.append(Check("spectral", "equality cases K_m, star, cycle", not bad, _fails(bad)))
    return out


# --- homomorphism ------------------------------------------------------------------

def check_homomorphism() -> list[Check]:
    out = []
    graphs = list(mc.all_graphs(4)) + random_graphs(40, 6, 31)
    cycles = {t: gc.cycle_graph(2 * t) for t in (2, 3)}
    bad = [(i, t) for i, g in enumerate(graphs) for t in (2, 3) if hm.hom_cycle(g, t) != hm.hom_brute(cycles[t], g)]
    out.append(Check("homomorphism", "hom_cycle = brute force", not bad, _fails(bad)))

    bad = []
    for i, g in enumerate(random_graphs(30, 10, 32)):
        if g.num_edges == 0:
            continue
        ev = np.linalg.eigvalsh(g.adjacency_matrix())
        for t in (2, 3):
            h = hm.hom_cycle(g, t)
            if abs(h - float(np.sum(ev ** (2 * t)))) > 1e-6 * h:
                bad.append((i, t))
    out.append(Check("homomorphism", "trace consistency", not bad, _fails(bad)))

    bad = []
    for i, g in enumerate(random_graphs(30, 9, 33)):
        for t in (2, 3):
            h = hm.hom_cycle(g, t)
            s = sum(hm.hom_cycle_edge_all(g, t).values())
            if not h <= s <= 2 * t * h:
                bad.append((i, t))
    out.append(Check("homomorphism", "edge-sum sandwich", not bad, _fails(bad)))

    bad = [i for i, g in enumerate(random_graphs(15, 5, 34)) if hm.hom_via_quotients(cycles[2], g) != hm.hom_brute(cycles[2], g)]
    out.append(Check("homomorphism", "quotient identity", not bad, _fails(bad)))

    bad = []
    for i, g in enumerate(random_graphs(30, 12, 35)):
        lam = sp.spectral_radius(g)
        for t in (2, 3):
            h = hm.hom_cycle(g, t)
            if lam ** (2 * t) > h * (1 + 1e-9) + 1e-9:
                bad.append((i, t))
    out.append(Check("homomorphism", "spectral link λ^{2t} <= Hom", not bad, _fails(bad)))

    out.append(Check("homomorphism", "Catalan tree counts",
                     [hm.tree_quotient_count(t) for t in range(2, 7)] == [2, 5, 14, 42, 132]))

    bad = []
    for i, g in enumerate(random_graphs(12, 5, 36)):
        for ell in (1, 2, 3):
            if hm.hom_brute(hm.path_for_bound(ell), g) > hm.path_hom_bound(g, ell):
                bad.append(("path", i, ell))
        sides = sp.bipartition(g) if g.num_edges else None
        if sides:
            for u1, u2 in (sides, sides[::-1]):
                a = hm.minimal_alpha(g, u1)
                if hm.hom_cycle(g, 2) > hm.bipartite_hom_bound(g, u1, u2, 2, a) * (1 + 1e-12):
                    bad.append(("bipartite", i))
        for t in (2, 3):
            if not g.num_edges:
                continue
            reg, vh, eh = hm.cycle_shape(t)
            local = hm.hom_cycle_edge_all(g, t)
            for e, c in local.items():
                if c > hm.local_hom_bound(g, e, reg, vh, eh) * (1 + 1e-12):
                    bad.append(("local", i, e))
            sub = gc.Graph(g.n, g.sorted_edges()[: max(1, g.num_edges // 2)])
            if sum(local[e] for e in sub.edges) > hm.excess_hom_bound(g, sub, reg, vh, eh) * (1 + 1e-12):
                bad.append(("excess", i))
    out.append(Check("homomorphism", "bounds dominate exact counts", not bad, _fails(bad)))
    return out


# --- decomposition ----------------------------------------------------------------

def check_decomposition() -> list[Check]:
    out = []
    bad = []
    for i, g in enumerate(random_graphs(20, 30, 41, n_min=8, probs=(0.1, 0.2))):
        params = gc.RegimeParams(n=g.n, p=0.15, delta=0.3, eta=0.24)
        d = dec.decompose(g, params)
        classes = [d.V_H, d.V_M, d.V_L1, d.V_L2]
        if sum(map(len, classes)) != len(set().union(*classes)) or set().union(*classes) != set(g.vertices()):
            bad.append((i, "classes"))
        owner = dec.edge_partition_names(d)
        if set(owner) != set(g.edges) or any(len(v) != 1 for v in owner.values()):
            bad.append((i, "edges"))
        stars = d.tildeF_HL1
        for comp in stars.components():
            centres = [v for v in comp if stars.degree(v) == len(comp) - 1]
            if not any(v in d.V_H for v in centres):
                bad.append((i, "star"))
    out.append(Check("decomposition", "classes partition, edges owned once, stars centred in V_H", not bad, _fails(bad)))

    bad = []
    for i, g in enumerate(random_graphs(25, 9, 42, probs=(0.3, 0.5, 0.7))):
        for theta in (5, 40):
            pruned, removed = dec.prune_core(g, 2, theta)
            local = hm.hom_cycle_edge_all(pruned, 2)
            if any(c < theta for c in local.values()):
                bad.append((i, theta, "local"))
            if hm.hom_cycle(g, 2) - hm.hom_cycle(pruned, 2) > theta * removed:
                bad.append((i, theta, "loss"))
            if dec.prune_core(pruned, 2, theta) != (pruned, 0):
                bad.append((i, theta, "idempotent"))
    out.append(Check("decomposition", "prune_core contract and idempotence", not bad, _fails(bad)))

    bad = []
    flags = ("is_seed", "is_core", "is_strong_core", "is_preseed_surrogate")
    for i, g in enumerate(random_graphs(15, 14, 43, n_min=10, probs=(0.3, 0.5))):
        prev = None
        for dh in (0.2, 0.5, 1.0, 2.0):
            rep = dec.classify(g, gc.RegimeParams(n=g.n, p=0.3, delta_hat=dh, t=2))
            cur = [getattr(rep, f) for f in flags]
            if prev is not None and any(c and not q for c, q in zip(cur, prev)):
                bad.append((i, dh))
            prev = cur
    out.append(Check("decomposition", "classify monotone in δ̂", not bad, _fails(bad)))

    bad = []
    for i, g in enumerate(random_graphs(25, 30, 44, probs=(0.1, 0.2))):
        h = dec.gamma_prune_step(g, 0.5, gc.RegimeParams(n=g.n, p=0.15))
        degs = [h.degree(v) for v in h.vertices()]
        if degs and min(degs) < 2:
            bad.append(i)
    out.append(Check("decomposition", "gamma_prune_step min degree >= 2", not bad, _fails(bad)))
    return out


# --- rates -------------------------------------------------------------------------

SANDWICH_N = (10, 20, 50, 100, 200)
SANDWICH_S = (0.05, 0.1, 0.2, 0.3, 0.5)


def sandwich_grid():
    """(N, s, λ) with λ = k/N strictly between s and 1."""
    for N in SANDWICH_N:
        for s in SANDWICH_S:
            for k in range(N):
                if k / N > s:
                    yield N, s, k


def exact_tail(N: int, s: float, k: int):
    """P(Bin(N, s) >= k) by direct summation in 50-digit arithmetic."""
    with mp.workdps(50):
        q = mpf(s)
        return mp.fsum(mp.binomial(N, j) * q**j * (1 - q) ** (N - j) for j in range(k, N + 1))


def check_rates() -> list[Check]:
    out = []
    bad_ash, bad_ch = [], []
    for N, s, k in sandwich_grid():
        lam = k / N
        ex = float(exact_tail(N, s, k))
        lo, up = rates.binomial_tail_bounds(N, s, lam)
        if not (lo <= ex * (1 + 1e-12) and ex <= up * (1 + 1e-12)):
            bad_ash.append((N, s, k))
        if ex > rates.chernoff_bound(N, s, lam / s - 1) * (1 + 1e-12):
            bad_ch.append((N, s, k))
    out.append(Check("rates", "binomial sandwich on grid", not bad_ash, _fails(bad_ash)))
    out.append(Check("rates", "Chernoff dominates on grid", not bad_ch, _fails(bad_ch)))

    ok = True
    for d in (0.5, 1.0, 2.0):
        below = rates.rate_intermediate(d, 2 / 3 - 1e-6)
        above = rates.rate_intermediate(d, 2 / 3 + 1e-6)
        at = rates.rate_intermediate(d, 2 / 3)
        ok &= below == 0.5 * (1 + d) ** 2 and above < 0.5 * (1 + d) ** 2
        ok &= abs(below - at) < 1e-4 and abs(above - at) < 1e-4
    out.append(Check("rates", "rate_intermediate branches cross at 2/3", ok))

    stars = [rates.hom_crossover_alpha(t) for t in range(3, 11)]
    ok = all(a < b for a, b in zip(stars, stars[1:]))
    for t, a in zip(range(3, 11), stars):
        ok &= rates.rate_hom(t, 1.0, a - 1e-7) == 0.5 and rates.rate_hom(t, 1.0, a + 1e-7) < 0.5
    out.append(Check("rates", "rate_hom crossover α* increasing in t", ok))

    ps = np.geomspace(0.002, 0.05, 50)
    diffs = [rates.clique_cost(gc.RegimeParams(1000, float(p))) - rates.hub_cost(gc.RegimeParams(1000, float(p))) for p in ps]
    flips = [i for i in range(49) if np.sign(diffs[i]) != np.sign(diffs[i + 1])]
    near = len(flips) == 1 and min(abs(np.log(ps[flips[0]]) - np.log(0.01)), abs(np.log(ps[flips[0] + 1]) - np.log(0.01))) <= np.log(ps[1] / ps[0])
    out.append(Check("rates", "clique-hub sign change once, near n^{-2/3}", near, f"flips at {flips}"))

    p = 0.07
    ok = abs(rates.mean_field_cost(np.full(30, p), p)) <= 1e-12
    xi = np.full(30, p)
    xi[4] += 1e-3
    ok &= rates.mean_field_cost(xi, p) > 1e-12
    out.append(Check("rates", "mean_field_cost zero iff ξ ≡ p", ok))
    return out


# --- montecarlo -------------------------------------------------------------------

MC_FIXTURES = (
    (4, 0.5, "spectral_radius", 2.0),
    (4, 0.5, "hom_cycle", 18),
    (3, 0.3, "max_degree", 2),
)


def check_montecarlo(samples: int = 3000, workers: int | None = None) -> list[Check]:
    out = []
    bad = []
    for n, p, stat, thr in MC_FIXTURES:
        exact = float(mc.exhaustive_tail(n, p, stat, thr))
        est = mc.estimate_tail(n, p, stat, thr, samples, seed=51, workers=workers)
        lo, hi = est.interval(0.99)
        if not lo <= exact <= hi:
            bad.append((n, p, stat, thr, exact, est.p_hat))
    out.append(Check("montecarlo", "estimate_tail within Wilson 99% of exhaustive", not bad, _fails(bad)))

    ev = mc.Event("spectral_radius", 2.0)
    w = mc.importance_tail(4, 0.5, 0.2, ev, samples, seed=52)
    crude = mc.estimate_tail(4, 0.5, "spectral_radius", 2.0, samples, seed=53, workers=workers)
    se_c = math.sqrt(crude.p_hat * (1 - crude.p_hat) / samples)
    z = abs(w.estimate - crude.p_hat) / math.hypot(w.stderr, se_c)
    out.append(Check("montecarlo", "importance sampling agrees with crude MC", z <= 3, f"z={z:.2f}"))

    law = mc.conditional_max_degree(8, 0.3, None, samples, seed=54)
    ref: dict[int, int] = {}
    for i in range(samples):
        d = max(gc.sample_er(8, 0.3, mc.replicate_seed(55, i)).degrees)
        ref[d] = ref.get(d, 0) + 1
    keys = sorted(set(law.histogram) | set(ref))
    table = np.array([[law.histogram.get(k, 0) for k in keys], [ref.get(k, 0) for k in keys]])
    table = table[:, table.sum(axis=0) > 0]
    pval = chi2_contingency(table)[1]
    out.append(Check("montecarlo", "trivial conditioning reproduces unconditional law", pval >= 0.01, f"p={pval:.3f}"))

    bad = []
    for n, p, d in ((200, 0.05, 0.5), (10**4, 1e-3, 0.5), (60, 0.1, 1.0), (100, 0.04, 0.5)):
        prm = gc.RegimeParams(n, p, delta=d)
        if rates.clique_size(prm) + 1 <= n and not mc.planted_check(prm, "clique", base=gc.Graph(n)):
            bad.append(("clique", n, p))
        if rates.hub_degree(prm) <= n - 1 and not mc.planted_check(prm, "hub", base=gc.Graph(n)):
            bad.append(("hub", n, p))
    out.append(Check("montecarlo", "planted structures force the event", not bad, _fails(bad)))
    return out


# --- cli ----------------------------------------------------------------------------

def check_cli() -> list[Check]:
    from .cli import run_to_string

    args = ["rates", "--n", "1000", "--delta", "0.5", "--p-min", "0.002", "--p-max", "0.05", "--p-points", "7"]
    a, b = run_to_string(args), run_to_string(args)
    return [Check("cli", "identical config gives identical output", a == b and a[0] == 0)]


MODULE_CHECKS = {
    "graph_core": check_graph_core,
    "spectral": check_spectral,
    "homomorphism": check_homomorphism,
    "decomposition": check_decomposition,
    "rates": check_rates,
    "montecarlo": check_montecarlo,
    "cli": check_cli,
}


def run_suite(modules=None, workers: int | None = None) -> list[Check]:
    checks = []
    for name, fn in MODULE_CHECKS.items():
        if modules and name not in modules:
            continue
        checks += fn(workers=workers) if name == "montecarlo" else fn()
    return checks

