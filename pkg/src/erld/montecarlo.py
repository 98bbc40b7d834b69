"""Seeded Monte Carlo and exhaustive estimates of upper-tail events.

Replicate ``i`` of a run with seed ``s`` always uses the stream
``replicate_seed(s, i)``, so results do not depend on the worker count.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from .graph import Graph, RegimeParams, complete_graph, plant_clique, plant_hub, sample_er, sample_inhomogeneous
from .homomorphism import hom_cycle
from .rates import clique_size, hub_degree
from .spectral import spectral_radius

STATISTICS = ("spectral_radius", "hom_cycle", "max_degree")
MIN_ACCEPTANCE = 1e-6
WORKERS_ENV = "ERLD_WORKERS"
# tolerance used when comparing λ against a threshold
LAMBDA_SLACK = 1e-9


class InfeasibleEvent(RuntimeError):
    pass


def replicate_seed(seed: int, i: int) -> int:
    return int(np.random.SeedSequence((seed, i)).generate_state(1, np.uint64)[0])


def default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


@dataclass(frozen=True)
class Event:
    """{statistic(G) >= threshold}."""

    statistic: str
    threshold: float
    t: int = 2

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")

    def value(self, g: Graph):
        if self.statistic == "spectral_radius":
            return spectral_radius(g)
        if self.statistic == "hom_cycle":
            return hom_cycle(g, self.t)
        return max(g.degrees, default=0)

    def holds(self, g: Graph) -> bool:
        v = self.value(g)
        if self.statistic == "spectral_radius":
            return v >= self.threshold - LAMBDA_SLACK
        return v >= self.threshold

    def describe(self) -> str:
        name = f"hom_cycle(t={self.t})" if self.statistic == "hom_cycle" else self.statistic
        return f"{name} >= {self.threshold}"


@dataclass
class TailEstimate:
    event: str
    samples: int
    hits: int
    p_hat: float
    wilson_interval: tuple[float, float]
    log_p_hat: float

    def interval(self, level: float = 0.95) -> tuple[float, float]:
        lo, hi = proportion_confint(self.hits, self.samples, alpha=1 - level, method="wilson")
        return float(lo), float(hi)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["wilson_interval"] = list(self.wilson_interval)
        if self.hits == 0:
            d["log_p_hat"] = "-inf"
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _hit_chunk(args) -> list[int]:
    n, p, event, seed, idx = args
    return [int(event.holds(sample_er(n, p, replicate_seed(seed, i)))) for i in idx]


def _map_replicates(fn, n, p, event, seed, indices, workers):
    if workers <= 1:
        return fn((n, p, event, seed, indices))
    chunks = [indices[k::workers] for k in range(workers)]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(fn, [(n, p, event, seed, c) for c in chunks]))
    out = [None] * len(indices)
    pos = {i: k for k, i in enumerate(indices)}
    for c, part in zip(chunks, parts):
        for i, v in zip(c, part):
            out[pos[i]] = v
    return out


def estimate_tail(
    n: int, p: float, statistic: str, threshold: float, samples: int, seed: int, t: int = 2, workers: int | None = None
) -> TailEstimate:
    """Crude Monte Carlo estimate of P(statistic(G(n,p)) >= threshold)."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    event = Event(statistic, threshold, t)
    workers = default_workers() if workers is None else workers
    hits = sum(_map_replicates(_hit_chunk, n, p, event, seed, list(range(samples)), workers))
    lo, hi = proportion_confint(hits, samples, alpha=0.05, method="wilson")
    p_hat = hits / samples
    return TailEstimate(event.describe(), samples, hits, p_hat, (float(lo), float(hi)),
                        math.log(p_hat) if hits else -math.inf)


def all_graphs(n: int):
    """Every labelled graph on n vertices, by bitmask over lexicographic pairs."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield Graph(n, (pairs[k] for k in range(len(pairs)) if mask >> k & 1))


def _as_fraction(p) -> Fraction:
    return p if isinstance(p, Fraction) else Fraction(p)


def exhaustive_tail(n: int, p, statistic: str, threshold: float, t: int = 2) -> Fraction:
    """Exact P(event) by summing over all 2^C(n,2) graphs (n <= 5).

    Floats are converted exactly, so p = 0.5 gives an exact rational.
    """
    if n > 5:
        raise ValueError("exhaustive enumeration is limited to n <= 5")
    event = Event(statistic, threshold, t)
    q = _as_fraction(p)
    pairs = n * (n - 1) // 2
    return sum(
        (q**g.num_edges * (1 - q) ** (pairs - g.num_edges) for g in all_graphs(n) if event.holds(g)),
        Fraction(0),
    )


def exhaustive_conditional_law(n: int, p, event: Event, stat=lambda g: max(g.degrees, default=0)) -> dict[int, Fraction]:
    """Exact law of ``stat`` given the event, by enumeration."""
    q = _as_fraction(p)
    pairs = n * (n - 1) // 2
    law: dict[int, Fraction] = {}
    for g in all_graphs(n):
        if event.holds(g):
            w = q**g.num_edges * (1 - q) ** (pairs - g.num_edges)
            k = stat(g)
            law[k] = law.get(k, Fraction(0)) + w
    z = sum(law.values(), Fraction(0))
    if z == 0:
        raise InfeasibleEvent("event has probability zero")
    return {k: v / z for k, v in sorted(law.items())}


@dataclass
class ConditionalLaw:
    histogram: dict[int, int]
    accepted: int
    attempts: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts

    def distribution(self) -> dict[int, float]:
        return {k: v / self.accepted for k, v in self.histogram.items()}

    def to_json(self) -> str:
        return json.dumps({"histogram": {str(k): v for k, v in self.histogram.items()},
                           "accepted": self.accepted, "attempts": self.attempts,
                           "acceptance_rate": self.acceptance_rate}, sort_keys=True)


def conditional_max_degree(
    n: int, p: float, event: Event | None, samples: int, seed: int, max_attempts: int | None = None
) -> ConditionalLaw:
    """Rejection-sample Δ(G) given the event.

    Refuses up front when even K_n misses the event (all statistics are
    monotone in edges), and after ``max_attempts`` draws if fewer than
    ``samples`` were accepted and the acceptance rate is below 1e-6.
    """
    if event is not None and not event.holds(complete_graph(n)):
        raise InfeasibleEvent(f"{event.describe()} is impossible on {n} vertices")
    max_attempts = max_attempts if max_attempts is not None else max(100 * samples, 10**5)
    hist: dict[int, int] = {}
    accepted = attempts = 0
    while accepted < samples:
        if attempts >= max_attempts:
            rate = accepted / attempts
            if rate < MIN_ACCEPTANCE:
                raise InfeasibleEvent(f"acceptance rate {rate:.2e} below {MIN_ACCEPTANCE}")
            raise InfeasibleEvent(f"only {accepted}/{samples} accepted in {attempts} attempts")
        g = sample_er(n, p, replicate_seed(seed, attempts))
        attempts += 1
        if event is None or event.holds(g):
            d = max(g.degrees, default=0)
            hist[d] = hist.get(d, 0) + 1
            accepted += 1
    return ConditionalLaw(dict(sorted(hist.items())), accepted, attempts)


def max_binomial_law(n: int, p: float) -> np.ndarray:
    """Law of max of n iid Bin(n-1, p): an independence proxy for Δ(G(n,p))."""
    from scipy.stats import binom

    k = np.arange(n)
    cdf = binom.cdf(k, n - 1, p) ** n
    return np.diff(np.concatenate([[0.0], cdf]))


def planted_check(params: RegimeParams, structure: str, seed: int = 0, base: Graph | None = None) -> bool:
    """Does planting the prescribed structure force λ >= (1+δ)np?

    A clique on ⌈(1+δ)np⌉+1 vertices gives λ >= m-1; a hub of degree
    ⌈(1+δ)²n²p²⌉ gives λ >= √Δ.  Both certificates are exact; the planted
    graph is G(n,p) drawn from ``seed`` unless ``base`` is given.
    """
    target = (1 + params.delta) * params.np
    g = base if base is not None else sample_er(params.n, params.p, seed)
    if structure == "clique":
        m = clique_size(params) + 1
        if m > params.n:
            raise ValueError(f"clique of size {m} does not fit in n={params.n}")
        h = plant_clique(g, m)
        certificate = m - 1
    elif structure == "hub":
        d = hub_degree(params)
        if d > params.n - 1:
            raise ValueError(f"hub degree {d} exceeds n-1={params.n - 1}")
        h = plant_hub(g, 0, d, seed)
        certificate = math.sqrt(max(h.degrees))
    else:
        raise ValueError(f"unknown structure {structure!r}")
    return certificate >= target - LAMBDA_SLACK


@dataclass
class MeanEstimate:
    mean: float
    stderr: float
    samples: int


def _hom_chunk(args) -> list[int]:
    n, p, t, seed, idx = args
    return [hom_cycle(sample_er(n, p, replicate_seed(seed, i)), t) for i in idx]


def empirical_expected_hom(n: int, p: float, t: int, samples: int, seed: int, workers: int | None = None) -> MeanEstimate:
    if samples < 2:
        raise ValueError("samples must be >= 2")
    workers = default_workers() if workers is None else workers
    vals = _map_replicates(_hom_chunk, n, p, t, seed, list(range(samples)), workers)
    x = np.asarray(vals, dtype=float)
    return MeanEstimate(float(x.mean()), float(x.std(ddof=1) / math.sqrt(samples)), samples)


def tilted_probs(n: int, p: float, tau: float) -> np.ndarray:
    iu, _ = np.triu_indices(n, k=1)
    q = p + tau * n * p**2
    if q > 1:
        raise ValueError("tilted probability exceeds 1")
    probs = np.full(len(iu), p)
    probs[iu == 0] = q
    return probs


def tilted_sample(n: int, p: float, tau: float, seed) -> tuple[Graph, float]:
    """Draw with row 0 at p + τnp²; return the graph and log dP_p/dP_tilt."""
    probs = tilted_probs(n, p, tau)
    g, mask = sample_inhomogeneous(n, probs, seed)
    row = probs != p
    q = p + tau * n * p**2
    k = int(mask[row].sum())
    m = int(row.sum())
    if tau == 0:
        return g, 0.0
    log_lr = k * math.log(p / q) + (m - k) * math.log((1 - p) / (1 - q))
    return g, log_lr


@dataclass
class WeightedEstimate:
    estimate: float
    stderr: float
    samples: int
    mean_weight: float


def importance_tail(n: int, p: float, tau: float, event: Event | None, samples: int, seed: int) -> WeightedEstimate:
    """Likelihood-ratio weighted estimate of P_p(event) under the hub tilt.

    ``event=None`` estimates the constant 1 (weights average to one).
    """
    w = np.empty(samples)
    hit = np.empty(samples)
    for i in range(samples):
        g, llr = tilted_sample(n, p, tau, replicate_seed(seed, i))
        w[i] = math.exp(llr)
        hit[i] = 1.0 if event is None or event.holds(g) else 0.0
    y = w * hit
    return WeightedEstimate(float(y.mean()), float(y.std(ddof=1) / math.sqrt(samples)), samples, float(w.mean()))
