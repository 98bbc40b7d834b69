"""Closed-form rate functions, binomial tail bounds and planting costs.

Natural logarithms throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import xlogy

from .graph import RegimeParams

TIE_RTOL = 1e-9
_CEIL_RTOL = 1e-12


def _ceil(x: float) -> int:
    # 1.5 * 1000 * 0.01 must ceil to 15, not 16
    r = round(x)
    if abs(x - r) <= _CEIL_RTOL * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def binary_entropy(s: float, lam):
    """I_s(λ) = λ log(λ/s) + (1-λ) log((1-λ)/(1-s)), with 0 log 0 = 0."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    lam = np.asarray(lam, dtype=float)
    if np.any((lam < 0) | (lam > 1)):
        raise ValueError("lam must lie in [0, 1]")
    out = xlogy(lam, lam / s) + xlogy(1 - lam, (1 - lam) / (1 - s))
    return float(out) if out.ndim == 0 else out


def binomial_tail_bounds(N: int, s: float, lam: float) -> tuple[float, float]:
    """Lower and upper bounds on P(Bin(N, s) >= λN) for s < λ < 1."""
    if not s < lam < 1:
        raise ValueError("requires s < lam < 1")
    upper = math.exp(-N * binary_entropy(s, lam))
    return upper / math.sqrt(8 * N * lam * (1 - lam)), upper


def chernoff_bound(N: int, s: float, gamma: float) -> float:
    """exp(-γ²/(2+γ) · Ns), a bound on P(Bin(N, s) >= (1+γ)Ns)."""
    if gamma <= 0 or (1 + gamma) * s > 1:
        raise ValueError("requires gamma > 0 and (1+gamma) s <= 1")
    return math.exp(-gamma**2 / (2 + gamma) * N * s)


def lambda_p(n: float, p: float) -> float:
    """log n / (log log n - log np); only positive in the very sparse regime."""
    den = math.log(math.log(n)) - math.log(n * p)
    if den <= 0:
        raise ValueError("log log n <= log(np): outside the formula's regime")
    return math.log(n) / den


def rate_sparse(delta: float) -> float:
    if delta <= 0:
        raise ValueError("delta must be positive")
    return (1 + delta) ** 2


def rate_intermediate(delta: float, alpha: float) -> float:
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not 0.5 < alpha < 1:
        raise ValueError("alpha must lie in (1/2, 1)")
    return min((1 - alpha) / alpha, 0.5) * (1 + delta) ** 2


def hom_crossover_alpha(t: int) -> float:
    """α at which the two branches of the cycle-count rate coincide."""
    c = 2 ** (1 - 1 / t)
    return c / (1 + c)


def rate_hom(t: int, delta_hat: float, alpha: float) -> float:
    if t < 3:
        raise ValueError("t must be at least 3")
    if delta_hat <= 0:
        raise ValueError("delta_hat must be positive")
    if not 0.5 < alpha < 1:
        raise ValueError("alpha must lie in (1/2, 1)")
    return 0.5 * delta_hat ** (1 / t) * min(2 ** (1 - 1 / t) * (1 - alpha) / alpha, 1.0)


def phi_t(params: RegimeParams) -> float:
    n, p, t, dh = params.n, params.p, params.t, params.delta_hat
    return min(0.5 * dh ** (1 / t) * math.log(1 / p), (dh / 2) ** (1 / t) * math.log(n * p)) * (n * p) ** 2


def phi_t_value(n: int, p: float, t: int, delta_hat: float) -> float:
    # δ̂ = 0 is allowed here, unlike in RegimeParams
    return min(0.5 * delta_hat ** (1 / t) * math.log(1 / p), (delta_hat / 2) ** (1 / t) * math.log(n * p)) * (n * p) ** 2


# --- planted structures ---------------------------------------------------------

def clique_size(params: RegimeParams) -> int:
    return _ceil((1 + params.delta) * params.np)


def hub_degree(params: RegimeParams) -> int:
    return _ceil((1 + params.delta) ** 2 * params.np**2)


def clique_cost(params: RegimeParams) -> float:
    """-log P(K_m ⊂ G) = C(m,2)-ish cost ½ m² log(1/p), m = ⌈(1+δ)np⌉."""
    m = clique_size(params)
    if m > params.n:
        raise ValueError(f"clique of size {m} does not fit in n={params.n}")
    return 0.5 * m**2 * math.log(1 / params.p)


def hub_cost(params: RegimeParams) -> float:
    """Leading-order cost (1+δ)² n²p² log(np) of a degree-(1+δ)²n²p² vertex."""
    return (1 + params.delta) ** 2 * params.np**2 * math.log(params.np)


def hub_cost_exact(params: RegimeParams) -> float:
    """(n-1) I_p(d/(n-1)) with d = (1+δ)² n²p², the exact entropy exponent."""
    frac = (1 + params.delta) ** 2 * params.np**2 / (params.n - 1)
    if frac > 1:
        raise ValueError("hub degree exceeds n - 1")
    return (params.n - 1) * binary_entropy(params.p, frac)


def hom_clique_cost(params: RegimeParams) -> float:
    m = _ceil(params.delta_hat ** (1 / (2 * params.t)) * params.np)
    if m > params.n:
        raise ValueError(f"clique of size {m} does not fit in n={params.n}")
    return 0.5 * m**2 * math.log(1 / params.p)


def hom_hub_cost(params: RegimeParams) -> float:
    return (params.delta_hat / 2) ** (1 / params.t) * params.np**2 * math.log(params.np)


def _dominant(clique: float, hub: float) -> str:
    if abs(clique - hub) <= TIE_RTOL * max(abs(clique), abs(hub)):
        return "tie"
    return "clique" if clique < hub else "hub"


def structure_dichotomy(params: RegimeParams) -> str:
    """The cheaper planted structure: 'clique', 'hub' or 'tie'."""
    return _dominant(clique_cost(params), hub_cost(params))


def mean_field_cost(xi, p: float) -> float:
    """Σ_i I_p(ξ_i) for a product-Bernoulli profile."""
    xi = np.asarray(xi, dtype=float)
    if np.any((xi < 0) | (xi > 1)):
        raise ValueError("profile entries must lie in [0, 1]")
    return float(np.sum(binary_entropy(p, xi)))


def clique_profile(n: int, m: int, p: float) -> np.ndarray:
    """ξ = 1 on pairs inside 0..m-1, p elsewhere (lexicographic pair order)."""
    iu, ju = np.triu_indices(n, k=1)
    xi = np.full(len(iu), p)
    xi[(iu < m) & (ju < m)] = 1.0
    return xi


def tilted_hub_profile(n: int, p: float, tau: float) -> np.ndarray:
    """ξ = p + τnp² on the pairs at vertex 0, p elsewhere."""
    iu, _ = np.triu_indices(n, k=1)
    xi = np.full(len(iu), p)
    xi[iu == 0] = p + tau * n * p**2
    if xi.max() > 1:
        raise ValueError("tilted probability exceeds 1")
    return xi


@dataclass
class RateReport:
    regime: str
    speed: float
    rate: float
    raw_log_cost: float
    dominant_structure: str
    n: int | None = None
    p: float | None = None
    alpha: float | None = None
    clique_cost: float | None = None
    hub_cost: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def rate_report(params: RegimeParams, regime: str = "intermediate") -> RateReport:
    """Finite-n evaluation of the spectral or cycle-count rate at ``params``.

    ``intermediate`` uses speed n²p² log(1/p) and rate min{½, log(np)/log(1/p)}(1+δ)²,
    i.e. the α-form with α read off from (n, p); ``sparse`` uses speed
    n²p² log(np) and rate (1+δ)²; ``hom`` the cycle-count analogue.
    """
    n, p, d = params.n, params.p, params.delta
    np2 = params.np**2
    ratio = math.log(params.np) / math.log(1 / p)  # = (1-α)/α
    if regime == "sparse":
        speed, rate = np2 * math.log(params.np), rate_sparse(d)
    elif regime == "intermediate":
        speed, rate = np2 * math.log(1 / p), min(ratio, 0.5) * (1 + d) ** 2
    elif regime == "hom":
        t, dh = params.t, params.delta_hat
        speed = np2 * math.log(1 / p)
        rate = 0.5 * dh ** (1 / t) * min(2 ** (1 - 1 / t) * ratio, 1.0)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if regime == "hom":
        cc, hc = hom_clique_cost(params), hom_hub_cost(params)
    else:
        cc, hc = clique_cost(params), hub_cost(params)
    return RateReport(regime, speed, rate, rate * speed, _dominant(cc, hc), n, p, params.alpha, cc, hc)
