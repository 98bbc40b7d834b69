import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from erld.graph import RegimeParams
from erld.rates import (
    binary_entropy, binomial_tail_bounds, chernoff_bound, clique_cost, clique_profile, clique_size,
    hom_clique_cost, hom_crossover_alpha, hom_hub_cost, hub_cost, hub_cost_exact, hub_degree, lambda_p,
    mean_field_cost, phi_t, phi_t_value, rate_hom, rate_intermediate, rate_report, rate_sparse,
    structure_dichotomy, tilted_hub_profile,
)
from erld.verify import exact_tail, sandwich_grid


def mp_entropy(s, lam):
    mp.dps = 40
    s, lam = mpf(s), mpf(lam)
    return float(lam * mp.log(lam / s) + (1 - lam) * mp.log((1 - lam) / (1 - s)))


class TestEntropy:
    def test_zero_at_mean(self):
        assert binary_entropy(0.3, 0.3) == 0.0

    def test_value(self):
        # high-precision oracle; 0.3 log 3 + 0.7 log(7/9)
        assert binary_entropy(0.1, 0.3) == pytest.approx(mp_entropy("0.1", "0.3"), rel=1e-14)
        assert binary_entropy(0.1, 0.3) == pytest.approx(0.15366358680379852, rel=1e-12)

    def test_large_lambda_asymptotics(self):
        # I_s(λ) = λ log(λ/s) (1 + O(1/log(λ/s))): the correction is about -λ
        lam = 1e-2
        errs = []
        for s in (1e-6, 1e-12, 1e-30, 1e-100):
            lead = lam * math.log(lam / s)
            err = abs(binary_entropy(s, lam) / lead - 1)
            assert err <= 1.05 / math.log(lam / s)
            errs.append(err)
        assert errs == sorted(errs, reverse=True) and errs[-1] < 0.01

    def test_endpoints(self):
        assert binary_entropy(0.2, 0.0) == pytest.approx(math.log(1 / 0.8))
        assert binary_entropy(0.2, 1.0) == pytest.approx(math.log(5))

    def test_vectorised(self):
        v = binary_entropy(0.2, np.array([0.2, 0.5]))
        assert v.shape == (2,) and v[0] == 0

    @pytest.mark.parametrize("s,lam", [(0, 0.5), (1, 0.5), (0.5, 1.2), (0.5, -0.1)])
    def test_errors(self, s, lam):
        with pytest.raises(ValueError):
            binary_entropy(s, lam)

    @given(st.floats(0.01, 0.99), st.floats(0, 1))
    def test_nonnegative(self, s, lam):
        assert binary_entropy(s, lam) >= -1e-15


class TestTails:
    def test_examples(self):
        lo, up = binomial_tail_bounds(10, 0.3, 0.5)
        ex = float(exact_tail(10, 0.3, 5))
        assert ex == pytest.approx(0.1502683326, rel=1e-9)
        assert lo <= ex <= up
        lo, up = binomial_tail_bounds(100, 0.1, 0.3)
        assert lo <= float(exact_tail(100, 0.1, 30)) <= up
        lo, up = binomial_tail_bounds(50, 0.2, 0.21)
        assert lo <= float(exact_tail(50, 0.2, 11)) <= up

    def test_lower_bound_needs_integer_lambda_n(self):
        # at λN = 7.5 the tail is P(X >= 8), which falls below the lower bound
        lo, _ = binomial_tail_bounds(10, 0.05, 0.75)
        assert float(exact_tail(10, 0.05, 8)) < lo

    def test_grid(self):
        for N, s, k in sandwich_grid():
            ex = float(exact_tail(N, s, k))
            lo, up = binomial_tail_bounds(N, s, k / N)
            assert lo <= ex * (1 + 1e-12) and ex <= up * (1 + 1e-12), (N, s, k)
            assert ex <= chernoff_bound(N, s, k / (N * s) - 1) * (1 + 1e-12)

    def test_bounds_errors(self):
        with pytest.raises(ValueError):
            binomial_tail_bounds(10, 0.3, 0.3)
        with pytest.raises(ValueError):
            binomial_tail_bounds(10, 0.3, 1.0)

    def test_chernoff_examples(self):
        assert chernoff_bound(100, 0.1, 1.0) == pytest.approx(math.exp(-10 / 3))
        assert chernoff_bound(100, 0.1, 1.0) >= float(exact_tail(100, 0.1, 20))
        assert chernoff_bound(1000, 0.01, 0.5) >= float(exact_tail(1000, 0.01, 15))
        assert chernoff_bound(100, 0.1, 1e-9) == pytest.approx(1.0)

    def test_chernoff_errors(self):
        with pytest.raises(ValueError):
            chernoff_bound(10, 0.6, 1.0)
        with pytest.raises(ValueError):
            chernoff_bound(10, 0.1, 0.0)


class TestLambdaP:
    def test_example(self):
        assert lambda_p(10**6, 3e-6) == pytest.approx(13.8155 / (2.6257 - 1.0986), rel=1e-4)
        assert lambda_p(10**6, 3e-6) == pytest.approx(9.047, abs=1e-3)

    def test_np_one(self):
        n = 10**5
        assert lambda_p(n, 1 / n) == pytest.approx(math.log(n) / math.log(math.log(n)))

    def test_boundary(self):
        n = 10**6
        with pytest.raises(ValueError):
            lambda_p(n, math.log(n) / n)


class TestRateFormulas:
    def test_sparse(self):
        assert rate_sparse(0.5) == 2.25
        with pytest.raises(ValueError):
            rate_sparse(0)

    def test_intermediate(self):
        assert rate_intermediate(1.0, 0.75) == pytest.approx(4 / 3, rel=1e-12)
        assert rate_intermediate(1.0, 2 / 3) == pytest.approx(2.0, rel=1e-12)
        for bad in (0.5, 1.0, 0.3):
            with pytest.raises(ValueError):
                rate_intermediate(1.0, bad)

    def test_intermediate_branch_point(self):
        a = np.linspace(0.51, 0.99, 97)
        vals = np.array([rate_intermediate(0.5, x) for x in a])
        branch = np.array([(1 - x) / x < 0.5 for x in a])
        assert (a[branch] > 2 / 3).all() and (a[~branch] <= 2 / 3 + 1e-12).all()
        assert np.max(np.abs(np.diff(vals))) < 0.1  # continuous on the grid

    def test_hom(self):
        assert rate_hom(3, 1.0, 0.75) == pytest.approx(0.5 * 2 ** (2 / 3) / 3, rel=1e-12)
        assert rate_hom(3, 1.0, 0.75) == pytest.approx(0.264567, rel=1e-6)

    def test_hom_crossover(self):
        for t in range(3, 11):
            c = 2 ** (1 - 1 / t)
            a = hom_crossover_alpha(t)
            assert a == pytest.approx(c / (1 + c), rel=1e-12)
            assert c * (1 - a) / a == pytest.approx(1.0, rel=1e-12)
        assert all(hom_crossover_alpha(t) < hom_crossover_alpha(t + 1) for t in range(3, 10))

    def test_hom_errors(self):
        with pytest.raises(ValueError):
            rate_hom(2, 1.0, 0.75)
        with pytest.raises(ValueError):
            rate_hom(3, 0.0, 0.75)
        with pytest.raises(ValueError):
            rate_hom(3, 1.0, 1.0)

    @pytest.mark.parametrize("alpha", [0.55, 0.66, 0.7, 0.9])
    def test_hom_large_t_limit(self, alpha):
        delta, t = 0.5, 64
        dh = (1 + delta) ** (2 * t) - 1
        assert rate_hom(t, dh, alpha) == pytest.approx(rate_intermediate(delta, alpha), rel=0.02)

    def test_phi(self):
        prm = RegimeParams(10**6, 1e-4, t=3, delta_hat=1.0)
        expected = min(0.5 * math.log(1e4), 0.5 ** (1 / 3) * math.log(100)) * 1e4
        assert phi_t(prm) == pytest.approx(expected, rel=1e-12)
        assert phi_t(prm) == pytest.approx(36551.26, rel=1e-7)
        assert phi_t_value(10**6, 1e-4, 3, 0.0) == 0.0

    def test_phi_branch_agreement(self):
        from scipy.optimize import brentq

        n, t, dh = 10**6, 3, 1.0

        def gap(lp):
            p = math.exp(lp)
            return 0.5 * dh ** (1 / t) * math.log(1 / p) - (dh / 2) ** (1 / t) * math.log(n * p)

        p = math.exp(brentq(gap, math.log(2e-6), math.log(0.5)))
        a = 0.5 * dh ** (1 / t) * math.log(1 / p) * (n * p) ** 2
        assert phi_t_value(n, p, t, dh) == pytest.approx(a, rel=1e-9)


class TestPlantingCosts:
    def test_tie_at_crossover(self):
        prm = RegimeParams(1000, 0.01, delta=0.5)
        assert clique_size(prm) == 15 and hub_degree(prm) == 225
        assert clique_cost(prm) == pytest.approx(0.5 * 225 * math.log(100), rel=1e-12)
        assert hub_cost(prm) == pytest.approx(2.25 * 100 * math.log(10), rel=1e-12)
        assert clique_cost(prm) == pytest.approx(hub_cost(prm), rel=1e-9)
        assert clique_cost(prm) == pytest.approx(518.084, abs=1e-2)
        assert structure_dichotomy(prm) == "tie"

    def test_sides(self):
        assert clique_cost(RegimeParams(1000, 0.05)) < hub_cost(RegimeParams(1000, 0.05))
        assert hub_cost(RegimeParams(1000, 0.002)) < clique_cost(RegimeParams(1000, 0.002))

    def test_dichotomy_exponents(self):
        n = 10**6
        assert structure_dichotomy(RegimeParams(n, n**0.25 / n)) == "hub"
        assert structure_dichotomy(RegimeParams(n, n**0.4 / n)) == "clique"
        assert structure_dichotomy(RegimeParams(n, n**0.45 / n)) == "clique"

    def test_single_sign_change(self):
        ps = np.geomspace(0.002, 0.05, 50)
        d = [clique_cost(RegimeParams(1000, float(p))) - hub_cost(RegimeParams(1000, float(p))) for p in ps]
        flips = [i for i in range(49) if np.sign(d[i]) != np.sign(d[i + 1])]
        assert len(flips) == 1
        i = flips[0]
        assert ps[i] <= 0.0110 and ps[i + 1] >= 0.0103
        step = math.log(ps[1] / ps[0])
        assert min(abs(math.log(ps[i] / 0.01)), abs(math.log(ps[i + 1] / 0.01))) <= step

    def test_clique_overflow(self):
        with pytest.raises(ValueError):
            clique_cost(RegimeParams(10, 0.9))

    def test_hub_exact(self):
        prm = RegimeParams(10**4, 1e-3)
        assert hub_cost_exact(prm) == pytest.approx((10**4 - 1) * binary_entropy(1e-3, 225 / (10**4 - 1)))
        with pytest.raises(ValueError):
            hub_cost_exact(RegimeParams(200, 0.05))

    def test_hom_costs(self):
        prm = RegimeParams(1000, 0.01, t=3, delta_hat=1.0)
        assert hom_clique_cost(prm) == pytest.approx(0.5 * 10**2 * math.log(100))
        assert hom_hub_cost(prm) == pytest.approx(0.5 ** (1 / 3) * 100 * math.log(10))


class TestMeanField:
    def test_zero_iff_p(self):
        assert mean_field_cost(np.full(20, 0.1), 0.1) == 0.0
        xi = np.full(20, 0.1)
        xi[3] = 0.1 + 1e-4
        assert mean_field_cost(xi, 0.1) > 1e-12

    def test_clique_profile(self):
        n, m, p = 30, 6, 0.05
        assert mean_field_cost(clique_profile(n, m, p), p) == pytest.approx(math.comb(m, 2) * math.log(1 / p))

    def test_tilted_hub(self):
        n, p, tau = 400, 0.01, 2.25
        xi = tilted_hub_profile(n, p, tau)
        assert mean_field_cost(xi, p) == pytest.approx((n - 1) * binary_entropy(p, p + tau * n * p**2))
        with pytest.raises(ValueError):
            tilted_hub_profile(10, 0.5, 10)

    def test_range(self):
        with pytest.raises(ValueError):
            mean_field_cost([0.5, 1.5], 0.5)


class TestRateReport:
    @pytest.mark.parametrize("regime", ["sparse", "intermediate", "hom"])
    def test_invariants(self, regime):
        for p in (0.002, 0.01, 0.03):
            r = rate_report(RegimeParams(1000, p, t=3), regime)
            assert r.raw_log_cost == pytest.approx(r.rate * r.speed, rel=1e-12)
            if r.dominant_structure == "clique":
                assert r.clique_cost < r.hub_cost
            elif r.dominant_structure == "hub":
                assert r.hub_cost < r.clique_cost

    def test_intermediate_matches_alpha_form(self):
        prm = RegimeParams(1000, 0.005, delta=1.0)
        r = rate_report(prm)
        assert r.rate == pytest.approx(rate_intermediate(1.0, prm.alpha), rel=1e-12)
        assert r.speed == pytest.approx(25 * math.log(200))

    def test_tie_at_two_thirds(self):
        assert rate_report(RegimeParams(1000, 0.01)).dominant_structure == "tie"

    def test_unknown(self):
        with pytest.raises(ValueError):
            rate_report(RegimeParams(1000, 0.01), "dense")
