import math
import random
from fractions import Fraction as F

import pytest

from anticonc.bounds import (
    clt_window,
    crude_bound,
    epsilon_prime,
    kesten_bound,
    main_bound,
    main_bound_rhs,
    make_main_bound_params,
    minimal_delta_prime,
    theorem_local_conditions,
    window_interval,
)
from anticonc.errors import DomainError
from anticonc.lattice import (
    extremal_variance,
    t_value,
    third_abs_moment,
    variance_profile,
)


class TestEpsilonPrime:
    def test_formula(self):
        assert math.isclose(
            epsilon_prime(0.04, F(1, 4)), 405 * 0.2 * 4 ** 0.75
        )

    def test_shrinks_like_sqrt_delta(self):
        a = epsilon_prime(0.01, F(1, 4))
        b = epsilon_prime(0.0025, F(1, 4))
        assert math.isclose(a / b, 2.0)

    def test_minimal_delta_is_exact_lower_bound(self):
        alphas = [F(1, 2)] * 50 + [F(1, 3)] * 30
        d = minimal_delta_prime(alphas)
        third = sum(third_abs_moment(a) for a in alphas)
        v = variance_profile(alphas).total
        assert third * third <= F(d) ** 2 * v ** 3
        below = math.nextafter(d, 0.0)
        assert not third * third <= F(below) ** 2 * v ** 3


class TestCltWindow:
    def test_zero_variance_reports_failure(self):
        report = clt_window([F(1)], F(1, 4), 0.5)
        assert report.value is None
        assert report.first_failure().name == "V* > 0"

    def test_small_coin_case(self):
        alphas = [F(1, 2)] * 30
        report = clt_window(alphas, F(1, 4), minimal_delta_prime(alphas))
        names = [c.name for c in report.conditions]
        assert "V*_ceil(n(1-c)) >= V*/2" in names
        # head-variance and third-moment conditions hold for iid coins
        by_name = {c.name: c.holds for c in report.conditions}
        assert by_name["V*_ceil(n(1-c)) >= V*/2"]
        assert by_name["sum E|Y|^3 <= delta' V*^(3/2)"]
        # the window always contains the exact value
        assert report.extras["t_in_window"]
        assert report.exact_t == t_value(alphas)

    def test_window_interval_centering(self):
        lo, hi = window_interval(0.5, F(100))
        center = 1 / math.sqrt(200 * math.pi)
        assert math.isclose(lo, 0.5 * center) and math.isclose(hi, 1.5 * center)

    def test_input_validation(self):
        with pytest.raises(DomainError):
            clt_window([F(1, 2)], F(0), 0.5)
        with pytest.raises(DomainError):
            clt_window([F(1, 2)], F(1, 4), 1.5)
        with pytest.raises(DomainError):
            clt_window([F(1, 2), F(3, 2)], F(1, 4), 0.5)


class TestCrudeBound:
    def test_value_half(self):
        v = crude_bound(F(1, 2), 100)
        assert math.isclose(v, 0.0797884560, rel_tol=1e-8)
        # at alpha = 1/2 the envelope is tight
        assert math.isclose(v, 1 / math.sqrt(2 * math.pi * 100 * 0.25))

    def test_monotone_to_zero(self):
        values = [crude_bound(F(1, k), 100) for k in range(2, 30)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_dominates_normal_term(self):
        for abar, n in [(F(1, 3), 300), (F(2, 5), 64), (F(9, 10), 50)]:
            v = float(extremal_variance(abar))
            assert 1 / math.sqrt(2 * math.pi * n * v) <= crude_bound(abar, n) + 1e-15

    def test_guards(self):
        with pytest.raises(DomainError):
            crude_bound(F(1), 10)
        with pytest.raises(DomainError):
            crude_bound(F(1, 2), 0)


class TestMainBound:
    def test_condition_15_failure_named(self):
        # a large constant C at tiny n forces m >= c n / 5
        params = make_main_bound_params([F(1, 2)] * 8, 2, 5.0, F(1, 4))
        report = main_bound(params)
        failing = {c.name for c in report.conditions if not c.holds}
        assert "m < c n / 5" in failing
        assert report.value is None

    def test_gamma_condition_failure_named(self):
        params = make_main_bound_params(
            [F(1, 2)] * 64, 2, 1.0, F(1, 4), gamma=1.0
        )
        report = main_bound(params)
        failing = {c.name for c in report.conditions if not c.holds}
        assert "gamma <= (10C)^-2" in failing

    def test_large_iid_case_reports_conditions(self):
        # the head-variance and near-one conditions hold at any size; the
        # Berry-Esseen smallness cannot (epsilon' scales like n^(-1/4) and
        # would need n beyond 10^15), and the report must say so while the
        # plug-in value stays available
        params = make_main_bound_params([F(1, 2)] * 2048, 2, 1.0, F(1, 4))
        report = main_bound(params)
        by_name = {c.name: c.holds for c in report.conditions}
        assert by_name["n >= 8"]
        assert by_name["V*_ceil((1-c)n) >= (3/4) V*"]
        assert by_name["sum E|Y|^3 <= delta' V*^(3/2)"]
        assert by_name["xi(abar) abar^2 n <= gamma V*^(3/2)"]
        assert not by_name["epsilon' <= 3/16"]
        rhs = report.extras["rhs_unconditional"]
        assert rhs is not None and rhs >= report.extras["t"]

    def test_rhs_formula(self):
        params = make_main_bound_params([F(1, 2)] * 100, 2, 1.0, F(1, 4))
        v_trim = variance_profile([F(1, 2)] * (100 - math.floor(params.m))).total
        by_hand = (
            1
            + 6 * params.epsilon_prime
            + 4 * params.m / 100
            + params.C * math.sqrt(params.gamma)
        ) / math.sqrt(2 * math.pi * float(v_trim)) + math.exp(
            -params.m ** 2 / 900
        )
        assert math.isclose(main_bound_rhs(params), by_hand, rel_tol=1e-12)

    def test_xi_rule(self):
        p2 = make_main_bound_params([F(1, 3)] * 20, 2, 1.0, F(1, 4))
        p3 = make_main_bound_params([F(1, 3)] * 20, 3, 1.0, F(1, 4))
        assert p2.xi == F(1, 3) and p3.xi == F(1)

    def test_sorted_descending(self):
        params = make_main_bound_params([F(1, 3), F(1, 2), F(1, 5)], 2, 1.0, F(1, 4))
        assert params.alphas == (F(1, 2), F(1, 3), F(1, 5))

    def test_rhs_monotone_in_n(self):
        # artifact-level sanity: the plug-in value shrinks as n grows
        values = [
            main_bound_rhs(make_main_bound_params([F(1, 2)] * n, 2, 1.0, F(1, 4)))
            for n in (64, 128, 256, 512)
        ]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestKesten:
    def test_ratio_at_half(self):
        for n in (100, 10_000):
            sharp = 1 / math.sqrt(math.pi * 0.5 * n)
            assert kesten_bound([F(1, 2)], n, 1.0) / sharp >= 5

    def test_small_alpha_ratio_bounded(self):
        # both bounds scale like alpha/sqrt(n); their ratio is exactly
        # 4 sqrt(2) (1 + 9C) sqrt(1 + abar) / sqrt(6/pi), which stays in
        # [limit, limit * sqrt(2)] and tends to the limit as abar drops
        limit = 4 * math.sqrt(2) * 10 / math.sqrt(6 / math.pi)
        for k in (10, 100, 1000):
            ratio = kesten_bound([F(1, k)], 100, 1.0) / crude_bound(F(1, k), 100)
            assert limit - 1e-9 <= ratio <= limit * math.sqrt(1 + 1 / k) + 1e-9

    def test_sqrt_n_scaling(self):
        a = kesten_bound([F(1, 2)], 100, 1.0)
        b = kesten_bound([F(1, 2)], 400, 1.0)
        assert math.isclose(a / b, 2.0)

    def test_guard(self):
        with pytest.raises(DomainError):
            kesten_bound([F(1)], 100, 1.0)


class TestTheoremLocalConditions:
    def test_iid_regime_small_ratios(self):
        reports = {r.name: r.value for r in theorem_local_conditions([F(1, 2)] * 10_000, 2, 3.0)}
        assert reports["xi(abar)^2 V* / n^2"] < 0.05
        assert reports["V* / exp(C^2 sqrt(n) / 36)"] < 0.05
        assert reports["sum E|Y|^3 / V*^(3/2)"] < 0.05
        assert reports["xi(abar) abar^2 n / V*^(3/2)"] < 0.05
        assert reports["V*_ceil(n(1-1/10))/V*"] == pytest.approx(0.9)

    def test_degenerate_alpha_one(self):
        reports = theorem_local_conditions([F(1)] * 50, 2, 1.0)
        assert len(reports) == 1 and math.isinf(reports[0].value)

    def test_mixed_parity_window(self):
        # mixture of coin and three-point factors at a checkable size: the
        # exact t-value stays within the normal window
        alphas = [F(1, 2)] * 30 + [F(1, 3)] * 30
        v = variance_profile(alphas).total
        t = t_value(alphas)
        assert abs(float(t) * math.sqrt(2 * math.pi * float(v)) - 1) <= 0.05


class TestRemarkChain:
    def test_exact_inequality_chain(self):
        # 1/sqrt(2 pi V*) <= 1/sqrt(2 pi n V(abar)) <= crude, exactly
        rng = random.Random(0)
        for abar_num in range(1, 10):
            abar = F(abar_num, 10)
            for _ in range(20):
                n = rng.randint(2, 12) * 2
                eta = F(rng.randint(0, 5), 100)
                if not (0 < abar - eta and abar + eta < 1):
                    eta = F(0)
                alphas = [abar - eta, abar + eta] * (n // 2)
                v_total = variance_profile(alphas).total
                v_mean = extremal_variance(abar)
                assert sum(alphas, F(0)) / n == abar
                assert v_total >= n * v_mean  # Jensen for the convex envelope
                assert 1 - abar * abar <= 12 * abar * abar * v_mean
