"""Acceptance criteria for the package, one test per criterion.

Each test prints a single pass/fail line (visible under ``pytest -s``) and
enforces both the stated tolerance (exact equality where exactness is
claimed) and the stated runtime budget. Expected values are produced by
independent oracles inside this module (binomials, integer polynomial
dynamic programming, brute enumeration), never by the code path under test.
"""

import math
import random
import time
from fractions import Fraction as F

from anticonc.bounds import epsilon_prime, kesten_bound, minimal_delta_prime
from anticonc.chains import Block, btk_decompose, middle_layer_count
from anticonc.geometry import (
    PointConfig,
    distance_graph,
    l1,
    l2,
    linf,
    near_line_fit,
    supporting_functional,
)
from anticonc.lattice import (
    concentration_1d,
    extremal_measure,
    extremal_variance,
    t_value,
    t_value_auto,
    variance_profile,
)
from anticonc.perfect_graphs import (
    block_decomposition,
    chromatic_number,
    is_berge,
    max_clique,
)
from anticonc.scenarios import (
    run_octagon_scenario,
    run_sharpness_scenario,
    run_verify_theorem22,
)


def _report(num: int, description: str, passed: bool, elapsed: float, limit: float):
    status = "PASS" if passed and elapsed < limit else "FAIL"
    print(
        f"[{status}] criterion {num:>2}: {description} "
        f"({elapsed:.2f}s, limit {limit:g}s)"
    )
    assert passed, f"criterion {num} failed: {description}"
    assert elapsed < limit, f"criterion {num} exceeded its {limit}s budget"


# --- independent oracles ------------------------------------------------------


def oracle_t_uniform(ks):
    """Exact t-value for centered uniform factors on k_i points each.

    Integer polynomial dynamic programming on the half-integer lattice,
    independent of the library's convolution code.
    """
    coeffs = [1]
    offset = 0
    denom = 1
    for k in ks:
        new = [0] * (len(coeffs) + 2 * (k - 1))
        for i, c in enumerate(coeffs):
            if c:
                for j in range(k):
                    new[i + 2 * j] += c
        coeffs = new
        offset -= k - 1
        denom *= k
    total = 0
    for idx in (-offset, 1 - offset):
        if 0 <= idx < len(coeffs):
            total += coeffs[idx]
    return F(total, denom)


def strip_bound(norm, scale: F, den: int) -> int:
    """Largest b with the strip |y| <= b/den inside scale * near-line radius."""
    if norm.is_hilbert:
        return math.isqrt(math.floor(scale * scale * F(3, 16) * den * den))
    return math.floor(scale * F(1, 8) * den)


# --- criteria -----------------------------------------------------------------


def test_criterion_01_octagon():
    t0 = time.perf_counter()
    result = run_octagon_scenario()
    d = result.details
    passed = (
        result.passed
        and d["q_single"] == F(3, 8)
        and d["q_sum"] == F(3, 8)
        and d["t_value"] < F(3, 8)
    )
    _report(
        1,
        "octagon: Q(X1)=Q(X1+X2)=3/8 exactly, t(3/8,3/8) strictly below",
        passed,
        time.perf_counter() - t0,
        1.0,
    )


def test_criterion_02_extremal_calibration():
    t0 = time.perf_counter()
    passed = True
    for i in range(1, 51):
        alpha = F(i, 50)
        m = extremal_measure(alpha)
        if concentration_1d(m) != alpha or m.moment(2) != extremal_variance(alpha):
            passed = False
            break
    _report(
        2,
        "extremal calibration on 50 rational alphas (exact)",
        passed,
        time.perf_counter() - t0,
        1.0,
    )


def test_criterion_03_t_value_law():
    t0 = time.perf_counter()
    passed = all(
        t_value([F(1, 2)] * n) == F(math.comb(n, (n + 1) // 2), 2 ** n)
        for n in range(1, 31)
    )
    rng = random.Random(2030)
    trials = 0
    while trials < 100:
        ks = [rng.randint(1, 8) for _ in range(rng.randint(1, 8))]
        if math.prod(ks) > 10_000:
            continue
        trials += 1
        lhs = F(middle_layer_count(ks), math.prod(ks))
        if lhs != t_value([F(1, k) for k in ks]):
            passed = False
            break
    _report(
        3,
        "t-value laws: central binomials to n=30 and 100 middle-layer ratios",
        passed,
        time.perf_counter() - t0,
        10.0,
    )


def test_criterion_04_berge_certification():
    t0 = time.perf_counter()
    rng = random.Random(40_40)
    norms = [l2(2), l1(2), linf(2)]
    den = 32
    passed = True
    for idx in range(1000):
        norm = norms[idx % 3]
        bound = strip_bound(norm, F(9, 10), den)
        n = rng.randint(4, 14)
        pts = tuple(
            (F(rng.randint(0, 6 * den), den), F(rng.randint(-bound, bound), den))
            for _ in range(n)
        )
        g = distance_graph(PointConfig(norm, pts))
        berge, witness = is_berge(g)
        if not berge:
            passed = False
            break
        if int(max_clique(g)[0]) != chromatic_number(g).num_colors:
            passed = False
            break
        for _ in range(20):
            size = rng.randint(1, g.n)
            sub = g.induced(sorted(rng.sample(range(g.n), size)))
            if int(max_clique(sub)[0]) != chromatic_number(sub).num_colors:
                passed = False
                break
        if not passed:
            break
    _report(
        4,
        "Berge + omega=chi on 1000 strip configurations (3 norms, 20 subgraphs each)",
        passed,
        time.perf_counter() - t0,
        120.0,
    )


def test_criterion_05_sharpness():
    t0 = time.perf_counter()
    result = run_sharpness_scenario(F(1, 1000))
    passed = (
        result.passed
        and result.details["hole_found"]
        and len(result.details["hole"]) == 5
    )
    _report(
        5,
        "sharpness: perturbed five-point set yields an induced C5",
        passed,
        time.perf_counter() - t0,
        1.0,
    )


def test_criterion_06_block_decomposition():
    t0 = time.perf_counter()
    rng = random.Random(606)
    passed = True
    for _ in range(200):
        den = 16
        size = rng.randint(5, 60)
        pts = []
        for _ in range(size):
            if pts and rng.random() < 0.15:
                pts.append(pts[rng.randrange(len(pts))])  # deliberate duplicate
            else:
                pts.append(
                    (F(rng.randint(0, 8 * den), den), F(rng.randint(-6, 6), den))
                )
        cfg = PointConfig(l2(2), tuple(pts))
        fit = near_line_fit(cfg, early_stop=True)
        if not fit.certified:
            passed = False
            break
        g = distance_graph(cfg)
        omega = int(max_clique(g)[0])
        alpha = F(omega, size)  # exact concentration of the uniform multiset
        blocks = block_decomposition(cfg, fit.frame, alpha=alpha)
        if len(blocks) != omega or len(blocks) > math.floor(alpha * size):
            passed = False
            break
        if sum(len(b.points) for b in blocks) != size:
            passed = False
            break
        # separations are re-verified exactly by Block construction; spot
        # check the largest block against the raw distance comparisons
        from anticonc.geometry import dist_vs_one

        big = max(blocks, key=len)
        for i in range(len(big.points)):
            for j in range(i + 1, len(big.points)):
                if dist_vs_one(cfg.norm, big.points[i], big.points[j]) < 0:
                    passed = False
                    break
    _report(
        6,
        "block decomposition: K = omega <= floor(alpha |S|) on 200 multisets",
        passed,
        time.perf_counter() - t0,
        60.0,
    )


def test_criterion_07_btk_laws():
    t0 = time.perf_counter()
    frame = supporting_functional(l2(2), (F(1), F(0)))
    rng = random.Random(707)

    def random_block():
        size = rng.randint(1, 6)
        xs = [F(0)]
        for _ in range(size - 1):
            xs.append(xs[-1] + 1 + F(rng.randint(0, 8), 8))
        return Block.from_points(
            [(x, F(rng.randint(-5, 5), 16)) for x in xs], frame
        )

    passed = True
    for _ in range(200):
        a, b = random_block(), random_block()
        decomp = btk_decompose(a, b)
        m, n = max(len(a), len(b)), min(len(a), len(b))
        if sorted(decomp.sizes) != list(range(m - n + 1, m + n, 2)):
            passed = False
            break
        for chain in decomp.chains:
            for i in range(len(chain.points)):
                for j in range(i + 1, len(chain.points)):
                    from anticonc.geometry import dist_vs_one

                    if dist_vs_one(frame.norm, chain.points[i], chain.points[j]) < 0:
                        passed = False
                    if not frame.raw_gap_at_least(
                        chain.f_raw[j] - chain.f_raw[i], F(1, 2)
                    ):
                        passed = False
        if not passed:
            break
    _report(
        7,
        "B.T.K. laws: chain sizes and separations exact on 200 block pairs",
        passed,
        time.perf_counter() - t0,
        10.0,
    )


def test_criterion_08_theorem22_verification():
    t0 = time.perf_counter()
    result = run_verify_theorem22({"count": 500, "extremal_cases": 25}, seed=808)
    passed = (
        result.passed
        and result.details["failures"] == []
        and result.details["skipped"] == 0
        and result.details["equality_cases_ok"]
    )
    _report(
        8,
        "near-line sums: exact Q(sum) <= t on 500 instances, equality on extremals",
        passed,
        time.perf_counter() - t0,
        300.0,
    )


def test_criterion_09_normal_window():
    t0 = time.perf_counter()
    cases = [
        ("[1/2]x400", [F(1, 2)] * 400, [2] * 400),
        ("[1/3]x300", [F(1, 3)] * 300, [3] * 300),
        ("mixed", [F(1, 2)] * 200 + [F(1, 3)] * 200, [2] * 200 + [3] * 200),
    ]
    c = F(1, 4)
    passed = True
    for name, alphas, ks in cases:
        v = variance_profile(alphas).total
        t_exact = oracle_t_uniform(ks)
        eps = epsilon_prime(minimal_delta_prime(alphas), c)
        center = 1 / math.sqrt(2 * math.pi * float(v))
        lo, hi = (1 - eps) * center, (1 + eps) * center
        if not (lo <= float(t_exact) <= hi):
            passed = False
            break
        if abs(float(t_exact) * math.sqrt(2 * math.pi * float(v)) - 1) > 0.05:
            passed = False
            break
        auto = t_value_auto(alphas)
        if auto.exact:  # these all exceed the 64-factor exact cap
            passed = False
            break
        if abs(auto.value - float(t_exact)) > 1e-9 * float(t_exact):
            passed = False
            break
    _report(
        9,
        "normal window at n=300..400: exact t inside, |t sqrt(2 pi V*) - 1| <= 0.05",
        passed,
        time.perf_counter() - t0,
        30.0,
    )


def test_criterion_10_crude_chain():
    t0 = time.perf_counter()
    rng = random.Random(1010)
    passed = True
    for abar_num in range(1, 10):
        abar = F(abar_num, 10)
        for _ in range(20):
            half = rng.randint(1, 10)
            eta_den = 100
            eta = F(rng.randint(0, min(abar_num, 10 - abar_num) * 9), eta_den * 10)
            alphas = [abar - eta, abar + eta] * half
            if not all(0 < a < 1 for a in alphas):
                alphas = [abar] * (2 * half)
            n = len(alphas)
            v_total = variance_profile(alphas).total
            v_mean = extremal_variance(abar)
            if sum(alphas, F(0)) != n * abar:
                passed = False
            if v_total < n * v_mean:
                passed = False
            if 1 - abar * abar > 12 * abar * abar * v_mean:
                passed = False
            if not passed:
                break
        if not passed:
            break
    _report(
        10,
        "crude chain: 1/sqrt(2piV*) <= 1/sqrt(2pinV(abar)) <= crude, exactly",
        passed,
        time.perf_counter() - t0,
        5.0,
    )


def test_criterion_11_kesten_comparison():
    t0 = time.perf_counter()
    passed = True
    for n in (100, 10_000):
        sharp = 1 / math.sqrt(math.pi * (1 - 0.5) * n)
        if kesten_bound([F(1, 2)], n, 1.0) / sharp < 5:
            passed = False
    _report(
        11,
        "Kesten comparison: ratio to the sharp term at least 5",
        passed,
        time.perf_counter() - t0,
        1.0,
    )
