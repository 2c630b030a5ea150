import itertools
import random
from fractions import Fraction as F

import pytest

from anticonc.caps import Caps
from anticonc.errors import DomainError, ResourceCapExceeded
from anticonc.geometry import PointConfig, VectorMeasure, l1, l2
from anticonc.perfect_graphs import (
    ColoringCertificate,
    DistGraph,
    block_decomposition,
    chromatic_number,
    find_odd_hole,
    is_berge,
    max_clique,
    to_uniform_multiset,
    verify_perfection_near_line,
)


def cycle_graph(n):
    return DistGraph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def octagon_circulant():
    edges = {(min(i, (i + s) % 8), max(i, (i + s) % 8)) for i in range(8) for s in (1, 2)}
    return DistGraph(8, frozenset(edges))


def random_graph(rng, n, p=0.5):
    edges = {
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
    }
    return DistGraph(n, frozenset(edges))


# --- brute-force oracles ------------------------------------------------------


def brute_max_clique_weight(g, weights):
    best = F(0)
    for size in range(1, g.n + 1):
        for subset in itertools.combinations(range(g.n), size):
            if all(g.has_edge(u, v) for u, v in itertools.combinations(subset, 2)):
                w = sum((weights[v] for v in subset), F(0))
                if w > best:
                    best = w
    return best


def brute_is_colorable(g, k):
    for assignment in itertools.product(range(k), repeat=g.n):
        if all(assignment[u] != assignment[v] for u, v in g.edges):
            return True
    return False


def brute_has_odd_hole(g):
    for size in range(5, g.n + 1, 2):
        for subset in itertools.combinations(range(g.n), size):
            sub = g.induced(subset)
            if all(sub.degree(v) == 2 for v in range(size)) and _connected(sub):
                return True
    return False


def _connected(g):
    if g.n == 0:
        return True
    seen = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for u in range(g.n):
            if u not in seen and g.has_edge(u, v):
                seen.add(u)
                frontier.append(u)
    return len(seen) == g.n


class TestDistGraph:
    def test_canonicalizes_edges(self):
        g = DistGraph(3, frozenset([(2, 0), (0, 2), (1, 2)]))
        assert g.edges == frozenset([(0, 2), (1, 2)])

    def test_rejects_self_loop(self):
        with pytest.raises(DomainError):
            DistGraph(3, frozenset([(1, 1)]))

    def test_complement_of_cycle(self):
        c5 = cycle_graph(5)
        assert c5.complement().edges == frozenset(
            [(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)]
        )

    def test_json_roundtrip(self):
        g = octagon_circulant()
        assert DistGraph.from_json(g.to_json()) == g


class TestMaxClique:
    def test_empty_graph_single_vertex(self):
        g = DistGraph(5, frozenset())
        value, witness = max_clique(g)
        assert value == 1 and len(witness) == 1

    def test_octagon_circulant_three(self):
        value, witness = max_clique(octagon_circulant())
        assert value == 3
        for u, v in itertools.combinations(witness, 2):
            assert octagon_circulant().has_edge(u, v)

    def test_weighted_triangle(self):
        g = DistGraph(3, frozenset([(0, 1), (0, 2), (1, 2)]))
        value, witness = max_clique(g, weights=[F(1, 2), F(1, 4), F(1, 4)])
        assert value == 1 and set(witness) == {0, 1, 2}

    def test_cap(self):
        g = DistGraph(6, frozenset())
        with pytest.raises(ResourceCapExceeded):
            max_clique(g, caps=Caps(clique=5))

    def test_against_brute_force(self):
        rng = random.Random(42)
        for _ in range(40):
            n = rng.randint(1, 9)
            g = random_graph(rng, n, rng.uniform(0.2, 0.8))
            weights = [F(rng.randint(1, 6), rng.randint(1, 4)) for _ in range(n)]
            total = sum(weights)
            weights = [w / total for w in weights]
            value, witness = max_clique(g, weights=weights)
            assert value == brute_max_clique_weight(g, weights)
            for u, v in itertools.combinations(witness, 2):
                assert g.has_edge(u, v)
            assert sum((weights[v] for v in witness), F(0)) == value

    def test_unweighted_against_brute_force(self):
        rng = random.Random(7)
        for _ in range(30):
            n = rng.randint(1, 10)
            g = random_graph(rng, n, 0.5)
            value, _ = max_clique(g)
            assert value == brute_max_clique_weight(g, [F(1)] * n)


class TestChromaticNumber:
    def test_empty_graph_one_color(self):
        cert = chromatic_number(DistGraph(4, frozenset()))
        assert cert.num_colors == 1 and cert.verify(DistGraph(4, frozenset()))

    def test_c5_needs_three(self):
        assert chromatic_number(cycle_graph(5)).num_colors == 3

    def test_octagon_circulant_four(self):
        # omega is 3 but the independence number is 2, so 4 colors are
        # needed; brute force over all 3-colorings confirms (the graph
        # contains the odd hole 0-1-3-5-6 and is not perfect)
        g = octagon_circulant()
        cert = chromatic_number(g)
        assert cert.num_colors == 4
        assert cert.verify(g)
        assert not brute_is_colorable(g, 3)
        assert find_odd_hole(g) is not None

    def test_optimal_against_brute_force(self):
        rng = random.Random(3)
        for _ in range(25):
            n = rng.randint(1, 7)
            g = random_graph(rng, n, 0.5)
            cert = chromatic_number(g)
            assert cert.verify(g)
            assert brute_is_colorable(g, cert.num_colors)
            if cert.num_colors > 1:
                assert not brute_is_colorable(g, cert.num_colors - 1)

    def test_deterministic(self):
        g = octagon_circulant()
        assert chromatic_number(g) == chromatic_number(g)


class TestOddHoles:
    def test_small_graphs_have_none(self):
        rng = random.Random(1)
        for _ in range(10):
            g = random_graph(rng, 4, 0.7)
            assert find_odd_hole(g) is None

    def test_c5_found(self):
        w = find_odd_hole(cycle_graph(5))
        assert w is not None and len(w.cycle) == 5
        assert w.verify(cycle_graph(5))

    def test_c7_found_and_shortest_preferred(self):
        # disjoint C7 and C5: the shortest odd hole has length 5
        edges = set(cycle_graph(7).edges)
        edges |= {(7 + i, 7 + (i + 1) % 5) for i in range(5)}
        edges = {(min(u, v), max(u, v)) for u, v in edges}
        g = DistGraph(12, frozenset(edges))
        w = find_odd_hole(g)
        assert w is not None and len(w.cycle) == 5

    def test_complement_search(self):
        w = find_odd_hole(cycle_graph(5), check_complement=True)
        assert w is not None and w.in_complement and w.verify(cycle_graph(5))

    def test_even_cycle_is_berge(self):
        ok, witness = is_berge(cycle_graph(6))
        assert ok and witness is None

    def test_against_brute_force(self):
        rng = random.Random(17)
        for _ in range(60):
            n = rng.randint(5, 9)
            g = random_graph(rng, n, rng.uniform(0.2, 0.8))
            found = find_odd_hole(g)
            assert (found is not None) == brute_has_odd_hole(g)
            if found is not None:
                assert found.verify(g)


class TestPerfectionNearLine:
    def test_l2_strip(self):
        rng = random.Random(5)
        pts = tuple(
            (F(rng.randint(0, 128), 32), F(rng.randint(-12, 12), 32))
            for _ in range(10)
        )
        report = verify_perfection_near_line(PointConfig(l2(2), pts), seed=1)
        assert report.near_line_certified and report.ok

    def test_l1_strip(self):
        rng = random.Random(6)
        pts = tuple(
            (F(rng.randint(0, 128), 32), F(rng.randint(-3, 3), 32))
            for _ in range(12)
        )
        report = verify_perfection_near_line(PointConfig(l1(2), pts), seed=2)
        assert report.near_line_certified and report.ok

    def test_collinear_interval_graph(self):
        pts = tuple((F(i, 3), F(0)) for i in range(9))
        report = verify_perfection_near_line(PointConfig(l2(2), pts), seed=3)
        assert report.ok and report.berge


class TestBlockDecomposition:
    def test_multiset_with_duplicate(self):
        from anticonc.geometry import near_line_fit

        cfg = PointConfig(l2(1), ((F(0),), (F(0),), (F(1),)))
        fit = near_line_fit(cfg)
        blocks = block_decomposition(cfg, fit.frame)
        sets = sorted(sorted(str(p[0]) for p in b.points) for b in blocks)
        assert sets == [["0"], ["0", "1"]]

    def test_triangle_with_center(self):
        # near-equilateral triangle with side > 1 and its centroid: the
        # decomposition separates the three-point block from the center
        from anticonc.geometry import near_line_fit, supporting_functional

        apex_y = F(953, 1000)
        pts = (
            (F(0), F(0)),
            (F(11, 10), F(0)),
            (F(11, 20), apex_y),
            (F(11, 20), apex_y / 3),
        )
        cfg = PointConfig(l2(2), pts)
        frame = supporting_functional(l2(2), (F(1), F(0)))
        blocks = block_decomposition(cfg, frame)
        sizes = sorted(len(b.points) for b in blocks)
        assert sizes == [1, 3]

    def test_singleton(self):
        from anticonc.geometry import supporting_functional

        cfg = PointConfig(l2(2), ((F(1), F(0)),))
        frame = supporting_functional(l2(2), (F(1), F(0)))
        blocks = block_decomposition(cfg, frame)
        assert len(blocks) == 1 and len(blocks[0].points) == 1

    def test_rejects_non_uniform_measure(self):
        from anticonc.geometry import supporting_functional

        vm = VectorMeasure(
            PointConfig(l2(2), ((F(0), F(0)), (F(2), F(0)))),
            (F(1, 3), F(2, 3)),
        )
        frame = supporting_functional(l2(2), (F(1), F(0)))
        with pytest.raises(DomainError):
            block_decomposition(vm, frame)

    def test_uniform_multiset_clearing(self):
        vm = VectorMeasure(
            PointConfig(l2(2), ((F(0), F(0)), (F(2), F(0)))),
            (F(1, 4), F(3, 4)),
        )
        cfg = to_uniform_multiset(vm)
        assert len(cfg.points) == 4
        assert cfg.points.count((F(2), F(0))) == 3

    def test_concentration_two_routes_agree(self):
        # Q of a uniform multiset: clique number over the multiset size must
        # equal the weighted clique value of the merged measure
        from anticonc.geometry import concentration_q, distance_graph

        rng = random.Random(55)
        for _ in range(20):
            size = rng.randint(2, 16)
            pts = []
            for _ in range(size):
                if pts and rng.random() < 0.3:
                    pts.append(pts[rng.randrange(len(pts))])
                else:
                    pts.append(
                        (F(rng.randint(0, 48), 16), F(rng.randint(-4, 4), 16))
                    )
            cfg = PointConfig(l2(2), tuple(pts))
            omega = int(max_clique(distance_graph(cfg))[0])
            merged = VectorMeasure(cfg, tuple(F(1, size) for _ in pts))
            assert concentration_q(merged).value == F(omega, size)

    def test_blocks_feed_chain_decomposition(self):
        # decomposition output is directly usable as chain input: same
        # frame, certified separations
        from anticonc.chains import iterated_decompose, middle_layer_count
        from anticonc.geometry import near_line_fit

        rng = random.Random(77)
        for _ in range(5):
            size = rng.randint(6, 14)
            pts = tuple(
                (F(rng.randint(0, 64), 16), F(rng.randint(-5, 5), 16))
                for _ in range(size)
            )
            cfg = PointConfig(l2(2), pts)
            fit = near_line_fit(cfg, early_stop=True)
            assert fit.certified
            blocks = block_decomposition(cfg, fit.frame)
            decomp = iterated_decompose(blocks)
            ks = [len(b.points) for b in blocks]
            assert len(decomp.chains) == middle_layer_count(ks)

    def test_class_count_bound(self):
        from anticonc.geometry import concentration_q, near_line_fit

        rng = random.Random(12)
        for _ in range(10):
            n = rng.randint(4, 20)
            pts = tuple(
                (F(rng.randint(0, 96), 16), F(rng.randint(-6, 6), 16))
                for _ in range(n)
            )
            cfg = PointConfig(l2(2), pts)
            fit = near_line_fit(cfg, early_stop=True)
            assert fit.certified
            uniform = VectorMeasure(cfg, tuple(F(1, n) for _ in range(n)))
            alpha = concentration_q(uniform).value
            blocks = block_decomposition(cfg, fit.frame, alpha=alpha)
            assert len(blocks) <= alpha * n
            assert sum(len(b.points) for b in blocks) == n


class TestCertificates:
    def test_certificate_verification_rejects_bad(self):
        g = cycle_graph(5)
        bad = ColoringCertificate(2, ((0, 1, 2), (3, 4)))
        assert not bad.verify(g)
