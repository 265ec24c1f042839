import numpy as np
import pytest

from focklab.errors import DimensionMismatch
from focklab.hgraph import (
    HGraph,
    compare,
    degree_report,
    from_csv,
    from_params,
    from_symbol,
    indicator_matrix,
    symbol_to_params,
    to_csv,
    to_dot,
)
from focklab.operators import build
from focklab.symbols import HarmonicSymbol, parse

ANTI = parse("2*conj(z)^1+3*conj(z)^2+conj(z)^3")
ANALYTIC = parse("5*z+9*z^2+z^4")
MIXED = parse("4*z+z^3+conj(z)^2+7*conj(z)^3")


class TestFromSymbol:
    def test_anti_successors(self):
        assert from_symbol(ANTI, 9).successors(1) == [3, 5, 7]

    def test_analytic_successors(self):
        assert from_symbol(ANALYTIC, 9).successors(2) == [1, 2, 6]

    def test_zero_symbol(self):
        assert from_symbol(HarmonicSymbol(), 12).arcs == frozenset()

    def test_eps_validated(self):
        with pytest.raises(ValueError):
            from_symbol(ANTI, 5, eps=0)

    def test_indicator_equals_operator_pattern(self, random_symbol):
        for _ in range(5):
            phi = random_symbol(4, 4)
            g = from_symbol(phi, 20, w=1.4)
            pattern = np.abs(build("htoeplitz", phi, 20, 20, 1.4).entries) > 1e-12 * phi.max_abs_coeff()
            assert np.array_equal(indicator_matrix(g), pattern.astype(int))

    def test_threshold_is_relative(self):
        # a coefficient 1e-14 of the largest one does not produce arcs
        phi = HarmonicSymbol({1: 1.0}, {1: 1e-14})
        assert from_symbol(phi, 10) == from_symbol(HarmonicSymbol({1: 1.0}), 10)


class TestFromParams:
    def test_anti_example(self):
        assert from_params(9, [2, 4, 6]).successors(1) == [3, 5, 7]

    def test_lower_rule(self):
        g = from_params(5, [], [1])
        assert (2, 1) in g.arcs
        # only odd columns receive lower arcs
        assert all(j % 2 == 1 for _, j in g.arcs)

    def test_empty(self):
        assert from_params(7).arcs == frozenset()

    @pytest.mark.parametrize("xs", [[0, 2], [3, 2], [2, 2], [9], [-1], [1.5]])
    def test_malformed_offsets(self, xs):
        with pytest.raises(ValueError):
            from_params(9, xs)

    def test_literal_rule_outdegree(self):
        p = symbol_to_params(ANALYTIC)
        assert from_params(25, p.xs, p.ys).successors(2) == [1, 4, 6, 10]


class TestParams:
    def test_captions(self):
        assert symbol_to_params(ANTI)[:2] == ([2, 4, 6], [])
        assert symbol_to_params(ANALYTIC)[:2] == ([1, 3, 7], [1, 2, 4])
        assert symbol_to_params(MIXED)[:2] == ([1, 4, 5, 6], [1, 3])

    def test_constant_flagged(self):
        p = symbol_to_params(parse("2 + conj(z)"))
        assert p.zero_offset and p.xs == [0, 2]
        assert not symbol_to_params(ANTI).zero_offset


class TestDegrees:
    def test_anti_example(self):
        rep = degree_report(from_symbol(ANTI, 25))
        assert rep.indegree[:9] == [0, 0, 1, 0, 2, 0, 3, 0, 3]
        interior = [rep.outdegree[v - 1] for v in range(1, 26) if v not in rep.clipped]
        assert interior and set(interior) == {3}
        assert rep.loops == []

    def test_analytic_example_indegrees_follow_indicator(self):
        g = from_symbol(ANALYTIC, 25)
        rep = degree_report(g)
        # column sums of the displayed indicator block; vertex 3 is hit from 3, 4 and 6
        assert g.predecessors(3) == [3, 4, 6]
        assert rep.indegree[:9] == [3, 3, 3, 2, 3, 1, 3, 1, 3]

    def test_analytic_example_loops(self):
        assert degree_report(from_symbol(ANALYTIC, 8)).loops == [2, 3, 5]
        loops = degree_report(from_symbol(ANALYTIC, 25)).loops
        assert loops == [2, 3, 5, 9]
        assert len(loops) >= len(ANALYTIC.analytic)

    def test_analytic_example_parity(self):
        n = 40
        rep = degree_report(from_symbol(ANALYTIC, n))
        for j in range(9, n - 2 * 4 + 1):
            assert rep.indegree[j - 1] == (3 if j % 2 else 0)

    def test_interior_outdegree_formula(self, random_symbol):
        for _ in range(5):
            phi = random_symbol(3, 3)
            rep = degree_report(from_symbol(phi, 30))
            expected = len([i for i in phi.analytic if i >= 1]) + len(phi.anti) + (phi.a(0) != 0)
            lo = max(phi.d_a, 0) + 1
            interior = [rep.outdegree[v - 1] for v in range(lo, 31) if v not in rep.clipped]
            assert set(interior) <= {expected}

    def test_handshake(self, random_symbol):
        g = from_symbol(random_symbol(), 15)
        rep = degree_report(g)
        assert sum(rep.indegree) == sum(rep.outdegree) == len(g.arcs) == rep.arc_count

    def test_empty(self):
        rep = degree_report(from_params(6))
        assert rep.indegree == rep.outdegree == [0] * 6 and rep.loops == []

    def test_params_clipping(self):
        rep = degree_report(from_params(9, [2, 4, 6]))
        assert rep.clipped == [3, 4, 5, 6, 7, 8, 9]


class TestCompare:
    def test_anti_agrees_on_unclipped_vertices(self):
        n = 25
        g1 = from_symbol(ANTI, n)
        p = symbol_to_params(ANTI)
        g2 = from_params(n, p.xs, p.ys)
        for i in range(1, n + 1):
            if 2 * i - 1 + max(p.xs) <= n:
                assert g1.successors(i) == g2.successors(i)

    def test_analytic_differs(self):
        p = symbol_to_params(ANALYTIC)
        diff = compare(from_symbol(ANALYTIC, 25), from_params(25, p.xs, p.ys))
        assert not diff["identical"]
        assert (2, 2) in diff["only_first"] and (2, 4) in diff["only_second"]

    def test_self(self):
        g = from_symbol(MIXED, 12)
        diff = compare(g, g)
        assert diff["identical"] and not diff["only_first"] and not diff["only_second"]

    def test_size_mismatch(self):
        with pytest.raises(DimensionMismatch):
            compare(from_params(5), from_params(6))


class TestExport:
    def test_dot_edges(self):
        text = to_dot(from_params(9, [2, 4, 6]))
        assert text.startswith("digraph W {")
        for e in ("1 -> 3;", "1 -> 5;", "1 -> 7;"):
            assert e in text

    def test_dot_empty(self):
        assert to_dot(from_params(3)) == "digraph W {\n  1;\n  2;\n  3;\n}\n"

    def test_dot_deterministic(self):
        assert to_dot(from_symbol(MIXED, 20)) == to_dot(from_symbol(MIXED, 20))

    def test_csv_round_trip(self):
        g = from_symbol(ANALYTIC, 14)
        text = to_csv(g)
        assert text.splitlines()[0] == "i,j"
        assert from_csv(text, 14) == g

    def test_csv_infers_n(self):
        assert from_csv("i,j\n1,3\n").n == 3

    def test_arcs_validated(self):
        with pytest.raises(ValueError):
            HGraph(3, frozenset({(1, 4)}))
