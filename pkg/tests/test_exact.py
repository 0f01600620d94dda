import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submax.core import CutFunctionSpec, ExplicitTableSpec, build_function, make_tight_example, random_table_instance
from submax.errors import ResourceLimitError
from submax.exact import brute_force_opt, brute_force_opt_reversed, feasible_masks, ratio_verdict
from submax.knapsack_solver import KnapsackConstraint
from submax.matroid import Matroid, PartitionMatroid, UniformMatroid
from submax.packing_solver import PackingConstraint

from corpus import knapsack_corpus, matroid_corpus, packing_corpus
from oracles import knapsack_ok, opt_over, packing_ok, powerset

TRIANGLE = CutFunctionSpec(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)))


class EvenSizes(Matroid):
    """Not a matroid; exercises the generic feasibility fallback."""

    n = 4

    def is_independent(self, subset):
        return len(set(subset)) % 2 == 0


class TestExamples:
    def test_triangle_uniform(self):
        res = brute_force_opt(build_function(TRIANGLE), UniformMatroid(3, 1))
        assert res.opt_value == 2.0 and res.opt_set == {0}
        assert res.enumerated == 4

    def test_tight_example_unconstrained(self):
        res = brute_force_opt(make_tight_example(8, 0.1), UniformMatroid(8, 8))
        assert res.opt_value == 6.0 and res.opt_set == set(range(2, 8))

    def test_knapsack(self):
        f = build_function(ExplicitTableSpec(2, (0.0, 1.0, 2.0, 2.5)))
        assert brute_force_opt(f, KnapsackConstraint.of([1, 1], 1)).opt_set == {1}

    def test_exact_boundaries(self):
        p = PackingConstraint.of([[0.5, 0.5, 0.5]], [1.0])
        assert list(feasible_masks(p, 3)) == [0, 1, 2, 3, 4, 5, 6]
        # 0.1 + 0.2 exceeds 0.3 in binary, so the pair is infeasible
        k = KnapsackConstraint.of([0.1, 0.2], 0.3)
        assert list(feasible_masks(k, 2)) == [0, 1, 2]

    def test_generic_fallback(self):
        assert list(feasible_masks(EvenSizes(), 4)) == [m for m in range(16) if bin(m).count("1") % 2 == 0]

    def test_partition(self):
        m = PartitionMatroid.from_lists(3, [[0, 1], [2]], [1, 0])
        assert list(feasible_masks(m, 3)) == [0, 1, 2]

    def test_resource_limit(self):
        f = build_function(CutFunctionSpec(21, ()))
        with pytest.raises(ResourceLimitError):
            brute_force_opt(f, UniformMatroid(21, 2))
        with pytest.raises(ResourceLimitError):
            brute_force_opt_reversed(f, UniformMatroid(21, 2))

    def test_ties_go_to_lowest_mask(self):
        f = build_function(ExplicitTableSpec(2, (1.0, 1.0, 1.0, 1.0)))
        assert brute_force_opt(f, UniformMatroid(2, 2)).opt_set == frozenset()
        assert brute_force_opt_reversed(f, UniformMatroid(2, 2)).opt_set == frozenset()


class TestRatioVerdict:
    def test_basic(self):
        assert ratio_verdict(1.0, 4.0, 0.25)
        assert not ratio_verdict(0.9, 4.0, 0.25)

    def test_tolerance(self):
        assert ratio_verdict(1.0 - 1e-10, 4.0, 0.25)
        assert not ratio_verdict(1.0 - 1e-6, 4.0, 0.25)

    def test_zero_optimum(self):
        assert ratio_verdict(0.0, 0.0, 0.5)
        assert not ratio_verdict(-1e-6, 0.0, 0.5)


class TestAgainstIndependentOracle:
    def test_matroid_corpus(self):
        for case in matroid_corpus(30):
            res = brute_force_opt(case.oracle(), case.constraint)
            assert res.opt_value == opt_over(case.oracle(), case.n, case.constraint.is_independent)
            rev = brute_force_opt_reversed(case.oracle(), case.constraint)
            assert (rev.opt_set, rev.opt_value, rev.enumerated) == (res.opt_set, res.opt_value, res.enumerated)

    def test_knapsack_corpus(self):
        for case in knapsack_corpus(30):
            c = case.constraint
            res = brute_force_opt(case.oracle(), c)
            assert res.opt_value == opt_over(case.oracle(), case.n, knapsack_ok(c.costs, c.budget))
            assert brute_force_opt_reversed(case.oracle(), c).opt_set == res.opt_set

    def test_packing_corpus(self):
        for case in packing_corpus({1: (2.0,), 3: (4.0,)}, per_width=4):
            c = case.constraint
            res = brute_force_opt(case.oracle(), c)
            assert res.opt_value == opt_over(case.oracle(), case.n, packing_ok(c.A, c.b))
            assert brute_force_opt_reversed(case.oracle(), c).opt_set == res.opt_set

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 7), st.integers(0, 10_000), st.lists(st.integers(1, 9), min_size=7, max_size=7), st.integers(1, 20))
    def test_enumerated_count(self, n, seed, costs, budget):
        kn = KnapsackConstraint.of([c / 4 for c in costs[:n]], budget / 4)
        f = build_function(random_table_instance(n, seed))
        res = brute_force_opt(f, kn)
        feasible = [s for s in powerset(range(n)) if knapsack_ok(kn.costs, kn.budget)(s)]
        assert res.enumerated == len(feasible)
        assert res.opt_value == max(build_function(random_table_instance(n, seed)).value(s) for s in feasible)
