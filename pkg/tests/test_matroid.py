import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submax.core import CutFunctionSpec, build_function
from submax.errors import InfeasibleError, InvalidSpecError, InvariantViolation
from submax.matroid import (
    DummyExtendedMatroid,
    Matroid,
    PartitionMatroid,
    UniformMatroid,
    exchange_bijection,
    extend_with_dummies,
    max_weight_base,
    rank_of,
)

from oracles import all_bases, powerset


@st.composite
def partition_matroids(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    blocks = draw(st.integers(1, n))
    owner = draw(st.lists(st.integers(0, blocks - 1), min_size=n, max_size=n))
    groups = [[u for u in range(n) if owner[u] == b] for b in range(blocks)]
    caps = draw(st.lists(st.integers(0, 3), min_size=blocks, max_size=blocks))
    return PartitionMatroid.from_lists(n, groups, caps)


def axioms_hold(m: Matroid) -> bool:
    sets = [frozenset(s) for s in powerset(range(m.n))]
    indep = {s for s in sets if m.is_independent(s)}
    if frozenset() not in indep:
        return False
    for s in indep:
        if any(frozenset(t) not in indep for t in powerset(s)):
            return False
    for a in indep:
        for b in indep:
            if len(a) > len(b) and not any(b | {x} in indep for x in a - b):
                return False
    return True


class TestFamilies:
    def test_uniform(self):
        m = UniformMatroid(5, 3)
        assert m.is_independent({0, 1, 2})
        assert not m.is_independent({0, 1, 2, 3})
        assert m.to_json() == {"kind": "uniform", "k": 3}

    def test_partition(self):
        m = PartitionMatroid.from_lists(4, [[0, 1], [2, 3]], [1, 1])
        assert m.is_independent({0, 2})
        assert not m.is_independent({0, 1})
        assert m.to_json() == {"kind": "partition", "blocks": [[0, 1], [2, 3]], "caps": [1, 1]}

    def test_partition_must_cover(self):
        with pytest.raises(InvalidSpecError):
            PartitionMatroid.from_lists(3, [[0, 1]], [1])
        with pytest.raises(InvalidSpecError):
            PartitionMatroid.from_lists(2, [[0, 1], [1]], [1, 1])
        with pytest.raises(InvalidSpecError):
            PartitionMatroid.from_lists(2, [[0, 1]], [-1])

    @pytest.mark.parametrize("n,k", [(0, 0), (4, 0), (6, 2), (7, 7)])
    def test_uniform_axioms(self, n, k):
        assert axioms_hold(UniformMatroid(n, k))

    @settings(max_examples=20, deadline=None)
    @given(partition_matroids(max_n=7))
    def test_partition_axioms(self, m):
        assert axioms_hold(m)

    def test_dummy_extended_axioms(self):
        base = PartitionMatroid.from_lists(4, [[0, 1], [2, 3]], [1, 1])
        assert axioms_hold(DummyExtendedMatroid(base, 2))


class TestRank:
    def test_uniform(self):
        assert rank_of(UniformMatroid(5, 3)) == 3

    def test_partition(self):
        assert rank_of(PartitionMatroid.from_lists(4, [[0, 1], [2, 3]], [1, 1])) == 2

    def test_extended_keeps_rank(self):
        f = build_function(CutFunctionSpec(4, ()))
        inst = extend_with_dummies(f, PartitionMatroid.from_lists(4, [[0, 1, 2], [3]], [2, 1]))
        assert rank_of(inst.matroid) == inst.k == 3

    @settings(max_examples=30, deadline=None)
    @given(partition_matroids())
    def test_matches_largest_independent_set(self, m):
        assert rank_of(m) == max(len(s) for s in powerset(range(m.n)) if m.is_independent(s))


class TestMaxWeightBase:
    def test_top_two(self):
        assert max_weight_base(UniformMatroid(4, 2), [5, 1, 3, 2]) == {0, 2}

    def test_negative_weights_forced(self):
        assert max_weight_base(UniformMatroid(2, 2), [-1, -2]) == {0, 1}

    def test_ties_prefer_smaller_id(self):
        assert max_weight_base(UniformMatroid(4, 2), [1, 1, 1, 1]) == {0, 1}

    def test_allowed_without_base(self):
        with pytest.raises(InfeasibleError):
            max_weight_base(UniformMatroid(4, 3), [1, 1, 1, 1], allowed=[0, 1])

    @settings(max_examples=60, deadline=None)
    @given(partition_matroids(), st.data())
    def test_matches_exhaustive_optimum(self, m, data):
        w = data.draw(st.lists(st.integers(-5, 9), min_size=m.n, max_size=m.n))
        got = max_weight_base(m, w)
        bases = all_bases(m.n, m.is_independent)
        assert m.is_independent(got) and len(got) == rank_of(m)
        assert sum(w[u] for u in got) == max(sum(w[u] for u in b) for b in bases)


class TestExchangeBijection:
    def test_identity(self):
        g = exchange_bijection(UniformMatroid(5, 3), {0, 2, 4}, {0, 2, 4})
        assert g == {0: 0, 2: 2, 4: 4}

    def test_uniform_id_order(self):
        g = exchange_bijection(UniformMatroid(6, 3), {0, 1, 5}, {1, 3, 4})
        assert g == {1: 1, 0: 3, 5: 4}

    def test_partition_unique_matching(self):
        m = PartitionMatroid.from_lists(4, [[0, 1], [2, 3]], [1, 1])
        assert exchange_bijection(m, {0, 2}, {1, 3}) == {0: 1, 2: 3}

    def test_needs_augmenting_path(self):
        # element 0 can only replace 2, so the greedy first choice for 1 must be undone
        m = PartitionMatroid.from_lists(4, [[0, 2], [1, 3]], [1, 1])
        assert exchange_bijection(m, {0, 1}, {2, 3}) == {0: 2, 1: 3}

    def test_broken_oracle_surfaces(self):
        class Broken(Matroid):
            n = 4

            def is_independent(self, subset):
                s = set(subset)
                return len(s) <= 2 and not (1 in s and len(s) == 2 and s != {0, 1})

        with pytest.raises(InvariantViolation):
            exchange_bijection(Broken(), {0, 1}, {2, 3})

    def test_size_mismatch(self):
        with pytest.raises(InvalidSpecError):
            exchange_bijection(UniformMatroid(4, 3), {0}, {1, 2})

    @settings(max_examples=60, deadline=None)
    @given(partition_matroids(), st.data())
    def test_both_exchange_properties(self, m, data):
        bases = all_bases(m.n, m.is_independent)
        a = data.draw(st.sampled_from(bases))
        b = data.draw(st.sampled_from(bases))
        g = exchange_bijection(m, a, b)
        assert set(g) == set(a) and sorted(g.values()) == sorted(b)
        for u in a:
            if u in b:
                assert g[u] == u
            assert m.is_independent((set(b) | {u}) - {g[u]})


class TestDummyExtension:
    def setup_method(self):
        rng = np.random.default_rng(3)
        w = rng.uniform(0, 1, 3)
        self.f = build_function(CutFunctionSpec(4, ((0, 1, w[0]), (1, 2, w[1]), (2, 3, w[2]))))
        self.inst = extend_with_dummies(self.f, UniformMatroid(4, 2))

    def test_layout(self):
        assert self.inst.k == 2
        assert list(self.inst.dummies) == [4, 5, 6, 7]
        assert self.inst.matroid.n == 8

    def test_dummies_carry_no_value(self):
        g = self.inst.function
        assert g.value({4, 5, 6}) == self.f.value(set())
        assert g.value({1, 5}) == self.f.value({1})

    def test_real_restriction_equals_f(self):
        for s in powerset(range(4)):
            assert self.inst.function.value(s) == self.f.value(s)

    def test_independence(self):
        m = self.inst.matroid
        assert m.is_independent({2, 5})
        assert not m.is_independent({2, 5, 6})
        assert not m.is_independent({0, 1, 2})

    def test_every_independent_set_pads_to_base(self):
        m = self.inst.matroid
        for s in powerset(range(4)):
            if UniformMatroid(4, 2).is_independent(s):
                padded = set(s) | set(list(self.inst.dummies)[: 2 - len(s)])
                assert m.is_independent(padded) and len(padded) == 2

    def test_strip(self):
        assert self.inst.strip({1, 4, 7}) == {1}

    def test_queries_hit_base_oracle(self):
        self.f.reset_queries()
        self.inst.function.value({0, 6})
        assert self.f.query_count == 1 == self.inst.function.query_count

    def test_rank_zero_rejected(self):
        with pytest.raises(InvalidSpecError):
            extend_with_dummies(self.f, UniformMatroid(4, 0))
