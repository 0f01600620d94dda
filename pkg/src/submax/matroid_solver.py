"""Random greedy and its derandomization for a matroid constraint.

The deterministic solver tracks an explicit distribution over bases of the
dummy-extended matroid.  Each iteration solves a small feasibility LP whose
uniform point reproduces random greedy; taking a vertex of that LP instead
keeps the support from growing exponentially.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import SetFunction, to_mask
from .errors import InvariantViolation
from .lp import EQ, GE, LE, LinearSystem, support_size, to_extreme_point, verify_feasible
from .matroid import (
    DummyExtendedInstance,
    Matroid,
    exchange_bijection,
    extend_with_dummies,
    max_weight_base,
    rank_of,
)


def matroid_guarantee(k: int) -> float:
    """Finite-rank lower bound on ``E[f(S_k)] / OPT`` for the deterministic solver."""
    if k < 1:
        return 1.0
    return 0.25 * (1 + (2 * (k + 1) / k - 1) * (1 - 2 / k) ** (k - 1))


def absence_bound(k: int, i: int) -> float:
    """Lower bound on ``Pr[u not in S]`` for a real element after ``i`` iterations."""
    return 0.5 * (1 + (1 - 2 / k) ** i)


def support_growth_bound(n: int, k: int, i: int) -> int:
    return n * i + 3 * k * i + 2 * i + 1


@dataclass
class SupportDistribution:
    """Multiset of ``(probability, base)`` pairs; duplicates are allowed."""

    pairs: list[tuple[Fraction, frozenset[int]]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.pairs)

    def total(self) -> Fraction:
        return sum((p for p, _ in self.pairs), Fraction(0))

    def support(self) -> list[tuple[frozenset[int], Fraction]]:
        """Distinct sets with their merged probability, in first-appearance order."""
        merged: dict[frozenset[int], Fraction] = {}
        for p, s in self.pairs:
            merged[s] = merged.get(s, Fraction(0)) + p
        return list(merged.items())


def probability_absent(dist: SupportDistribution, u: int) -> Fraction:
    return sum((p for p, s in dist.pairs if u not in s), Fraction(0))


@dataclass
class IterationRecord:
    index: int
    base: tuple[int, ...]
    distribution: SupportDistribution
    uniform_feasible: bool
    rows: int
    variables: int
    positive: int


@dataclass
class MatroidResult:
    solution: frozenset[int]
    value: float
    queries: int
    rank: int
    history: list[IterationRecord] = field(default_factory=list)


class _IterationCache:
    """Memoised values of ``f'`` keyed by the real part of the set."""

    def __init__(self, inst: DummyExtendedInstance):
        self.f = inst.function.base
        self.real = (1 << inst.n) - 1
        self.values: dict[int, float] = {}

    def __call__(self, mask: int) -> float:
        key = mask & self.real
        val = self.values.get(key)
        if val is None:
            val = self.values[key] = self.f.value_mask(key)
        return val


def _trivial_result(function: SetFunction) -> MatroidResult:
    start = function.query_count
    value = function.value_mask(0)
    return MatroidResult(frozenset(), value, function.query_count - start, 0)


def random_greedy(function: SetFunction, matroid: Matroid, rng_seed: int | None = 0) -> MatroidResult:
    """Random greedy: swap in a uniformly random element of the best base each step."""
    if rank_of(matroid) == 0:
        return _trivial_result(function)
    start = function.query_count
    inst = extend_with_dummies(function, matroid)
    rng = np.random.default_rng(rng_seed)
    ext, k, n = inst.matroid, inst.k, inst.n
    current = frozenset(inst.dummies[:k])
    for _ in range(k):
        cache = _IterationCache(inst)
        smask = to_mask(current)
        base_val = cache(smask)
        allowed = [u for u in range(ext.n) if u not in current]
        weights = {u: (cache(smask | (1 << u)) - base_val if u < n else 0.0) for u in allowed}
        m_i = max_weight_base(ext, weights, allowed, rank=k)
        g = exchange_bijection(ext, m_i, current)
        ordered = sorted(m_i)
        u = ordered[int(rng.integers(len(ordered)))]
        current = (current | {u}) - {g[u]}
    solution = inst.strip(current)
    value = function.value(solution)
    return MatroidResult(solution, value, function.query_count - start, k)


def _pad_to_base(members: set[int], inst: DummyExtendedInstance) -> frozenset[int]:
    for d in inst.dummies:
        if len(members) >= inst.k:
            break
        if d not in members:
            members.add(d)
    return frozenset(members)


def _build_iteration_lp(
    inst: DummyExtendedInstance,
    support: list[tuple[frozenset[int], Fraction]],
    base: list[int],
    maps: list[dict[int, int]],
    marg: list[dict[int, Fraction]],
    loss: list[dict[int, Fraction]],
) -> LinearSystem:
    """Feasibility LP in the joint variables ``y(u, S) = Pr[S] * x(u, S)``.

    Variable ``s * k + j`` is ``(base[j], support[s])``.  Scaling each column
    by the positive constant ``Pr[S]`` maps vertices to vertices and keeps the
    coefficient matrix free of the (fast-growing) probabilities.
    """
    k = inst.k
    inv_k = Fraction(1, k)
    lp = LinearSystem(len(support) * k)

    gain = {}
    drop = {}
    gain_rhs = drop_rhs = Fraction(0)
    for s, (_, p) in enumerate(support):
        for j, u in enumerate(base):
            if marg[s][u]:
                gain[s * k + j] = marg[s][u]
                gain_rhs += p * marg[s][u]
            if loss[s][u]:
                drop[s * k + j] = loss[s][u]
                drop_rhs += p * loss[s][u]
    lp.add(gain, GE, inv_k * gain_rhs)
    lp.add(drop, LE, inv_k * drop_rhs)

    # elements of the base enter a set that lacks them w.p. at most 1/k
    for j, u in enumerate(base):
        lacking = [s for s, (sset, _) in enumerate(support) if u not in sset]
        lp.add({s * k + j: 1 for s in lacking}, LE, inv_k * sum((support[s][1] for s in lacking), Fraction(0)))

    # members of a set leave it w.p. at least 1/k; rows only for elements some set holds
    position = {u: j for j, u in enumerate(base)}
    inverse = [{gu: u for u, gu in g.items()} for g in maps]
    present = sorted({u for sset, _ in support for u in sset})
    for v in present:
        holding = [s for s, (sset, _) in enumerate(support) if v in sset]
        lp.add(
            {s * k + position[inverse[s][v]]: 1 for s in holding},
            GE,
            inv_k * sum((support[s][1] for s in holding), Fraction(0)),
        )

    for s, (_, p) in enumerate(support):
        lp.add({s * k + j: 1 for j in range(k)}, EQ, p)
    return lp


def derandomized_greedy(function: SetFunction, matroid: Matroid) -> MatroidResult:
    """Deterministic matroid solver maintaining an explicit support distribution."""
    if rank_of(matroid) == 0:
        return _trivial_result(function)
    start = function.query_count
    inst = extend_with_dummies(function, matroid)
    ext, k, n = inst.matroid, inst.k, inst.n
    dist = SupportDistribution([(Fraction(1), frozenset(inst.dummies[:k]))])
    history: list[IterationRecord] = []

    for i in range(1, k + 1):
        cache = _IterationCache(inst)
        support = dist.support()
        marg: list[dict[int, Fraction]] = []
        weights = [Fraction(0)] * ext.n
        for sset, p in support:
            smask = to_mask(sset)
            base_val = Fraction(cache(smask))
            row = {}
            for u in range(ext.n):
                if u < n and u not in sset:
                    row[u] = Fraction(cache(smask | (1 << u))) - base_val
                    weights[u] += p * row[u]
                else:
                    row[u] = Fraction(0)
            marg.append(row)

        base = sorted(max_weight_base(ext, weights, rank=k))
        maps = [exchange_bijection(ext, base, sset) for sset, _ in support]
        loss = []
        for (sset, _), g in zip(support, maps):
            smask = to_mask(sset)
            fs = Fraction(cache(smask))
            loss.append({u: fs - Fraction(cache(smask & ~(1 << g[u]))) for u in base})

        lp = _build_iteration_lp(inst, support, base, maps, marg, loss)
        uniform = [p / k for _, p in support for _ in range(k)]
        uniform_ok = verify_feasible(lp, uniform)
        if not uniform_ok:
            raise InvariantViolation(f"uniform point infeasible at iteration {i}")
        y = to_extreme_point(lp, uniform)

        pairs = []
        for s, (sset, p) in enumerate(support):
            g = maps[s]
            for j, u in enumerate(base):
                yv = y[s * k + j]
                if yv > 0:
                    new = (set(sset) | {u}) - {g[u]}
                    pairs.append((yv, _pad_to_base(new, inst)))
        dist = SupportDistribution(pairs)
        history.append(
            IterationRecord(
                index=i,
                base=tuple(base),
                distribution=dist,
                uniform_feasible=uniform_ok,
                rows=len(lp.constraints),
                variables=lp.var_count,
                positive=support_size(y),
            )
        )

    cache = _IterationCache(inst)
    best_set, best_val = None, None
    for sset, _ in dist.support():
        val = cache(to_mask(sset))
        if best_val is None or val > best_val:
            best_set, best_val = sset, val
    solution = inst.strip(best_set)
    return MatroidResult(solution, best_val, function.query_count - start, k, history)


def expected_value(function: SetFunction, dist: SupportDistribution, n_real: int) -> float:
    """``E_{S ~ dist}[f(S \\ D)]`` evaluated in floating point (queries ``f``)."""
    real = (1 << n_real) - 1
    return float(sum(float(p) * function.value_mask(to_mask(s) & real) for p, s in dist.pairs))
