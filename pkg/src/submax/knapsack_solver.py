"""Twin greedy, threshold twin greedy and the size-two enumeration wrapper for a knapsack.

Both greedy variants grow two disjoint candidate solutions and may overshoot
the budget by the last element placed in a candidate.  The enumeration
wrapper repairs that by guessing up to two heavy elements and trimming.
Costs are summed exactly (as fractions of their binary values) so budget
tests never suffer from rounding.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Collection, Iterable
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations

from .core import ConditionedFunction, SetFunction, mask_elements, to_mask
from .errors import InvalidSpecError


class TieBreak(str, Enum):
    LOWEST_ID = "lowest-id"
    HIGHEST_ID = "highest-id"
    ALTERNATE = "alternate-solutions"


def _tie_rule(tie_break: TieBreak | str) -> TieBreak:
    try:
        return TieBreak(tie_break)
    except ValueError:
        choices = ", ".join(t.value for t in TieBreak)
        raise InvalidSpecError(f"unknown tie-break {tie_break!r}; expected one of {choices}") from None


@dataclass(frozen=True)
class KnapsackConstraint:
    costs: tuple[float, ...]
    budget: float

    def __post_init__(self):
        if not all(math.isfinite(c) and c > 0 for c in self.costs):
            raise InvalidSpecError("every cost must be a finite positive number")
        if not (math.isfinite(self.budget) and self.budget > 0):
            raise InvalidSpecError("budget must be a finite positive number")
        object.__setattr__(self, "_exact", tuple(Fraction(c) for c in self.costs))
        object.__setattr__(self, "_budget", Fraction(self.budget))

    @classmethod
    def of(cls, costs: Iterable[float], budget: float) -> "KnapsackConstraint":
        return cls(tuple(float(c) for c in costs), float(budget))

    @property
    def n(self) -> int:
        return len(self.costs)

    @property
    def exact_budget(self) -> Fraction:
        return self._budget

    def exact_cost(self, u: int) -> Fraction:
        return self._exact[u]

    def cost(self, subset: Iterable[int]) -> Fraction:
        return sum((self._exact[u] for u in subset), Fraction(0))

    def is_feasible(self, subset: Collection[int]) -> bool:
        return self.cost(subset) <= self._budget

    def is_feasible_mask(self, mask: int) -> bool:
        return self.cost(mask_elements(mask)) <= self._budget

    def to_json(self) -> dict:
        return {"kind": "knapsack", "costs": list(self.costs), "budget": self.budget}


@dataclass(frozen=True)
class TraceStep:
    round: int
    k: int
    u: int
    marginal: float


@dataclass(frozen=True)
class DiscardRecord:
    """An element moved to ``D`` by the threshold variant, with the values seen at that moment."""

    u: int
    marginal: float
    singleton: float
    reinsertions: int


@dataclass
class TwinResult:
    s1: tuple[int, ...]
    s2: tuple[int, ...]
    values: tuple[float, float]
    best_index: int
    termination: str
    queries: int
    trace: list[TraceStep] = field(default_factory=list)
    discarded: list[DiscardRecord] = field(default_factory=list)
    reinsertions: dict[int, int] = field(default_factory=dict)

    @property
    def best(self) -> tuple[int, ...]:
        return self.s1 if self.best_index == 1 else self.s2

    @property
    def solution(self) -> frozenset[int]:
        return frozenset(self.best)

    @property
    def value(self) -> float:
        return self.values[self.best_index - 1]

    @property
    def value_sum(self) -> float:
        return self.values[0] + self.values[1]

    @property
    def d_set(self) -> frozenset[int]:
        return frozenset(r.u for r in self.discarded)


def reinsertion_cap(n: int, epsilon: float) -> float:
    """The threshold ``2 ln(n/eps) / eps`` compared against ``q(u)`` before each reinsertion."""
    return 2.0 * math.log(n / epsilon) / epsilon


def _ground(f: SetFunction, elements: Iterable[int] | None) -> list[int]:
    return list(range(f.n)) if elements is None else sorted(set(elements))


class _Twin:
    """Shared state of both greedy variants: two disjoint candidates and their costs."""

    def __init__(self, f: SetFunction, knapsack: KnapsackConstraint, budget: Fraction | float | None):
        if knapsack.n != f.n:
            raise InvalidSpecError("knapsack and function ground sets differ")
        self.f = f
        self.knapsack = knapsack
        self.budget = knapsack.exact_budget if budget is None else Fraction(budget)
        self.sets: list[list[int]] = [[], []]
        self.masks = [0, 0]
        self.costs = [Fraction(0), Fraction(0)]
        empty = f.value_mask(0)
        self.values = [empty, empty]
        self.active = [k for k in (0, 1) if self.costs[k] < self.budget]
        self.trace: list[TraceStep] = []
        self.last_k: int | None = None

    def add(self, k: int, u: int, new_value: float, marg: float) -> None:
        self.sets[k].append(u)
        self.masks[k] |= 1 << u
        self.costs[k] += self.knapsack.exact_cost(u)
        self.values[k] = new_value
        if self.costs[k] >= self.budget:
            self.active.remove(k)
        self.trace.append(TraceStep(len(self.trace) + 1, k + 1, u, marg))
        self.last_k = k

    def result(self, termination: str, queries: int, **extra) -> TwinResult:
        best = 1 if self.values[0] >= self.values[1] else 2
        return TwinResult(
            s1=tuple(self.sets[0]),
            s2=tuple(self.sets[1]),
            values=(self.values[0], self.values[1]),
            best_index=best,
            termination=termination,
            queries=queries,
            trace=self.trace,
            **extra,
        )


def _near(a: float, best: float) -> bool:
    return a >= best - 1e-12 * max(1.0, abs(best))


def _pick(candidates: list[tuple[int, int]], rule: TieBreak, last_k: int | None) -> tuple[int, int]:
    """Choose among tied ``(k, u)`` pairs (``k`` is 0-based)."""
    if rule is TieBreak.LOWEST_ID:
        return min(candidates, key=lambda c: (c[1], c[0]))
    if rule is TieBreak.HIGHEST_ID:
        return max(candidates, key=lambda c: (c[1], c[0]))
    prefer = 0 if last_k is None else 1 - last_k
    preferred = [c for c in candidates if c[0] == prefer]
    pool = preferred or candidates
    return min(pool, key=lambda c: (c[1], c[0]))


def twin_greedy(
    f: SetFunction,
    knapsack: KnapsackConstraint,
    tie_break: TieBreak | str = TieBreak.LOWEST_ID,
    elements: Iterable[int] | None = None,
    budget: Fraction | float | None = None,
) -> TwinResult:
    """Grow two disjoint solutions, each round adding the best-density (solution, element) pair.

    Marginals against a candidate are cached until that candidate changes, so
    a round costs one query per unpacked element for the candidate that grew
    last.
    """
    rule = _tie_rule(tie_break)
    start = f.query_count
    state = _Twin(f, knapsack, budget)
    remaining = _ground(f, elements)
    cache: list[dict[int, tuple[float, float]] | None] = [None, None]

    termination = "exhausted"
    while remaining and state.active:
        rows = []
        for k in state.active:
            if cache[k] is None:
                base, val = state.masks[k], state.values[k]
                cache[k] = {}
                for u in remaining:
                    new = f.value_mask(base | (1 << u))
                    cache[k][u] = (new - val, new)
            for u in remaining:
                marg = cache[k][u][0]
                rows.append((marg / knapsack.costs[u], k, u))
        best = max(r[0] for r in rows)
        tied = [(k, u) for d, k, u in rows if _near(d, best)]
        k, u = _pick(tied, rule, state.last_k)
        marg, new_value = cache[k][u]
        if marg <= 0:
            termination = "nonpositive"
            break
        state.add(k, u, new_value, marg)
        remaining.remove(u)
        cache[k] = None
        other = cache[1 - k]
        if other is not None:
            other.pop(u, None)
    else:
        if remaining:
            termination = "budget"
    return state.result(termination, f.query_count - start)


def threshold_twin_greedy(
    f: SetFunction,
    knapsack: KnapsackConstraint,
    epsilon: float,
    tie_break: TieBreak | str = TieBreak.LOWEST_ID,
    elements: Iterable[int] | None = None,
    budget: Fraction | float | None = None,
) -> TwinResult:
    """Lazy twin greedy driven by a max-priority queue of cached marginal densities.

    ``Δ(u)`` starts at ``f(u | ∅)``.  Popping ``u`` evaluates its marginal
    against each active candidate; the best one takes ``u`` if the marginal
    is within ``(1 - eps)`` of ``Δ(u)``.  Otherwise ``Δ(u)`` is lowered and
    ``u`` requeued, until it has been requeued more than
    ``2 ln(n/eps)/eps`` times, at which point it is set aside in ``D``.
    ``n`` is the size of the ground set the run sees.
    """
    if not 0 < epsilon < 1:
        raise InvalidSpecError("epsilon must lie in (0, 1)")
    rule = _tie_rule(tie_break)
    start = f.query_count
    state = _Twin(f, knapsack, budget)
    ground = _ground(f, elements)
    n = len(ground)
    cap = reinsertion_cap(n, epsilon) if n else 0.0
    empty = state.values[0]

    singleton: dict[int, float] = {}
    delta: dict[int, float] = {}
    heap: list[tuple[float, int]] = []
    for u in ground:
        singleton[u] = f.value_mask(1 << u)
        delta[u] = singleton[u] - empty
        heap.append((-delta[u] / knapsack.costs[u], u))
    heapq.heapify(heap)
    q = {u: 0 for u in ground}
    unpacked = set(ground)
    discarded: list[DiscardRecord] = []

    termination = "exhausted"
    while unpacked and state.active and heap:
        _, u = heapq.heappop(heap)
        options = []
        for k in state.active:
            new = f.value_mask(state.masks[k] | (1 << u))
            options.append((new - state.values[k], k, new))
        best = max(o[0] for o in options)
        tied = [(kk, u) for m, kk, _ in options if _near(m, best)]
        k, _ = _pick(tied, rule, state.last_k)
        marg, new_value = next((m, v) for m, kk, v in options if kk == k)
        if marg <= 0:
            termination = "nonpositive"
            break
        if marg >= (1 - epsilon) * delta[u]:
            state.add(k, u, new_value, marg)
            unpacked.discard(u)
        elif q[u] <= cap:
            delta[u] = marg
            heapq.heappush(heap, (-marg / knapsack.costs[u], u))
            q[u] += 1
        else:
            discarded.append(DiscardRecord(u, marg, singleton[u], q[u]))
    else:
        if not state.active:
            termination = "budget"
        elif unpacked:
            termination = "queue-empty"
    return state.result(termination, f.query_count - start, discarded=discarded, reinsertions=q)


@dataclass
class EnumerationBranch:
    guess: tuple[int, ...]
    removed: frozenset[int]
    inner: TwinResult | None
    kept: tuple[int, ...]
    value: float


@dataclass
class EnumerationResult:
    solution: frozenset[int]
    value: float
    guess: tuple[int, ...]
    queries: int
    branches: list[EnumerationBranch] = field(default_factory=list)


def enumeration_wrapper(
    f: SetFunction,
    knapsack: KnapsackConstraint,
    variant: str = "plain",
    epsilon: float = 0.1,
    tie_break: TieBreak | str = TieBreak.LOWEST_ID,
) -> EnumerationResult:
    """Best ``E ∪ R_E`` over every affordable guess ``E`` of at most two elements.

    For each guess the elements whose marginal to ``E`` exceeds ``f(E)/2``
    are dropped, the chosen twin-greedy variant runs on ``f(· | E)`` with the
    residual budget, and its output loses its last element if it overshoots.
    Ties between guesses keep the earliest one (empty set, singletons, then
    pairs, each in id order).
    """
    if variant not in ("plain", "threshold"):
        raise InvalidSpecError(f"variant must be 'plain' or 'threshold', got {variant!r}")
    rule = _tie_rule(tie_break)
    if knapsack.n != f.n:
        raise InvalidSpecError("knapsack and function ground sets differ")
    start = f.query_count
    n = f.n
    budget = knapsack.exact_budget
    guesses: list[tuple[int, ...]] = [()]
    guesses += [(u,) for u in range(n)]
    guesses += list(combinations(range(n), 2))

    best: EnumerationBranch | None = None
    branches = []
    for guess in guesses:
        spent = knapsack.cost(guess)
        if spent > budget:
            continue
        emask = to_mask(guess)
        f_e = f.value_mask(emask)
        rest = [u for u in range(n) if not emask >> u & 1]
        removed = frozenset(u for u in rest if f.value_mask(emask | (1 << u)) - f_e > 0.5 * f_e)
        ground = [u for u in rest if u not in removed]
        residual = budget - spent
        conditioned = ConditionedFunction(f, guess, base_value=f_e)
        if residual > 0:
            if variant == "plain":
                inner = twin_greedy(conditioned, knapsack, rule, ground, residual)
            else:
                inner = threshold_twin_greedy(conditioned, knapsack, epsilon, rule, ground, residual)
            kept = list(inner.best)
            if kept and knapsack.cost(kept) > residual:
                kept.pop()
        else:
            inner, kept = None, []
        value = f.value_mask(emask | to_mask(kept))
        branch = EnumerationBranch(guess, removed, inner, tuple(kept), value)
        branches.append(branch)
        if best is None or value > best.value:
            best = branch
    assert best is not None  # the empty guess is always affordable
    solution = frozenset(best.guess) | frozenset(best.kept)
    return EnumerationResult(solution, best.value, best.guess, f.query_count - start, branches)
