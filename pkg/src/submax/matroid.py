"""Matroid oracles, greedy bases, base-exchange bijections and dummy extension."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Collection, Iterable, Mapping, Sequence
from dataclasses import dataclass

from .core import SetFunction, mask_elements, to_mask
from .errors import InfeasibleError, InvalidSpecError, InvariantViolation


class Matroid(ABC):
    """Independence oracle over the ground set ``0..n-1``."""

    n: int

    @abstractmethod
    def is_independent(self, subset: Collection[int]) -> bool: ...

    def is_independent_mask(self, mask: int) -> bool:
        return self.is_independent(mask_elements(mask))

    # constraint protocol used by the exact solver
    def is_feasible(self, subset: Collection[int]) -> bool:
        return self.is_independent(subset)

    def is_feasible_mask(self, mask: int) -> bool:
        return self.is_independent_mask(mask)

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class UniformMatroid(Matroid):
    n: int
    k: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.k:
            raise InvalidSpecError("uniform matroid needs n >= 0 and k >= 0")

    def is_independent(self, subset: Collection[int]) -> bool:
        return len(set(subset)) <= self.k

    def is_independent_mask(self, mask: int) -> bool:
        return mask.bit_count() <= self.k

    def to_json(self) -> dict:
        return {"kind": "uniform", "k": self.k}


@dataclass(frozen=True)
class PartitionMatroid(Matroid):
    n: int
    blocks: tuple[tuple[int, ...], ...]
    caps: tuple[int, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.caps):
            raise InvalidSpecError("one cap per block required")
        if any(c < 0 for c in self.caps):
            raise InvalidSpecError("caps must be non-negative")
        seen = sorted(u for block in self.blocks for u in block)
        if seen != list(range(self.n)):
            raise InvalidSpecError("blocks must be disjoint and cover 0..n-1")
        object.__setattr__(self, "_block_masks", tuple(to_mask(b) for b in self.blocks))

    @classmethod
    def from_lists(cls, n: int, blocks: Iterable[Iterable[int]], caps: Iterable[int]) -> "PartitionMatroid":
        return cls(n, tuple(tuple(sorted(b)) for b in blocks), tuple(int(c) for c in caps))

    def is_independent(self, subset: Collection[int]) -> bool:
        return self.is_independent_mask(to_mask(subset))

    def is_independent_mask(self, mask: int) -> bool:
        return all((mask & bm).bit_count() <= cap for bm, cap in zip(self._block_masks, self.caps))

    def to_json(self) -> dict:
        return {"kind": "partition", "blocks": [list(b) for b in self.blocks], "caps": list(self.caps)}


@dataclass(frozen=True)
class DummyExtendedMatroid(Matroid):
    """``S`` is independent iff its real part is independent in ``base`` and ``|S| <= k``.

    Real elements keep ids ``0..base.n-1``; the ``2k`` dummies follow.
    """

    base: Matroid
    k: int

    @property
    def n(self) -> int:  # type: ignore[override]
        return self.base.n + 2 * self.k

    @property
    def real_mask(self) -> int:
        return (1 << self.base.n) - 1

    def is_independent(self, subset: Collection[int]) -> bool:
        return self.is_independent_mask(to_mask(subset))

    def is_independent_mask(self, mask: int) -> bool:
        return mask.bit_count() <= self.k and self.base.is_independent_mask(mask & self.real_mask)


class DummyExtendedFunction(SetFunction):
    """``f'(S) = f(S \\ D)``; queries are forwarded to (and counted by) the base oracle."""

    def __init__(self, base: SetFunction, dummies: int):
        super().__init__(base.n + dummies)
        self.base = base
        self._real = (1 << base.n) - 1

    @property
    def query_count(self) -> int:
        return self.base.query_count

    def reset_queries(self) -> None:
        self.base.reset_queries()

    def value_mask(self, mask: int) -> float:
        return self.base.value_mask(mask & self._real)

    def _evaluate(self, mask: int) -> float:  # pragma: no cover - value_mask bypasses it
        raise NotImplementedError


@dataclass(frozen=True)
class DummyExtendedInstance:
    function: DummyExtendedFunction
    matroid: DummyExtendedMatroid
    n: int
    k: int

    @property
    def dummies(self) -> range:
        return range(self.n, self.n + 2 * self.k)

    def strip(self, subset: Iterable[int]) -> frozenset[int]:
        return frozenset(u for u in subset if u < self.n)


def rank_of(matroid: Matroid) -> int:
    """Size of a maximal independent set, built greedily in id order."""
    mask = 0
    for u in range(matroid.n):
        if matroid.is_independent_mask(mask | (1 << u)):
            mask |= 1 << u
    return mask.bit_count()


def max_weight_base(
    matroid: Matroid,
    weights: Sequence | Mapping[int, object],
    allowed: Iterable[int] | None = None,
    rank: int | None = None,
) -> frozenset[int]:
    """Base inside ``allowed`` of maximum total weight.

    Greedy over descending weight, ties by smaller id.  Negative weights are
    accepted: every base has the same size, so greedy stays optimal.
    """
    if rank is None:
        rank = rank_of(matroid)
    pool = range(matroid.n) if allowed is None else sorted(set(allowed))
    order = sorted(pool, key=lambda u: (-weights[u], u))
    mask = 0
    size = 0
    for u in order:
        if size == rank:
            break
        if matroid.is_independent_mask(mask | (1 << u)):
            mask |= 1 << u
            size += 1
    if size != rank:
        raise InfeasibleError(f"allowed set contains no base (found independent set of size {size} < rank {rank})")
    return frozenset(mask_elements(mask))


def exchange_bijection(matroid: Matroid, a: Collection[int], b: Collection[int]) -> dict[int, int]:
    """Bijection ``g: A -> B`` with ``g(u) = u`` on ``A ∩ B`` and ``B + u - g(u)`` independent.

    Found as a perfect matching between ``A \\ B`` and ``B \\ A`` (edge
    ``(u, v)`` iff ``B + u - v`` is independent) by augmenting paths, scanning
    both sides in id order.
    """
    a, b = frozenset(a), frozenset(b)
    if len(a) != len(b):
        raise InvalidSpecError("exchange bijection needs two bases of equal size")
    bmask = to_mask(b)
    left = sorted(a - b)
    right = sorted(b - a)
    adj = {
        u: [v for v in right if matroid.is_independent_mask((bmask | (1 << u)) & ~(1 << v))]
        for u in left
    }
    owner: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        # a free partner first keeps the matching in id order whenever possible
        for v in adj[u]:
            if v not in owner:
                owner[v] = u
                return True
        for v in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if augment(owner[v], seen):
                owner[v] = u
                return True
        return False

    for u in left:
        if not augment(u, set()):
            raise InvariantViolation(f"no perfect exchange matching: element {u} cannot be placed")
    g = {u: u for u in a & b}
    g.update({u: v for v, u in owner.items()})
    return g


def extend_with_dummies(function: SetFunction, matroid: Matroid) -> DummyExtendedInstance:
    """Append ``2k`` value-free dummy elements so every independent set pads to a base."""
    if function.n != matroid.n:
        raise InvalidSpecError("function and matroid ground sets differ")
    k = rank_of(matroid)
    if k < 1:
        raise InvalidSpecError("dummy extension needs a matroid of rank >= 1")
    return DummyExtendedInstance(
        function=DummyExtendedFunction(function, 2 * k),
        matroid=DummyExtendedMatroid(matroid, k),
        n=matroid.n,
        k=k,
    )
