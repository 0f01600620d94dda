"""Set-function oracles, subset helpers, instance generators and exhaustive checks.

Subsets are passed around either as collections of integer ids or as bitmasks
(bit ``u`` set iff element ``u`` is present).  Python integers are unbounded,
so the bitmask form works for every ``n``; hot loops use it directly.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from operator import index

import numpy as np

from .errors import InvalidElementError, InvalidSpecError, ResourceLimitError

#: Largest ground set the exhaustive routines will enumerate.
MAX_EXHAUSTIVE_N = 20

#: Absolute tolerance used by every property checker.
CHECK_TOL = 1e-9


def to_mask(subset: Iterable[int]) -> int:
    mask = 0
    for u in subset:
        # index() accepts numpy integers as well as int
        mask |= 1 << index(u)
    return mask


def from_mask(mask: int) -> frozenset[int]:
    out = []
    u = 0
    while mask:
        if mask & 1:
            out.append(u)
        mask >>= 1
        u += 1
    return frozenset(out)


def mask_elements(mask: int) -> list[int]:
    """Ids present in ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _require_exhaustive(n: int) -> None:
    if n > MAX_EXHAUSTIVE_N:
        raise ResourceLimitError(f"exhaustive enumeration limited to n <= {MAX_EXHAUSTIVE_N}, got {n}")


@dataclass(frozen=True)
class GroundSet:
    n: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidSpecError("ground set needs at least one element")
        if self.labels is not None and len(self.labels) != self.n:
            raise InvalidSpecError("labels must name every element exactly once")

    def __iter__(self):
        return iter(range(self.n))

    def __len__(self):
        return self.n


class SetFunction(ABC):
    """Value oracle for ``f: 2^N -> R`` with query accounting.

    Every call of :meth:`value` or :meth:`value_mask` counts as one query.
    Instances are meant to be owned by a single solver run; the counter is
    not synchronised.
    """

    def __init__(self, n: int):
        if n < 0:
            raise InvalidSpecError("n must be non-negative")
        self.n = n
        self._queries = 0

    @property
    def query_count(self) -> int:
        return self._queries

    def reset_queries(self) -> None:
        self._queries = 0

    def value(self, subset: Iterable[int]) -> float:
        return self.value_mask(to_mask(subset))

    __call__ = value

    def value_mask(self, mask: int) -> float:
        if mask >> self.n:
            raise InvalidElementError(f"subset mask {mask:#x} has ids outside 0..{self.n - 1}")
        self._queries += 1
        return self._evaluate(mask)

    def value_many(self, masks: Sequence[int]) -> np.ndarray:
        """Evaluate a batch of masks; counts one query per mask."""
        return np.array([self.value_mask(int(m)) for m in masks], dtype=float)

    @abstractmethod
    def _evaluate(self, mask: int) -> float: ...


# ---------------------------------------------------------------------------
# Concrete function families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutFunctionSpec:
    vertices: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        for u, v, w in self.edges:
            if u == v:
                raise InvalidSpecError(f"self-loop on vertex {u}")
            if not (0 <= u < self.vertices and 0 <= v < self.vertices):
                raise InvalidSpecError(f"edge ({u}, {v}) out of range")
            if w < 0:
                raise InvalidSpecError("edge weights must be non-negative")


class CutFunction(SetFunction):
    """Weight of the edges with exactly one endpoint in ``S``."""

    def __init__(self, spec: CutFunctionSpec):
        super().__init__(spec.vertices)
        self.spec = spec
        self._edges = [(1 << u, 1 << v, float(w)) for u, v, w in spec.edges]
        self._eu = np.array([u for u, _, _ in spec.edges], dtype=np.int64)
        self._ev = np.array([v for _, v, _ in spec.edges], dtype=np.int64)
        self._ew = np.array([w for _, _, w in spec.edges], dtype=float)

    def _evaluate(self, mask: int) -> float:
        total = 0.0
        for a, b, w in self._edges:
            if (not mask & a) != (not mask & b):
                total += w
        return total

    def value_many(self, masks: Sequence[int]) -> np.ndarray:
        m = np.asarray(masks, dtype=np.int64)
        if m.size and int(m.max()) >> self.n:
            raise InvalidElementError("subset mask out of range")
        self._queries += int(m.size)
        out = np.zeros(m.shape, dtype=float)
        for u, v, w in zip(self._eu, self._ev, self._ew):
            out += w * (((m >> u) ^ (m >> v)) & 1)
        return out


@dataclass(frozen=True)
class ExplicitTableSpec:
    n: int
    values: tuple[float, ...]

    def __post_init__(self):
        if not 0 <= self.n <= MAX_EXHAUSTIVE_N:
            raise InvalidSpecError(f"table functions support n <= {MAX_EXHAUSTIVE_N}")
        if len(self.values) != 1 << self.n:
            raise InvalidSpecError(f"table needs 2^{self.n} values, got {len(self.values)}")


class TableFunction(SetFunction):
    def __init__(self, spec: ExplicitTableSpec):
        super().__init__(spec.n)
        self.spec = spec
        self._values = np.asarray(spec.values, dtype=float)

    def _evaluate(self, mask: int) -> float:
        return float(self._values[mask])

    def value_many(self, masks: Sequence[int]) -> np.ndarray:
        m = np.asarray(masks, dtype=np.int64)
        if m.size and (int(m.max()) >> self.n or int(m.min()) < 0):
            raise InvalidElementError("subset mask out of range")
        self._queries += int(m.size)
        return self._values[m]


@dataclass(frozen=True)
class TightExampleSpec:
    n: int
    epsilon: float
    u1: int = 0
    u2: int = 1

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise InvalidSpecError("tight example needs an even n >= 4")
        if not self.epsilon > 0:
            raise InvalidSpecError("epsilon must be positive")
        if self.u1 == self.u2 or not (0 <= self.u1 < self.n and 0 <= self.u2 < self.n):
            raise InvalidSpecError("u1 and u2 must be two distinct ids")


class TightExample(SetFunction):
    """Instance on which twin greedy can be driven down to a quarter of OPT.

    ``f(S) = 0`` if both distinguished elements are in ``S``, ``|T|`` if
    neither is, and ``1 + eps + |T|/2`` otherwise, with ``T`` the rest of ``S``.
    """

    def __init__(self, spec: TightExampleSpec):
        super().__init__(spec.n)
        self.spec = spec
        self._b1 = 1 << spec.u1
        self._b2 = 1 << spec.u2

    def _evaluate(self, mask: int) -> float:
        has1 = bool(mask & self._b1)
        has2 = bool(mask & self._b2)
        t = (mask & ~(self._b1 | self._b2)).bit_count()
        if has1 and has2:
            return 0.0
        if not has1 and not has2:
            return float(t)
        return 1.0 + self.spec.epsilon + 0.5 * t


class ConditionedFunction(SetFunction):
    """``g(S) = f(S | E) = f(S ∪ E) - f(E)``; each query costs one query of ``f``."""

    def __init__(self, base: SetFunction, condition: Iterable[int], base_value: float | None = None):
        super().__init__(base.n)
        self.base = base
        self.condition = frozenset(condition)
        self._cmask = to_mask(self.condition)
        self.offset = base.value_mask(self._cmask) if base_value is None else base_value

    @property
    def query_count(self) -> int:
        return self.base.query_count

    def reset_queries(self) -> None:
        self.base.reset_queries()

    def value_mask(self, mask: int) -> float:
        return self.base.value_mask(mask | self._cmask) - self.offset

    def _evaluate(self, mask: int) -> float:  # pragma: no cover - value_mask bypasses it
        raise NotImplementedError


def build_function(spec) -> SetFunction:
    if isinstance(spec, CutFunctionSpec):
        return CutFunction(spec)
    if isinstance(spec, ExplicitTableSpec):
        return TableFunction(spec)
    if isinstance(spec, TightExampleSpec):
        return TightExample(spec)
    raise InvalidSpecError(f"unknown function spec {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def marginal(oracle: SetFunction, u: int, subset: Iterable[int]) -> float:
    """``f(u | S) = f(S + u) - f(S)``; always two queries."""
    if not 0 <= u < oracle.n:
        raise InvalidElementError(f"element {u} outside 0..{oracle.n - 1}")
    mask = to_mask(subset)
    return oracle.value_mask(mask | (1 << u)) - oracle.value_mask(mask)


def all_values(oracle: SetFunction, n: int | None = None) -> np.ndarray:
    """Values of every subset, indexed by bitmask."""
    n = oracle.n if n is None else n
    _require_exhaustive(n)
    return oracle.value_many(np.arange(1 << n, dtype=np.int64))


def check_submodular(oracle: SetFunction, n: int | None = None, tol: float = CHECK_TOL) -> bool:
    """Exhaustive submodularity test.

    Uses the pairwise form ``f(S+u) + f(S+v) >= f(S+u+v) + f(S)`` for all
    ``S`` and ``u, v`` outside ``S``, which is equivalent to diminishing
    marginal returns over all ``S ⊆ T``.
    """
    n = oracle.n if n is None else n
    vals = all_values(oracle, n)
    masks = np.arange(1 << n, dtype=np.int64)
    for u in range(n):
        for v in range(u + 1, n):
            bu, bv = 1 << u, 1 << v
            base = masks[(masks & (bu | bv)) == 0]
            lhs = vals[base | bu] + vals[base | bv]
            rhs = vals[base | bu | bv] + vals[base]
            if np.any(lhs < rhs - tol):
                return False
    return True


def check_nonnegative(oracle: SetFunction, n: int | None = None, tol: float = CHECK_TOL) -> bool:
    return bool(np.all(all_values(oracle, n) >= -tol))


def make_tight_example(n: int, epsilon: float) -> TightExample:
    return TightExample(TightExampleSpec(n=n, epsilon=epsilon))


def random_cut_instance(
    n: int,
    edge_prob: float = 0.5,
    weight_range: tuple[float, float] = (0.0, 1.0),
    rng_seed: int | None = 0,
) -> CutFunctionSpec:
    if n < 2:
        raise InvalidSpecError("a cut instance needs at least two vertices")
    if not 0 < edge_prob <= 1:
        raise InvalidSpecError("edge_prob must lie in (0, 1]")
    lo, hi = weight_range
    if lo < 0 or hi < lo:
        raise InvalidSpecError("weight_range must satisfy 0 <= low <= high")
    rng = np.random.default_rng(rng_seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                edges.append((u, v, float(rng.uniform(lo, hi))))
    return CutFunctionSpec(vertices=n, edges=tuple(edges))


def random_table_instance(n: int, rng_seed: int | None = 0, terms: int = 3) -> ExplicitTableSpec:
    """Random non-negative, non-monotone submodular table.

    Sum of truncated modular terms ``min(a·x_S, cap)`` plus a signed modular
    part, shifted so the minimum value is zero.  Concave functions of
    non-negative modular functions are submodular, so the sum is too.
    """
    if not 1 <= n <= MAX_EXHAUSTIVE_N:
        raise InvalidSpecError(f"table instances need 1 <= n <= {MAX_EXHAUSTIVE_N}")
    rng = np.random.default_rng(rng_seed)
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    vals = np.zeros(1 << n)
    for _ in range(terms):
        a = rng.uniform(0.0, 1.0, size=n)
        cap = rng.uniform(0.2, 0.6) * a.sum()
        vals += np.minimum(bits @ a, cap)
    vals += bits @ rng.uniform(-0.6, 0.4, size=n)
    vals -= vals.min()
    return ExplicitTableSpec(n=n, values=tuple(float(v) for v in vals))
