"""Multiplicative-updates greedy, unconstrained maximisation subroutines and the packing main loop."""

from __future__ import annotations

import math
from collections.abc import Collection, Iterable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import MAX_EXHAUSTIVE_N, SetFunction, mask_elements, to_mask
from .errors import InvalidSpecError, ResourceLimitError

USM_DOUBLE_GREEDY = "double-greedy"
USM_EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class PackingConstraint:
    """``A x_S <= b`` with ``A`` in ``[0, 1]^{m x n}`` and ``b >= 1``."""

    A: tuple[tuple[float, ...], ...]
    b: tuple[float, ...]

    def __post_init__(self):
        if not self.A:
            raise InvalidSpecError("packing constraint needs at least one row")
        n = len(self.A[0])
        if any(len(row) != n for row in self.A):
            raise InvalidSpecError("rows of A must all have the same length")
        if len(self.b) != len(self.A):
            raise InvalidSpecError("b needs one entry per row of A")
        if not all(0.0 <= a <= 1.0 for row in self.A for a in row):
            raise InvalidSpecError("entries of A must lie in [0, 1]")
        if not all(math.isfinite(v) and v >= 1.0 for v in self.b):
            raise InvalidSpecError("entries of b must be finite and at least 1")
        object.__setattr__(self, "_exact_a", tuple(tuple(Fraction(a) for a in row) for row in self.A))
        object.__setattr__(self, "_exact_b", tuple(Fraction(v) for v in self.b))

    @classmethod
    def of(cls, A: Iterable[Iterable[float]], b: Iterable[float]) -> "PackingConstraint":
        return cls(tuple(tuple(float(a) for a in row) for row in A), tuple(float(v) for v in b))

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return len(self.A[0])

    def loads(self, subset: Iterable[int]) -> list[Fraction]:
        """Exact ``(A x_S)_i`` for every row."""
        members = list(subset)
        return [sum((row[j] for j in members), Fraction(0)) for row in self._exact_a]

    def is_feasible(self, subset: Collection[int]) -> bool:
        return all(load <= bi for load, bi in zip(self.loads(subset), self._exact_b))

    def is_feasible_mask(self, mask: int) -> bool:
        return self.is_feasible(mask_elements(mask))

    def width(self) -> float:
        """``min b_i / A_ij`` over positive entries; ``inf`` when ``A`` is all zeros."""
        best = math.inf
        for row, bi in zip(self.A, self.b):
            for a in row:
                if a > 0:
                    best = min(best, bi / a)
        return best

    def to_json(self) -> dict:
        return {"kind": "packing", "A": [list(row) for row in self.A], "b": list(self.b)}


def mu_precondition(width: float, m: int, epsilon: float) -> bool:
    """``W >= max(ln m / eps^2, 1 / eps)``, under which ``lambda = e^{eps W}`` is analysed."""
    return width >= max(math.log(m) / epsilon**2, 1.0 / epsilon)


def main_precondition(width: float, m: int, epsilon: float) -> bool:
    return width >= max(9.0 * math.log(m) / epsilon**2, 3.0 / epsilon)


def bicriteria_factor(epsilon: float) -> float:
    return 0.5 * (1.0 - 3.0 * epsilon)


def main_bound(epsilon: float, usm: str) -> float:
    """Guaranteed ratio of :func:`packing_main`; weaker with the one-third double greedy."""
    if usm == USM_EXHAUSTIVE:
        return (1.0 - epsilon) / 6.0
    if usm == USM_DOUBLE_GREEDY:
        return (1.0 - epsilon) / (7.0 - 3.0 * epsilon)
    raise InvalidSpecError(f"unknown usm {usm!r}")


@dataclass
class MUResult:
    solution: frozenset[int]
    value: float
    order: tuple[int, ...]
    trimmed: bool
    betas: list[float]
    queries: int
    lam: float


def multiplicative_updates(
    f: SetFunction,
    packing: PackingConstraint,
    lam: float,
    elements: Iterable[int] | None = None,
) -> MUResult:
    """Greedy over a virtual knapsack whose costs ``sum_i A_ij w_i`` grow multiplicatively.

    ``b_i w_i`` equals ``lam`` raised to the exact relative load of row ``i``,
    so the loop test is evaluated from those loads: any row above capacity
    stops the loop without relying on rounding of the exponentials.
    """
    if not lam > 1:
        raise InvalidSpecError("lambda must exceed 1")
    if packing.n != f.n:
        raise InvalidSpecError("packing constraint and function ground sets differ")
    start = f.query_count
    A = np.asarray(packing.A, dtype=float)
    b = np.asarray(packing.b, dtype=float)
    exact_a = packing._exact_a
    exact_b = packing._exact_b
    m = packing.m
    remaining = list(range(f.n)) if elements is None else sorted(set(elements))

    w = 1.0 / b
    rel = [Fraction(0)] * m
    order: list[int] = []
    mask = 0
    value = f.value_mask(0)
    betas = [float(np.dot(b, w))]

    def keep_going() -> bool:
        if any(r > 1 for r in rel):
            return False
        return math.fsum(lam ** float(r) for r in rel) <= lam

    while remaining and keep_going():
        best_j, best_key, best_new = None, None, None
        for j in remaining:
            new = f.value_mask(mask | (1 << j))
            gain = new - value
            denom = float(np.dot(A[:, j], w))
            if denom > 0:
                key = (0, gain / denom)
            else:
                key = (1, 0.0) if gain > 0 else (-1, 0.0)
            if best_key is None or key > best_key:
                best_j, best_key, best_new = j, key, new
        gain = best_new - value
        if gain <= 0:
            break
        order.append(best_j)
        mask |= 1 << best_j
        value = best_new
        remaining.remove(best_j)
        for i in range(m):
            if exact_a[i][best_j]:
                rel[i] += exact_a[i][best_j] / exact_b[i]
                w[i] *= lam ** (A[i, best_j] / b[i])
        betas.append(math.fsum(lam ** float(r) for r in rel))

    trimmed = False
    if order and not packing.is_feasible(order):
        trimmed = True
        mask &= ~(1 << order[-1])
        value = f.value_mask(mask)
    return MUResult(frozenset(mask_elements(mask)), value, tuple(order), trimmed, betas, f.query_count - start, lam)


def usm_double_greedy(f: SetFunction, ground: Iterable[int]) -> frozenset[int]:
    """Deterministic double greedy: keep ``u`` iff adding it to ``X`` gains at least as much as dropping it from ``Y``."""
    x_mask = 0
    y_mask = to_mask(ground)
    fx = f.value_mask(x_mask)
    fy = f.value_mask(y_mask)
    for u in mask_elements(y_mask):
        bit = 1 << u
        fx_add = f.value_mask(x_mask | bit)
        fy_drop = f.value_mask(y_mask & ~bit)
        if fx_add - fx >= fy_drop - fy:
            x_mask |= bit
            fx = fx_add
        else:
            y_mask &= ~bit
            fy = fy_drop
    return frozenset(mask_elements(x_mask))


def usm_exhaustive(f: SetFunction, ground: Iterable[int]) -> frozenset[int]:
    """Exact maximiser over all subsets of ``ground``; ties go to the lowest bitmask."""
    elems = sorted(set(ground))
    if len(elems) > MAX_EXHAUSTIVE_N:
        raise ResourceLimitError(f"exhaustive maximisation limited to {MAX_EXHAUSTIVE_N} elements, got {len(elems)}")
    idx = np.arange(1 << len(elems), dtype=np.int64)
    masks = np.zeros_like(idx)
    for t, u in enumerate(elems):
        masks |= ((idx >> t) & 1) << u
    vals = f.value_many(masks)
    return frozenset(mask_elements(int(masks[int(np.argmax(vals))])))


_USM = {USM_DOUBLE_GREEDY: usm_double_greedy, USM_EXHAUSTIVE: usm_exhaustive}


@dataclass
class PackingResult:
    solution: frozenset[int]
    value: float
    s1: MUResult
    s2: MUResult
    s1_prime: frozenset[int]
    s1_prime_value: float
    lam: float
    width: float
    precondition_met: bool
    bound: float
    queries: int
    picked: str = field(default="s1")


def packing_main(
    f: SetFunction,
    packing: PackingConstraint,
    epsilon: float,
    usm: str = USM_EXHAUSTIVE,
) -> PackingResult:
    """Best of two multiplicative-updates passes and an unconstrained maximiser inside the first.

    Runs whether or not the width condition holds; the result reports it.
    """
    if not 0 < epsilon < 1:
        raise InvalidSpecError("epsilon must lie in (0, 1)")
    if usm not in _USM:
        raise InvalidSpecError(f"usm must be one of {sorted(_USM)}, got {usm!r}")
    start = f.query_count
    width = packing.width()
    lam = math.exp(epsilon * width / 3.0)
    s1 = multiplicative_updates(f, packing, lam)
    s2 = multiplicative_updates(f, packing, lam, [u for u in range(f.n) if u not in s1.solution])
    s1p = _USM[usm](f, s1.solution)
    s1p_value = f.value(s1p)
    candidates = [("s1", s1.solution, s1.value), ("s2", s2.solution, s2.value), ("s1_prime", s1p, s1p_value)]
    picked, solution, value = max(candidates, key=lambda c: c[2])
    return PackingResult(
        solution=solution,
        value=value,
        s1=s1,
        s2=s2,
        s1_prime=s1p,
        s1_prime_value=s1p_value,
        lam=lam,
        width=width,
        precondition_met=main_precondition(width, packing.m, epsilon),
        bound=main_bound(epsilon, usm),
        queries=f.query_count - start,
        picked=picked,
    )


def random_packing_instance(
    n: int,
    m: int,
    width: float,
    rng_seed: int | None = 0,
    density: float = 0.7,
) -> PackingConstraint:
    """Random ``A`` in ``[0, 1]`` with ``b_i = max(1, width * max_j A_ij)``, so the width is at least ``width``."""
    if n < 1 or m < 1:
        raise InvalidSpecError("packing instances need n >= 1 and m >= 1")
    if not width > 0:
        raise InvalidSpecError("width must be positive")
    rng = np.random.default_rng(rng_seed)
    A = rng.uniform(0.05, 1.0, size=(m, n)) * (rng.random((m, n)) < density)
    b = []
    for row in A:
        peak = float(row.max())
        bi = max(1.0, width * peak)
        while peak > 0 and bi / peak < width:
            bi = math.nextafter(bi, math.inf)
        b.append(bi)
    return PackingConstraint.of(A.tolist(), b)
