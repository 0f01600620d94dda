"""Brute-force ground truth: constrained optimum by enumeration and ratio verdicts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Protocol

import numpy as np

from .core import MAX_EXHAUSTIVE_N, SetFunction, mask_elements
from .errors import ResourceLimitError
from .knapsack_solver import KnapsackConstraint
from .matroid import PartitionMatroid, UniformMatroid
from .packing_solver import PackingConstraint


class Constraint(Protocol):
    def is_feasible(self, subset) -> bool: ...

    def is_feasible_mask(self, mask: int) -> bool: ...


@dataclass(frozen=True)
class ExactResult:
    opt_set: frozenset[int]
    opt_value: float
    enumerated: int


def _check_size(n: int) -> None:
    if n > MAX_EXHAUSTIVE_N:
        raise ResourceLimitError(f"brute force limited to n <= {MAX_EXHAUSTIVE_N}, got {n}")


def _popcount(masks: np.ndarray, n: int) -> np.ndarray:
    count = np.zeros(masks.shape, dtype=np.int64)
    for u in range(n):
        count += (masks >> u) & 1
    return count


def _linear_rows_ok(masks: np.ndarray, n: int, rows, caps, exact_rows, exact_caps) -> np.ndarray:
    """``row · x_S <= cap`` for every row, decided in floats and re-checked exactly near the boundary."""
    ok = np.ones(masks.shape, dtype=bool)
    for row, cap, erow, ecap in zip(rows, caps, exact_rows, exact_caps):
        load = np.zeros(masks.shape, dtype=float)
        for u in range(n):
            if row[u]:
                load += row[u] * ((masks >> u) & 1)
        slack = 1e-9 * max(1.0, abs(cap))
        ok &= load <= cap + slack
        close = np.nonzero(ok & (np.abs(load - cap) <= slack))[0]
        for idx in close:
            members = mask_elements(int(masks[idx]))
            if sum((erow[u] for u in members), Fraction(0)) > ecap:
                ok[idx] = False
    return ok


def feasible_masks(constraint: Constraint, n: int) -> np.ndarray:
    """All feasible subset masks of ``0..n-1`` in increasing order."""
    _check_size(n)
    masks = np.arange(1 << n, dtype=np.int64)
    if isinstance(constraint, UniformMatroid):
        ok = _popcount(masks, n) <= constraint.k
    elif isinstance(constraint, PartitionMatroid):
        ok = np.ones(masks.shape, dtype=bool)
        for block, cap in zip(constraint.blocks, constraint.caps):
            count = np.zeros(masks.shape, dtype=np.int64)
            for u in block:
                count += (masks >> u) & 1
            ok &= count <= cap
    elif isinstance(constraint, KnapsackConstraint):
        ok = _linear_rows_ok(
            masks, n, [constraint.costs], [constraint.budget],
            [[constraint.exact_cost(u) for u in range(n)]], [constraint.exact_budget],
        )
    elif isinstance(constraint, PackingConstraint):
        ok = _linear_rows_ok(masks, n, constraint.A, constraint.b, constraint._exact_a, constraint._exact_b)
    else:
        ok = np.fromiter((constraint.is_feasible_mask(int(m)) for m in masks), dtype=bool, count=masks.size)
    return masks[ok]


def brute_force_opt(f: SetFunction, constraint: Constraint, n: int | None = None) -> ExactResult:
    """Maximum of ``f`` over feasible subsets; ties go to the lowest bitmask."""
    n = f.n if n is None else n
    masks = feasible_masks(constraint, n)
    vals = f.value_many(masks)
    best = int(np.argmax(vals))
    return ExactResult(frozenset(mask_elements(int(masks[best]))), float(vals[best]), int(masks.size))


def brute_force_opt_reversed(f: SetFunction, constraint: Constraint, n: int | None = None) -> ExactResult:
    """Second enumerator for cross-checking :func:`brute_force_opt`.

    Walks masks from the full set down, uses only the constraint's scalar
    feasibility test and single-set queries, and lets later (smaller) masks
    win ties so both routines agree on the tie-break.
    """
    n = f.n if n is None else n
    _check_size(n)
    best_mask, best_val, count = None, None, 0
    for mask in range((1 << n) - 1, -1, -1):
        subset = [u for u in range(n) if mask >> u & 1]
        if not constraint.is_feasible(subset):
            continue
        count += 1
        val = f.value(subset)
        if best_val is None or val >= best_val:
            best_mask, best_val = mask, val
    return ExactResult(frozenset(mask_elements(best_mask)), float(best_val), count)


def ratio_verdict(alg_value: float, opt_value: float, bound: float, tol: float = 1e-9) -> bool:
    """``alg >= bound * opt - tol``; with ``opt == 0`` this reduces to ``alg >= -tol``."""
    if opt_value == 0:
        return alg_value >= -tol
    return alg_value >= bound * opt_value - tol
