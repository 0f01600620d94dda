"""Exact linear feasibility systems and extreme-point recovery.

Only feasibility matters here: given any feasible ``x >= 0`` the solver walks
to a vertex of ``{x >= 0 : rows hold}``.  All arithmetic is done with
:class:`fractions.Fraction` so tightness tests are exact.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from numbers import Rational, Real

from .errors import InvalidSpecError

LE = "<="
GE = ">="
EQ = "=="
_RELATIONS = (LE, GE, EQ)


def as_fraction(value: Real) -> Fraction:
    """Exact rational value of an int, Fraction or binary float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    return Fraction(float(value))


@dataclass
class Constraint:
    """``sum_j coeffs[j] * x[j]  (relation)  rhs`` with sparse coefficients."""

    coeffs: dict[int, Fraction]
    relation: str
    rhs: Fraction

    def activity(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * x[j] for j, c in self.coeffs.items()), Fraction(0))

    def holds(self, x: Sequence[Fraction]) -> bool:
        lhs = self.activity(x)
        if self.relation == LE:
            return lhs <= self.rhs
        if self.relation == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass
class LinearSystem:
    var_count: int
    constraints: list[Constraint] = field(default_factory=list)

    def add(self, coeffs: Mapping[int, Real] | Sequence[Real], relation: str, rhs: Real) -> Constraint:
        if relation not in _RELATIONS:
            raise InvalidSpecError(f"relation must be one of {_RELATIONS}, got {relation!r}")
        if isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            if len(coeffs) != self.var_count:
                raise InvalidSpecError(f"coefficient vector has length {len(coeffs)}, expected {self.var_count}")
            items = enumerate(coeffs)
        sparse = {}
        for j, c in items:
            if not 0 <= j < self.var_count:
                raise InvalidSpecError(f"variable index {j} out of range")
            c = as_fraction(c)
            if c:
                sparse[j] = sparse.get(j, Fraction(0)) + c
        row = Constraint({j: c for j, c in sparse.items() if c}, relation, as_fraction(rhs))
        self.constraints.append(row)
        return row

    def dense_rows(self) -> list[list[Fraction]]:
        return [[row.coeffs.get(j, Fraction(0)) for j in range(self.var_count)] for row in self.constraints]


def _check_dim(system: LinearSystem, x: Sequence) -> None:
    if len(x) != system.var_count:
        raise InvalidSpecError(f"point has dimension {len(x)}, system has {system.var_count} variables")


def verify_feasible(system: LinearSystem, x: Sequence[Real]) -> bool:
    _check_dim(system, x)
    xs = [as_fraction(v) for v in x]
    return all(v >= 0 for v in xs) and all(row.holds(xs) for row in system.constraints)


def active_rows(system: LinearSystem, x: Sequence[Real]) -> list[int]:
    xs = [as_fraction(v) for v in x]
    return [r for r, row in enumerate(system.constraints) if row.activity(xs) == row.rhs]


def _integer_columns(system: LinearSystem) -> list[dict[int, int]]:
    """Columns of the row-scaled integer matrix.

    Scaling a row by a positive constant leaves the null space of any row
    subset unchanged, so the direction search can run on integers.
    """
    columns: list[dict[int, int]] = [{} for _ in range(system.var_count)]
    for r, row in enumerate(system.constraints):
        scale = 1
        for c in row.coeffs.values():
            scale = lcm(scale, c.denominator)
        for j, c in row.coeffs.items():
            columns[j][r] = c.numerator * (scale // c.denominator)
    return columns


def _reduce_gcd(vec: dict[int, int], combo: dict[int, int]) -> None:
    g = 0
    for v in vec.values():
        g = gcd(g, v)
        if g == 1:
            return
    for v in combo.values():
        g = gcd(g, v)
        if g == 1:
            return
    if g > 1:
        for r in vec:
            vec[r] //= g
        for c in combo:
            combo[c] //= g


def _null_direction(
    columns: list[dict[int, int]], tight: set[int], positive: list[int]
) -> dict[int, int] | None:
    """Nonzero integer ``d`` supported on ``positive`` with ``A_tight d = 0``, or None.

    Columns are eliminated fraction-free one at a time in index order; the
    first column that reduces to zero yields the dependency.
    """
    basis: list[tuple[int, int, dict[int, int], dict[int, int]]] = []
    for j in positive:
        vec = {r: c for r, c in columns[j].items() if r in tight}
        combo = {j: 1}
        for pivot, pval, bvec, bcombo in basis:
            factor = vec.get(pivot)
            if not factor:
                continue
            vec = {r: pval * c for r, c in vec.items()}
            combo = {col: pval * c for col, c in combo.items()}
            for r, c in bvec.items():
                val = vec.get(r, 0) - factor * c
                if val:
                    vec[r] = val
                else:
                    vec.pop(r, None)
            for col, c in bcombo.items():
                val = combo.get(col, 0) - factor * c
                if val:
                    combo[col] = val
                else:
                    combo.pop(col, None)
            _reduce_gcd(vec, combo)
        if not vec:
            return combo
        pivot = min(vec)
        basis.append((pivot, vec[pivot], vec, combo))
    return None


def _max_step(
    system: LinearSystem,
    x: list[Fraction],
    act: list[Fraction],
    d: dict[int, Fraction],
    ad: dict[int, Fraction],
) -> Fraction | None:
    """Largest ``t`` keeping ``x + t d`` feasible; None if unbounded."""
    best = None
    for j, dj in d.items():
        if dj < 0:
            t = x[j] / -dj
            if best is None or t < best:
                best = t
    for r, v in ad.items():
        row = system.constraints[r]
        if row.relation == LE and v > 0:
            t = (row.rhs - act[r]) / v
        elif row.relation == GE and v < 0:
            t = (act[r] - row.rhs) / -v
        else:
            continue
        if best is None or t < best:
            best = t
    return best


def to_extreme_point(system: LinearSystem, x_feasible: Sequence[Real]) -> list[Fraction]:
    """Walk from a feasible point to a vertex of the feasible region.

    Each step takes a direction in the null space of the active rows restricted
    to the positive coordinates (normalised so its lowest-index entry is
    positive), tries ``+d`` first, and moves to the first newly tight
    constraint.  The active rank grows by one per step, so at most
    ``var_count`` steps are taken.  At the result the active constraints have
    full rank and at most ``len(constraints)`` coordinates are nonzero.
    """
    if not verify_feasible(system, x_feasible):
        raise InvalidSpecError("starting point is not feasible")
    x = [as_fraction(v) for v in x_feasible]
    rows = system.constraints
    columns: list[dict[int, Fraction]] = [{} for _ in range(system.var_count)]
    for r, row in enumerate(rows):
        for j, c in row.coeffs.items():
            columns[j][r] = c
    int_columns = _integer_columns(system)
    act = [row.activity(x) for row in rows]

    for _ in range(system.var_count + 1):
        tight = {r for r, row in enumerate(rows) if act[r] == row.rhs}
        positive = [j for j in range(system.var_count) if x[j] > 0]
        direction = _null_direction(int_columns, tight, positive)
        if direction is None:
            return x
        sign = 1 if direction[min(direction)] > 0 else -1
        d = {j: Fraction(sign * v) for j, v in direction.items()}
        ad: dict[int, Fraction] = {}
        for j, dj in d.items():
            for r, c in columns[j].items():
                ad[r] = ad.get(r, 0) + c * dj
        t = _max_step(system, x, act, d, ad)
        if t is None:
            d = {j: -v for j, v in d.items()}
            ad = {r: -v for r, v in ad.items()}
            t = _max_step(system, x, act, d, ad)
        for j, dj in d.items():
            x[j] += t * dj
        for r, v in ad.items():
            act[r] += t * v
    raise AssertionError("extreme-point walk exceeded var_count steps")  # pragma: no cover


def support_size(x: Sequence[Fraction]) -> int:
    return sum(1 for v in x if v != 0)
