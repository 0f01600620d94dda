"""Algorithm dispatch, run records and bound verification shared by the CLI and the tests."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

from .core import SetFunction, to_mask
from .errors import InvalidSpecError
from .exact import brute_force_opt, feasible_masks, ratio_verdict
from .instance import Instance, is_matroid
from .knapsack_solver import (
    KnapsackConstraint,
    TieBreak,
    enumeration_wrapper,
    threshold_twin_greedy,
    twin_greedy,
)
from .matroid import rank_of
from .matroid_solver import derandomized_greedy, matroid_guarantee, random_greedy
from .packing_solver import (
    USM_EXHAUSTIVE,
    PackingConstraint,
    bicriteria_factor,
    multiplicative_updates,
    mu_precondition,
    packing_main,
)

MATROID_ALGOS = ("random-greedy", "derand-greedy")
KNAPSACK_ALGOS = ("twin", "threshold-twin", "enum-twin", "enum-threshold-twin")
PACKING_ALGOS = ("mult-updates", "packing")
ALGORITHMS = MATROID_ALGOS + KNAPSACK_ALGOS + PACKING_ALGOS

CSV_COLUMNS = ("instance", "algo", "epsilon", "tie_break", "seed", "value", "opt_value", "ratio", "queries", "ms", "feasible")


class UsageError(InvalidSpecError):
    """The requested algorithm does not apply to the instance."""


@dataclass
class RunParams:
    epsilon: float = 0.1
    tie_break: str = TieBreak.LOWEST_ID.value
    seed: int = 0
    usm: str = USM_EXHAUSTIVE


@dataclass
class RunRecord:
    instance: str
    algo: str
    epsilon: float | None
    tie_break: str | None
    seed: int | None
    value: float
    opt_value: float | None
    ratio: float | None
    queries: int
    ms: float | None
    feasible: bool
    solution: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)

    def csv_row(self) -> list[str]:
        row = []
        for name in CSV_COLUMNS:
            v = getattr(self, name)
            if v is None:
                row.append("")
            elif isinstance(v, bool):
                row.append("true" if v else "false")
            elif isinstance(v, float):
                row.append(repr(v))
            else:
                row.append(str(v))
        return row


@dataclass
class Outcome:
    """Raw solver output kept for verification."""

    solution: frozenset[int]
    value: float
    queries: int
    detail: object


def check_compatible(algo: str, instance: Instance) -> None:
    if algo not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algo!r}")
    constraint = instance.constraint
    if algo in MATROID_ALGOS and not is_matroid(constraint):
        raise UsageError(f"{algo} needs a matroid constraint, instance has {instance.constraint_kind}")
    if algo in KNAPSACK_ALGOS and not isinstance(constraint, KnapsackConstraint):
        raise UsageError(f"{algo} needs a knapsack constraint, instance has {instance.constraint_kind}")
    if algo in PACKING_ALGOS and not isinstance(constraint, PackingConstraint):
        raise UsageError(f"{algo} needs a packing constraint, instance has {instance.constraint_kind}")


def _uses_epsilon(algo: str) -> bool:
    return algo in ("threshold-twin", "enum-threshold-twin") or algo in PACKING_ALGOS


def _uses_tie_break(algo: str) -> bool:
    return algo in KNAPSACK_ALGOS


def execute(f: SetFunction, instance: Instance, algo: str, params: RunParams) -> Outcome:
    check_compatible(algo, instance)
    c = instance.constraint
    eps, tie = params.epsilon, params.tie_break
    if algo == "random-greedy":
        r = random_greedy(f, c, params.seed)
        return Outcome(r.solution, r.value, r.queries, r)
    if algo == "derand-greedy":
        r = derandomized_greedy(f, c)
        return Outcome(r.solution, r.value, r.queries, r)
    if algo == "twin":
        r = twin_greedy(f, c, tie)
        return Outcome(r.solution, r.value, r.queries, r)
    if algo == "threshold-twin":
        r = threshold_twin_greedy(f, c, eps, tie)
        return Outcome(r.solution, r.value, r.queries, r)
    if algo in ("enum-twin", "enum-threshold-twin"):
        variant = "plain" if algo == "enum-twin" else "threshold"
        r = enumeration_wrapper(f, c, variant, eps, tie)
        return Outcome(r.solution, r.value, r.queries, r)
    if algo == "mult-updates":
        lam = math.exp(eps * c.width())
        r = multiplicative_updates(f, c, lam)
        return Outcome(r.solution, r.value, r.queries, r)
    r = packing_main(f, c, eps, params.usm)
    return Outcome(r.solution, r.value, r.queries, r)


def run(
    instance: Instance,
    algo: str,
    params: RunParams,
    name: str = "",
    opt_value: float | None = None,
    timing: bool = True,
) -> tuple[RunRecord, Outcome]:
    f = instance.oracle()
    t0 = time.perf_counter()
    out = execute(f, instance, algo, params)
    ms = (time.perf_counter() - t0) * 1000.0 if timing else None
    ratio = None
    if opt_value is not None:
        ratio = out.value / opt_value if opt_value > 0 else 1.0
    record = RunRecord(
        instance=name,
        algo=algo,
        epsilon=params.epsilon if _uses_epsilon(algo) else None,
        tie_break=params.tie_break if _uses_tie_break(algo) else None,
        seed=params.seed if algo == "random-greedy" else None,
        value=out.value,
        opt_value=opt_value,
        ratio=ratio,
        queries=out.queries,
        ms=None if ms is None else round(ms, 3),
        feasible=instance.constraint.is_feasible(sorted(out.solution)),
        solution=sorted(out.solution),
    )
    return record, out


@dataclass
class Check:
    name: str
    lhs: float
    bound: float
    passed: bool


@dataclass
class Verification:
    record: RunRecord
    checks: list[Check]
    status: str  # "pass" | "fail" | "precondition-unmet" | "unchecked"
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "note": self.note,
            "checks": [asdict(c) for c in self.checks],
            "record": self.record.to_json(),
        }


def _best_union(f: SetFunction, instance: Instance, solution: frozenset[int]) -> float:
    """``max_C f(S ∪ C)`` over feasible ``C``."""
    masks = feasible_masks(instance.constraint, instance.n)
    return float(f.value_many(masks | to_mask(solution)).max())


def verify(instance: Instance, algo: str, params: RunParams, name: str = "", tol: float = 1e-9) -> Verification:
    """Run ``algo`` and compare against the exact optimum with the matching guarantee."""
    check_compatible(algo, instance)
    opt = brute_force_opt(instance.oracle(), instance.constraint, instance.n)
    record, out = run(instance, algo, params, name, opt.opt_value)
    checks: list[Check] = []
    eps = params.epsilon

    def add(label: str, lhs: float, bound: float) -> None:
        checks.append(Check(label, lhs, bound, ratio_verdict(lhs, opt.opt_value, bound, tol)))

    note = ""
    if algo == "random-greedy":
        status = "unchecked"
        note = "guarantee holds in expectation only"
    else:
        if algo == "derand-greedy":
            add("value", out.value, matroid_guarantee(rank_of(instance.constraint)))
        elif algo == "twin":
            add("sum", out.detail.value_sum, 0.5)
            add("value", out.value, 0.25)
        elif algo == "threshold-twin":
            add("sum", out.detail.value_sum, (1 - 2 * eps) / (2 + eps))
        elif algo == "enum-twin":
            add("value", out.value, 0.25)
        elif algo == "enum-threshold-twin":
            add("value", out.value, 0.25 - eps)
        elif algo == "mult-updates":
            if not mu_precondition(instance.constraint.width(), instance.constraint.m, eps):
                status, note = "precondition-unmet", "width below max(ln m/eps^2, 1/eps)"
                return Verification(record, checks, status, note)
            best_union = _best_union(instance.oracle(), instance, out.solution)
            factor = bicriteria_factor(eps)
            checks.append(Check("bicriteria", out.value, factor, out.value >= factor * best_union - tol))
        else:
            detail = out.detail
            if not detail.precondition_met:
                return Verification(record, checks, "precondition-unmet", "width below max(9 ln m/eps^2, 3/eps)")
            add("value", out.value, detail.bound)
        # plain twin variants may overshoot the budget by design
        if algo not in ("twin", "threshold-twin"):
            checks.append(Check("feasible", float(record.feasible), 1.0, record.feasible))
        status = "pass" if all(c.passed for c in checks) else "fail"
    return Verification(record, checks, status, note)
