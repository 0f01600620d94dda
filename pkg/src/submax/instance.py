"""JSON instance files: ``{"n", "function": {...}, "constraint": {...}}``."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .core import (
    CutFunctionSpec,
    ExplicitTableSpec,
    SetFunction,
    TightExampleSpec,
    build_function,
    random_cut_instance,
    random_table_instance,
)
from .errors import InvalidSpecError
from .knapsack_solver import KnapsackConstraint
from .matroid import Matroid, PartitionMatroid, UniformMatroid
from .packing_solver import PackingConstraint, random_packing_instance

FunctionSpec = CutFunctionSpec | ExplicitTableSpec | TightExampleSpec
ConstraintSpec = UniformMatroid | PartitionMatroid | KnapsackConstraint | PackingConstraint


@dataclass(frozen=True)
class Instance:
    n: int
    function: FunctionSpec
    constraint: ConstraintSpec

    def oracle(self) -> SetFunction:
        """A fresh oracle with its own query counter."""
        return build_function(self.function)

    @property
    def constraint_kind(self) -> str:
        return self.constraint.to_json()["kind"]

    def to_json(self) -> dict:
        return {"n": self.n, "function": function_to_json(self.function), "constraint": self.constraint.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "Instance":
        try:
            n = int(data["n"])
            function = function_from_json(n, data["function"])
            constraint = constraint_from_json(n, data["constraint"])
        except (KeyError, TypeError) as exc:
            raise InvalidSpecError(f"malformed instance: {exc}") from exc
        if n < 1:
            raise InvalidSpecError("instance needs n >= 1")
        return cls(n, function, constraint)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def function_to_json(spec: FunctionSpec) -> dict[str, Any]:
    if isinstance(spec, CutFunctionSpec):
        return {"kind": "cut", "edges": [[u, v, w] for u, v, w in spec.edges]}
    if isinstance(spec, ExplicitTableSpec):
        return {"kind": "table", "values": list(spec.values)}
    if isinstance(spec, TightExampleSpec):
        return {"kind": "tight", "epsilon": spec.epsilon, "u1": spec.u1, "u2": spec.u2}
    raise InvalidSpecError(f"cannot serialise {type(spec).__name__}")


def function_from_json(n: int, data: dict) -> FunctionSpec:
    kind = data.get("kind")
    if kind == "cut":
        edges = tuple((int(u), int(v), float(w)) for u, v, w in data["edges"])
        return CutFunctionSpec(vertices=n, edges=edges)
    if kind == "table":
        return ExplicitTableSpec(n=n, values=tuple(float(v) for v in data["values"]))
    if kind == "tight":
        return TightExampleSpec(n=n, epsilon=float(data["epsilon"]), u1=int(data.get("u1", 0)), u2=int(data.get("u2", 1)))
    raise InvalidSpecError(f"unknown function kind {kind!r}")


def constraint_from_json(n: int, data: dict) -> ConstraintSpec:
    kind = data.get("kind")
    if kind == "uniform":
        return UniformMatroid(n, int(data["k"]))
    if kind == "partition":
        return PartitionMatroid.from_lists(n, data["blocks"], data["caps"])
    if kind == "knapsack":
        constraint = KnapsackConstraint.of(data["costs"], data["budget"])
    elif kind == "packing":
        constraint = PackingConstraint.of(data["A"], data["b"])
    else:
        raise InvalidSpecError(f"unknown constraint kind {kind!r}")
    if constraint.n != n:
        raise InvalidSpecError(f"{kind} constraint covers {constraint.n} elements, instance has {n}")
    return constraint


def load_instance(path: str | Path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidSpecError(f"{path}: not valid JSON ({exc})") from exc
    return Instance.from_json(data)


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(instance.dumps(), encoding="utf-8")


def is_matroid(constraint: ConstraintSpec) -> bool:
    return isinstance(constraint, Matroid)


# ---------------------------------------------------------------------------
# Seeded generators
# ---------------------------------------------------------------------------


def random_partition_matroid(n: int, blocks: int, rng: np.random.Generator, max_cap: int = 2) -> PartitionMatroid:
    blocks = max(1, min(blocks, n))
    owner = rng.permutation(np.arange(n) % blocks)
    groups = [[u for u in range(n) if owner[u] == b] for b in range(blocks)]
    caps = [int(rng.integers(1, max_cap + 1)) for _ in range(blocks)]
    return PartitionMatroid.from_lists(n, groups, caps)


def random_knapsack(n: int, rng: np.random.Generator, budget_frac: float = 0.35) -> KnapsackConstraint:
    costs = np.round(rng.uniform(0.1, 1.0, size=n), 3)
    budget = round(max(float(costs.min()), budget_frac * float(costs.sum())), 3)
    return KnapsackConstraint.of(costs.tolist(), budget)


def generate_instance(
    kind: str,
    n: int,
    seed: int = 0,
    constraint: str | None = None,
    epsilon: float = 0.1,
    edge_prob: float = 0.5,
    k: int | None = None,
    blocks: int = 3,
    budget_frac: float = 0.35,
    m: int = 1,
    width: float = 9.0,
) -> Instance:
    """Seeded instance for the CLI and the test corpus.

    The function and the constraint draw from independent child streams of
    ``seed`` so changing one family does not perturb the other.
    """
    if n < 1:
        raise InvalidSpecError("n must be at least 1")
    fseq, cseq = np.random.SeedSequence(seed).spawn(2)
    if kind == "cut":
        function: FunctionSpec = random_cut_instance(n, edge_prob, (0.0, 1.0), fseq)
    elif kind == "table":
        function = random_table_instance(n, fseq)
    elif kind == "tight":
        function = TightExampleSpec(n=n, epsilon=epsilon)
    else:
        raise InvalidSpecError(f"unknown function kind {kind!r}")

    if constraint is None:
        constraint = "knapsack" if kind == "tight" else "uniform"
    rng = np.random.default_rng(cseq)
    if constraint == "uniform":
        spec: ConstraintSpec = UniformMatroid(n, min(n, 3) if k is None else k)
    elif constraint == "partition":
        spec = random_partition_matroid(n, blocks, rng)
    elif constraint == "knapsack":
        if kind == "tight":
            spec = KnapsackConstraint.of([1.0] * n, float(n))
        else:
            spec = random_knapsack(n, rng, budget_frac)
    elif constraint == "packing":
        spec = random_packing_instance(n, m, width, rng)
    else:
        raise InvalidSpecError(f"unknown constraint kind {constraint!r}")
    return Instance(n, function, spec)
