"""Behaviours, correlations, Bell functionals and deterministic strategies.

Tensors are dense numpy arrays in row-major order with party 1 slowest.
A behaviour table is indexed ``table[x_1, ..., x_k, a_1, ..., a_k]``; a
functional uses the same layout, except correlation functionals, which are
indexed by inputs only.  Inputs and outputs are 0-based in memory.  For
binary outputs, index 0 stands for the value +1 and index 1 for -1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionError, DomainError, UnsupportedScenario, ValidationError

#: non-negativity slack for probabilities
PROB_TOL = 1e-12
#: slack for linear constraint checks (normalisation, no-signalling)
CONSTRAINT_TOL = 1e-9

KINDS = ("general", "game", "correlation")

# output index -> +-1 value for binary outputs
OUTPUT_SIGNS = np.array([1.0, -1.0])


def _frozen(array, dtype=float) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Scenario:
    """Alphabet sizes of a k-party Bell scenario.

    All parties normally share N inputs and K outputs.  The per-party tuples
    exist so that constructions such as :func:`bellgap.games.tilde_construction`
    can describe unequal alphabets without padding.
    """

    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(int(n) for n in self.inputs))
        object.__setattr__(self, "outputs", tuple(int(n) for n in self.outputs))
        if len(self.inputs) == 0 or len(self.inputs) != len(self.outputs):
            raise DimensionError(f"need one input and output size per party, got {self.inputs} / {self.outputs}")
        if min(self.inputs) < 1 or min(self.outputs) < 1:
            raise DomainError("alphabet sizes must be positive")

    @classmethod
    def uniform(cls, parties: int, inputs: int, outputs: int) -> "Scenario":
        if parties < 1:
            raise DomainError("need at least one party")
        return cls((inputs,) * parties, (outputs,) * parties)

    @property
    def parties(self) -> int:
        return len(self.inputs)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.inputs)) == 1 and len(set(self.outputs)) == 1

    @property
    def inputs_per_party(self) -> int:
        if len(set(self.inputs)) != 1:
            raise UnsupportedScenario(f"parties have different input counts {self.inputs}")
        return self.inputs[0]

    @property
    def outputs_per_party(self) -> int:
        if len(set(self.outputs)) != 1:
            raise UnsupportedScenario(f"parties have different output counts {self.outputs}")
        return self.outputs[0]

    @property
    def shape(self) -> tuple[int, ...]:
        """Shape of a behaviour table or a full functional."""
        return self.inputs + self.outputs

    def input_tuples(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(n) for n in self.inputs))


@dataclass(frozen=True, eq=False)
class Behaviour:
    """Joint conditional distribution P(a_1..a_k | x_1..x_k)."""

    scenario: Scenario
    table: np.ndarray

    def __post_init__(self):
        table = _frozen(self.table)
        if table.shape != self.scenario.shape:
            raise DimensionError(f"behaviour table has shape {table.shape}, scenario needs {self.scenario.shape}")
        if table.size and table.min() < -PROB_TOL:
            raise ValidationError(f"negative probability {table.min():.3e}")
        k = self.scenario.parties
        sums = table.sum(axis=tuple(range(k, 2 * k)))
        if np.abs(sums - 1.0).max() > CONSTRAINT_TOL:
            raise ValidationError(f"rows do not sum to 1 (worst deviation {np.abs(sums - 1.0).max():.3e})")
        object.__setattr__(self, "table", table)

    def __call__(self, a: Sequence[int], x: Sequence[int]) -> float:
        return float(self.table[tuple(x) + tuple(a)])

    @classmethod
    def uniform(cls, scenario: Scenario) -> "Behaviour":
        return cls(scenario, np.full(scenario.shape, 1.0 / np.prod(scenario.outputs)))


@dataclass(frozen=True, eq=False)
class Correlation:
    """Expectation tensor of the product of +-1 outputs, one entry per input tuple."""

    scenario: Scenario
    table: np.ndarray

    def __post_init__(self):
        if set(self.scenario.outputs) != {2}:
            raise UnsupportedScenario("correlations need binary outputs")
        table = _frozen(self.table)
        if table.shape != self.scenario.inputs:
            raise DimensionError(f"correlation has shape {table.shape}, scenario needs {self.scenario.inputs}")
        if table.size and np.abs(table).max() > 1.0 + PROB_TOL:
            raise DomainError(f"correlation entry {np.abs(table).max()} outside [-1, 1]")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_array(cls, table) -> "Correlation":
        table = np.asarray(table, dtype=float)
        return cls(Scenario(table.shape, (2,) * table.ndim), table)


@dataclass(frozen=True, eq=False)
class BellFunctional:
    """Real coefficients M[x, a] of a linear functional on behaviours.

    ``kind`` is one of ``"general"``, ``"game"`` (non-negative and
    normalised, see :func:`normalization_sum`) or ``"correlation"`` (indexed
    by inputs only, acting on the correlation of a binary-output behaviour).
    """

    scenario: Scenario
    coeffs: np.ndarray
    kind: str = "general"
    name: str = "functional"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown functional kind {self.kind!r}")
        coeffs = _frozen(self.coeffs)
        expected = self.scenario.inputs if self.kind == "correlation" else self.scenario.shape
        if coeffs.shape != expected:
            raise DimensionError(f"coefficients have shape {coeffs.shape}, expected {expected}")
        if self.kind == "correlation" and set(self.scenario.outputs) != {2}:
            raise UnsupportedScenario("correlation functionals need binary outputs")
        if not np.all(np.isfinite(coeffs)):
            raise DomainError("coefficients must be finite")
        if self.kind == "game":
            if coeffs.size and coeffs.min() < 0:
                raise ValidationError("game coefficients must be non-negative")
            total = normalization_sum(coeffs, self.scenario.parties)
            if total > 1.0 + PROB_TOL:
                raise ValidationError(f"game violates the normalisation condition (sum of maxima {total})")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def parties(self) -> int:
        return self.scenario.parties

    @property
    def is_correlation(self) -> bool:
        return self.kind == "correlation"

    def with_coeffs(self, coeffs, kind: str | None = None, name: str | None = None) -> "BellFunctional":
        return BellFunctional(self.scenario, coeffs, kind or self.kind, name or self.name, dict(self.meta))

    def __mul__(self, other: float) -> "BellFunctional":
        kind = "correlation" if self.is_correlation else "general"
        return self.with_coeffs(self.coeffs * float(other), kind=kind, name=f"{other}*{self.name}")

    __rmul__ = __mul__

    def __add__(self, other: "BellFunctional") -> "BellFunctional":
        if other.scenario != self.scenario or other.is_correlation != self.is_correlation:
            raise DimensionError("cannot add functionals on different scenarios")
        kind = "correlation" if self.is_correlation else "general"
        return self.with_coeffs(self.coeffs + other.coeffs, kind=kind, name=f"{self.name}+{other.name}")


def normalization_sum(coeffs: np.ndarray, parties: int) -> float:
    """Sum over input tuples of the largest coefficient over output tuples."""
    coeffs = np.asarray(coeffs)
    if coeffs.size == 0:
        return 0.0
    flat = coeffs.reshape(int(np.prod(coeffs.shape[:parties])), -1)
    return float(flat.max(axis=1).sum())


@dataclass(frozen=True)
class DeterministicStrategy:
    """One output per input for every party: ``assignment[i][x] = a``."""

    scenario: Scenario
    assignment: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        assignment = tuple(tuple(int(a) for a in row) for row in self.assignment)
        if len(assignment) != self.scenario.parties:
            raise DimensionError("need one assignment per party")
        for i, row in enumerate(assignment):
            if len(row) != self.scenario.inputs[i]:
                raise DimensionError(f"party {i} has {self.scenario.inputs[i]} inputs, got {len(row)} outputs")
            if any(a < 0 or a >= self.scenario.outputs[i] for a in row):
                raise DomainError(f"party {i} output out of range in {row}")
        object.__setattr__(self, "assignment", assignment)


@dataclass(frozen=True)
class Partition:
    """A bipartition of three parties: two merged parties and a lone one (0-based)."""

    merged: tuple[int, int]
    lone: int

    def __post_init__(self):
        merged = tuple(sorted(self.merged))
        if len(set(merged)) != 2 or set(merged) | {self.lone} != {0, 1, 2}:
            raise DomainError(f"invalid partition {self.merged} | {self.lone}")
        object.__setattr__(self, "merged", merged)

    def label(self) -> str:
        i, j = self.merged
        return f"{{{i + 1},{j + 1}}}|{{{self.lone + 1}}}"


PARTITIONS = (Partition((0, 1), 2), Partition((1, 2), 0), Partition((0, 2), 1))


def _check_same_scenario(functional: BellFunctional, scenario: Scenario) -> None:
    if functional.scenario != scenario:
        raise DimensionError(f"functional scenario {functional.scenario} does not match {scenario}")


def evaluate(functional: BellFunctional, behaviour: Behaviour | Correlation) -> float:
    """Pairing <M, P> = sum over inputs and outputs of M * P.

    Correlation functionals accept either a correlation or a binary-output
    behaviour, which is reduced to its correlation first.
    """
    _check_same_scenario(functional, behaviour.scenario)
    if functional.is_correlation:
        if isinstance(behaviour, Behaviour):
            behaviour = correlation_from_behaviour(behaviour)
        return float(np.sum(functional.coeffs * behaviour.table))
    if isinstance(behaviour, Correlation):
        raise UnsupportedScenario("a full functional needs a behaviour, not a correlation")
    return float(np.sum(functional.coeffs * behaviour.table))


def behaviour_from_deterministic(strategy: DeterministicStrategy) -> Behaviour:
    scenario = strategy.scenario
    factors = []
    for i, row in enumerate(strategy.assignment):
        f = np.zeros((scenario.inputs[i], scenario.outputs[i]))
        f[np.arange(scenario.inputs[i]), row] = 1.0
        factors.append(f)
    return Behaviour(scenario, product_table(factors))


def product_table(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Table of a product of per-party conditionals ``factors[i][x_i, a_i]``."""
    k = len(factors)
    table = np.ones(())
    for f in factors:
        table = np.multiply.outer(table, f)
    # axes are now (x1, a1, x2, a2, ...); reorder to (x..., a...)
    order = [2 * i for i in range(k)] + [2 * i + 1 for i in range(k)]
    return table.transpose(order)


def correlation_from_behaviour(behaviour: Behaviour) -> Correlation:
    scenario = behaviour.scenario
    if set(scenario.outputs) != {2}:
        raise UnsupportedScenario("correlations are defined for binary outputs only")
    k = scenario.parties
    signs = np.ones(())
    for _ in range(k):
        signs = np.multiply.outer(signs, OUTPUT_SIGNS)
    table = np.tensordot(behaviour.table, signs, axes=(list(range(k, 2 * k)), list(range(k))))
    return Correlation(scenario, np.clip(table, -1.0, 1.0))


def behaviour_from_correlation(correlation: Correlation) -> Behaviour:
    """Non-signalling behaviour with the given correlation.

    P(a|x) = (1 + a_1...a_k * gamma_x) / 2^k, with a_i = +-1.
    """
    table = np.asarray(correlation.table)
    if table.size and np.abs(table).max() > 1.0:
        raise DomainError("correlation entries must lie in [-1, 1]")
    scenario = correlation.scenario
    k = scenario.parties
    parity = np.ones(())
    for _ in range(k):
        parity = np.multiply.outer(parity, OUTPUT_SIGNS)
    out = (1.0 + np.multiply.outer(table, parity)) / 2**k
    return Behaviour(scenario, out)


@dataclass(frozen=True)
class SignallingReport:
    """Outcome of :func:`is_non_signalling`; truthy iff no constraint is violated."""

    non_signalling: bool
    worst_violation: float
    subset: tuple[int, ...] | None

    def __bool__(self) -> bool:
        return self.non_signalling


def is_non_signalling(behaviour: Behaviour, tol: float = CONSTRAINT_TOL) -> SignallingReport:
    """Check that every strict subset's marginal ignores the other inputs.

    ``subset`` in the report names the parties (0-based) whose marginal
    shows the largest dependence on outside inputs.
    """
    scenario = behaviour.scenario
    k = scenario.parties
    table = behaviour.table
    worst, worst_subset = 0.0, None
    for size in range(1, k):
        for subset in itertools.combinations(range(k), size):
            rest = [j for j in range(k) if j not in subset]
            marginal = table.sum(axis=tuple(k + j for j in rest), keepdims=True)
            spread = marginal.max(axis=tuple(rest), keepdims=True) - marginal.min(axis=tuple(rest), keepdims=True)
            dev = float(spread.max()) if spread.size else 0.0
            if dev > worst:
                worst, worst_subset = dev, subset
    return SignallingReport(worst <= tol, worst, worst_subset)
