"""Recorded inequality checks, reproducible from their two sides."""

from __future__ import annotations

from dataclasses import dataclass

RELATIONS = ("<=", ">=", "==")


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float
    relation: str = "<="
    tol: float = 1e-9

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))

    @property
    def passed(self) -> bool:
        return holds(self.lhs, self.rhs, self.relation, self.tol)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "tol": self.tol,
            "pass": self.passed,
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.lhs:.12g} {self.relation} {self.rhs:.12g} (tol {self.tol:g})"


def holds(lhs: float, rhs: float, relation: str, tol: float) -> bool:
    if relation == "<=":
        return lhs <= rhs + tol
    if relation == ">=":
        return lhs >= rhs - tol
    return abs(lhs - rhs) <= tol
