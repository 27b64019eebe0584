"""Standard-form linear programs: maximise c.x subject to A x = b, x >= 0.

Solving is delegated to the HiGHS dual simplex shipped with scipy.  Every
result carries the dual vector, and :func:`certify` re-checks primal
feasibility, dual feasibility and the duality gap without trusting the
solver's own status.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize
import scipy.sparse as sp

from .errors import DimensionError, DomainError, LPError

FEAS_TOL = 1e-9

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
    "presolve": True,
}

_STATUS = {
    1: "iteration limit reached",
    2: "problem is infeasible",
    3: "problem is unbounded",
    4: "numerical difficulties",
}


@dataclass(frozen=True, eq=False)
class LinearProgram:
    objective: np.ndarray
    A_eq: sp.csr_matrix
    b_eq: np.ndarray
    maximize: bool = True

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        A = sp.csr_matrix(self.A_eq, dtype=float)
        b = np.asarray(self.b_eq, dtype=float).ravel()
        if A.shape != (b.size, c.size):
            raise DimensionError(f"constraint matrix {A.shape} does not match {b.size} rows x {c.size} variables")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise DomainError("objective and right-hand side must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A_eq", A)
        object.__setattr__(self, "b_eq", b)

    @property
    def num_variables(self) -> int:
        return self.objective.size

    def with_objective(self, objective, maximize: bool = True) -> "LinearProgram":
        return LinearProgram(objective, self.A_eq, self.b_eq, maximize)


@dataclass(frozen=True, eq=False)
class LPResult:
    value: float
    x: np.ndarray
    dual: np.ndarray


def solve_lp(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` to optimality or raise :class:`LPError`.

    The dual vector ``y`` is sign-adjusted so that, for a maximisation,
    ``A^T y >= c`` and ``b.y`` equals the optimum.
    """
    sign = -1.0 if lp.maximize else 1.0
    res = scipy.optimize.linprog(
        sign * lp.objective,
        A_eq=lp.A_eq,
        b_eq=lp.b_eq,
        bounds=(0, None),
        method="highs-ds",
        options=_HIGHS_OPTIONS,
    )
    if res.status != 0:
        raise LPError(f"LP not solved: {_STATUS.get(res.status, res.message)}", res.status)
    x = np.clip(res.x, 0.0, None)
    value = float(lp.objective @ x)
    dual = sign * np.asarray(res.eqlin.marginals, dtype=float)
    return LPResult(value, x, dual)


@dataclass(frozen=True)
class LPCertificate:
    primal_residual: float
    dual_residual: float
    gap: float

    def ok(self, tol: float = FEAS_TOL) -> bool:
        return max(self.primal_residual, self.dual_residual, self.gap) <= tol


def certify(lp: LinearProgram, result: LPResult) -> LPCertificate:
    """Independent optimality check of ``result`` from its primal and dual vectors."""
    x, y = result.x, result.dual
    primal = float(np.abs(lp.A_eq @ x - lp.b_eq).max(initial=0.0))
    primal = max(primal, float(-x.min(initial=0.0)))
    reduced = lp.A_eq.T @ y - lp.objective
    if not lp.maximize:
        reduced = -reduced
    dual = max(0.0, float(-reduced.min(initial=0.0)))
    gap = abs(float(lp.b_eq @ y) - float(lp.objective @ x))
    return LPCertificate(primal, dual, gap)
