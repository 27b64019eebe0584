"""Values of Bell functionals over the local, bilocal and non-signalling sets.

Every enumerator fixes deterministic strategies for all parties but the
last one and lets the last party best-respond input by input.  This is
exact: once the others are fixed the objective separates over the last
party's inputs.  Loops run in lexicographic order of strategies and only
strict improvements replace the incumbent, so ties resolve to the
lexicographically smallest certificate.
"""

from __future__ import annotations

import functools
import math
import os
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.sparse as sp

from .errors import BudgetExceeded, DomainError, LPError, UnsupportedScenario
from .linprog import LinearProgram, certify, solve_lp
from .model import (
    PARTITIONS,
    Behaviour,
    BellFunctional,
    Correlation,
    DeterministicStrategy,
    Partition,
    Scenario,
    behaviour_from_deterministic,
)

DEFAULT_BUDGET = 10**8
BUDGET_ENV = "BELLGAP_BUDGET"

CLASSES = ("local", "bilocal-general", "bilocal-ns", "ns", "quantum-lower", "local-cor", "bilocal-cor", "ns-cor")

# rows handled per vectorised chunk in the innermost enumeration level
_CHUNK_ELEMENTS = 1 << 22


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(float(raw)) if raw else DEFAULT_BUDGET


def _budget(budget: int | None) -> int:
    return default_budget() if budget is None else int(budget)


def _check_budget(required: float, budget: int | None, what: str) -> None:
    limit = _budget(budget)
    if required > limit:
        raise BudgetExceeded(f"{what}: {required:.3g} elementary scans exceed the budget {limit:.3g}", required, limit)


@dataclass(frozen=True, eq=False)
class ValueReport:
    """Value of one functional over one behaviour class, with its witness.

    ``witness`` is a behaviour (or correlation) in the class on which the
    functional evaluates to +-``value``; ``certificate`` is a JSON-friendly
    description of it using 1-based labels.  ``exact`` is False when
    ``value`` is only a lower bound.
    """

    functional_id: str
    value_class: str
    value: float
    method: str
    certificate: dict = field(default_factory=dict)
    witness: Behaviour | Correlation | None = None
    exact: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {
            "functional": self.functional_id,
            "class": self.value_class,
            "value": self.value,
            "method": self.method,
            "exact": self.exact,
            "certificate": self.certificate,
        }


@dataclass(frozen=True)
class LVReport:
    functional_id: str
    numerator: str
    denominator: str
    value_num: float
    value_den: float
    ratio: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "functional": self.functional_id,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "value_num": self.value_num,
            "value_den": self.value_den,
            "ratio": self.ratio,
        }


# deterministic strategy enumeration -------------------------------------------


def strategy_table(n_inputs: int, n_outputs: int) -> np.ndarray:
    """All maps inputs -> outputs as rows, in lexicographic order."""
    count = n_outputs**n_inputs
    codes = np.arange(count, dtype=np.int64)
    table = np.empty((count, n_inputs), dtype=np.int64)
    for x in range(n_inputs - 1, -1, -1):
        table[:, x] = codes % n_outputs
        codes //= n_outputs
    return table


def _interleave(coeffs: np.ndarray, k: int) -> np.ndarray:
    order = [ax for i in range(k) for ax in (i, k + i)]
    return coeffs.transpose(order)


def enumeration_size(scenario: Scenario) -> float:
    """Strategy profiles of parties 1..k-1 times the last party's scan."""
    head = math.prod(float(K) ** N for N, K in zip(scenario.inputs[:-1], scenario.outputs[:-1]))
    return head * scenario.inputs[-1] * scenario.outputs[-1]


class _Extremes:
    """Running maximum and minimum of <M, P> over deterministic profiles."""

    def __init__(self):
        self.vmax, self.vmin = -math.inf, math.inf
        self.pmax = self.pmin = None

    def offer(self, prefix, values_max, values_min, R, strategies):
        i = int(np.argmax(values_max))
        if values_max[i] > self.vmax:
            self.vmax = float(values_max[i])
            self.pmax = list(prefix) + ([tuple(strategies[i])] if strategies is not None else []) + [
                tuple(int(a) for a in R[i].argmax(axis=-1))
            ]
        i = int(np.argmin(values_min))
        if values_min[i] < self.vmin:
            self.vmin = float(values_min[i])
            self.pmin = list(prefix) + ([tuple(strategies[i])] if strategies is not None else []) + [
                tuple(int(a) for a in R[i].argmin(axis=-1))
            ]


def _scan_last_two(T: np.ndarray, prefix, ext: _Extremes) -> None:
    """T has axes (x, a, x_last, a_last); enumerate the first party in chunks."""
    n, kk, n_last, k_last = T.shape
    S = strategy_table(n, kk)
    flat = T.reshape(n, kk, n_last * k_last)
    chunk = max(1, _CHUNK_ELEMENTS // max(1, n * n_last * k_last))
    rows = np.arange(n)[None, :]
    for start in range(0, S.shape[0], chunk):
        block = S[start : start + chunk]
        R = flat[rows, block].sum(axis=1).reshape(-1, n_last, k_last)
        # float summation order is fixed by the chunk, keep it deterministic
        ext.offer(prefix, R.max(axis=-1).sum(axis=-1), R.min(axis=-1).sum(axis=-1), R, block)


def _enumerate(T: np.ndarray, k: int, prefix, ext: _Extremes) -> None:
    if k == 1:
        R = T[None]
        ext.offer(prefix, R.max(axis=-1).sum(axis=-1), R.min(axis=-1).sum(axis=-1), R, None)
        return
    if k == 2:
        _scan_last_two(T, prefix, ext)
        return
    n, kk = T.shape[:2]
    rows = np.arange(n)
    for s in strategy_table(n, kk):
        _enumerate(T[rows, s].sum(axis=0), k - 1, prefix + [tuple(int(a) for a in s)], ext)


def deterministic_extremes(coeffs: np.ndarray, scenario: Scenario):
    """Max and min of <M, P> over deterministic P, with optimal profiles.

    Returns ``(vmax, profile_max, vmin, profile_min)``; a profile is a list
    of per-party output tuples.
    """
    k = scenario.parties
    ext = _Extremes()
    _enumerate(_interleave(np.asarray(coeffs, dtype=float), k), k, [], ext)
    return ext.vmax, ext.pmax, ext.vmin, ext.pmin


def _profile_json(profile) -> list[list[int]]:
    return [[int(a) + 1 for a in row] for row in profile]


def local_value(m: BellFunctional, budget: int | None = None) -> ValueReport:
    """Exact fully-local value max |<M, P>| over deterministic strategies."""
    if m.is_correlation:
        return local_correlation_value(m, budget=budget)
    scenario = m.scenario
    k = scenario.parties
    if k > 1:
        N, K = scenario.inputs[0], scenario.outputs[0]
        bound = f"K^(N(k-1)) = {K}^({N}*{k - 1})" if scenario.is_uniform else "prod K_i^N_i over parties 1..k-1"
    else:
        bound = "N*K"
    _check_budget(enumeration_size(scenario), budget, f"local_value enumerates {bound} strategy profiles")
    vmax, pmax, vmin, pmin = deterministic_extremes(m.coeffs, scenario)
    value, profile = (vmax, pmax) if vmax >= -vmin else (-vmin, pmin)
    strategy = DeterministicStrategy(scenario, profile)
    return ValueReport(
        m.name,
        "local",
        value,
        "enumeration",
        {"strategy": _profile_json(profile)},
        behaviour_from_deterministic(strategy),
    )


def local_value_brute_force(m: BellFunctional, budget: int | None = None) -> float:
    """Bipartite local value by scoring every pair of deterministic strategies.

    No best-response shortcut: the full K_A^N_A x K_B^N_B table of
    strategy-pair values is built and its maximum taken.
    """
    if m.parties != 2 or m.is_correlation:
        raise UnsupportedScenario("brute force is implemented for bipartite functionals with outputs")
    (na, nb), (ka, kb) = m.scenario.inputs, m.scenario.outputs
    _check_budget(float(ka) ** na * float(kb) ** nb, budget, "brute-force strategy pairs")
    one_hot = []
    for n, k in ((na, ka), (nb, kb)):
        table = strategy_table(n, k)
        e = np.zeros((table.shape[0], n, k))
        e[np.arange(table.shape[0])[:, None], np.arange(n)[None, :], table] = 1.0
        one_hot.append(e.reshape(table.shape[0], n * k))
    G = m.coeffs.transpose(0, 2, 1, 3).reshape(na * ka, nb * kb)
    return float((one_hot[0] @ G @ one_hot[1].T).max())


def local_search_value(m: BellFunctional, restarts: int = 20, seed: int = 0, max_rounds: int = 1000) -> ValueReport:
    """Lower bound on the local value of a game by alternating best responses.

    Meant for games too large for :func:`local_value`.  Each restart starts
    from a random deterministic profile and improves one party at a time
    until no party can gain.
    """
    if m.is_correlation:
        raise UnsupportedScenario("local search works on full functionals")
    scenario = m.scenario
    k = scenario.parties
    rng = np.random.default_rng(seed)
    best_value, best_profile = -math.inf, None
    for _ in range(restarts):
        profile = [rng.integers(0, K, size=N) for N, K in zip(scenario.inputs, scenario.outputs)]
        value = _profile_value(m.coeffs, profile)
        for _ in range(max_rounds):
            improved = False
            for i in range(k):
                R = _response_table(m.coeffs, scenario, profile, i)
                profile[i] = R.argmax(axis=1)
                candidate = float(R.max(axis=1).sum())
                improved |= candidate > value + 1e-12
                value = max(value, candidate)
            if not improved:
                break
        if value > best_value:
            best_value, best_profile = value, [tuple(int(a) for a in p) for p in profile]
    strategy = DeterministicStrategy(scenario, best_profile)
    witness = behaviour_from_deterministic(strategy)
    return ValueReport(
        m.name,
        "local",
        float(np.sum(m.coeffs * witness.table)),
        "local-search",
        {"strategy": _profile_json(best_profile), "restarts": restarts, "seed": seed},
        witness,
        exact=False,
    )


def _profile_value(coeffs: np.ndarray, profile) -> float:
    k = len(profile)
    T = _interleave(coeffs, k)
    for j in range(k - 1, -1, -1):
        T = np.moveaxis(T, (2 * j, 2 * j + 1), (0, 1))
        T = T[np.arange(len(profile[j])), np.asarray(profile[j])].sum(axis=0)
    return float(T)


def _response_table(coeffs: np.ndarray, scenario: Scenario, profile, party: int) -> np.ndarray:
    """R[x_i, a_i]: value contribution when everyone except ``party`` plays ``profile``."""
    k = scenario.parties
    T = _interleave(coeffs, k)
    # descending order keeps the axis positions of earlier parties valid
    for j in range(k - 1, -1, -1):
        if j == party:
            continue
        T = np.moveaxis(T, (2 * j, 2 * j + 1), (0, 1))
        T = T[np.arange(scenario.inputs[j]), np.asarray(profile[j])].sum(axis=0)
    return T


# bilocal values ---------------------------------------------------------------


def merge_parties(m: BellFunctional, partition: Partition) -> BellFunctional:
    """Bipartite functional with the lone party first and the merged pair second.

    The merged player's input is (x_i, x_j) flattened row-major, likewise
    for outputs.
    """
    if m.parties != 3 or m.is_correlation:
        raise UnsupportedScenario("merging needs a tripartite functional with outputs")
    i, j = partition.merged
    l = partition.lone
    N, K = m.scenario.inputs, m.scenario.outputs
    perm = [l, i, j, 3 + l, 3 + i, 3 + j]
    coeffs = m.coeffs.transpose(perm).reshape(N[l], N[i] * N[j], K[l], K[i] * K[j])
    scenario = Scenario((N[l], N[i] * N[j]), (K[l], K[i] * K[j]))
    return BellFunctional(scenario, coeffs, m.kind, f"{m.name}[{partition.label()}]")


def _bilocal_witness(scenario: Scenario, partition: Partition, lone_table: np.ndarray, pair_table: np.ndarray) -> Behaviour:
    """Product of a lone conditional L[x_l, a_l] and a pair conditional Q[x_i, x_j, a_i, a_j]."""
    i, j = partition.merged
    l = partition.lone
    table = np.einsum("pP,qrQR->pqrPQR", lone_table, pair_table)
    perm = [l, i, j, 3 + l, 3 + i, 3 + j]
    return Behaviour(scenario, table.transpose(np.argsort(perm)))


def bilocal_value_general(m: BellFunctional, budget: int | None = None) -> ValueReport:
    """Value over general (Svetlichny) bilocal behaviours of a tripartite game.

    Equals the largest bipartite local value among the three games obtained
    by merging two of the parties into a single player.
    """
    if m.is_correlation:
        return bilocal_correlation_value(m, budget=budget)
    if m.parties != 3:
        raise UnsupportedScenario("bilocal values are implemented for three parties")
    if m.coeffs.size and m.coeffs.min() < 0:
        raise DomainError(
            "bilocal_value_general reduces to merged local values only for non-negative functionals; "
            f"{m.name} has a coefficient {m.coeffs.min():.3g}"
        )
    best = None
    for partition in PARTITIONS:
        report = local_value(merge_parties(m, partition), budget=budget)
        if best is None or report.value > best[1].value:
            best = (partition, report)
    partition, report = best
    lone, merged = report.certificate["strategy"]
    i, j = partition.merged
    N, K = m.scenario.inputs, m.scenario.outputs
    response = [[int(a - 1) // K[j], int(a - 1) % K[j]] for a in merged]
    lone_table = np.zeros((N[partition.lone], K[partition.lone]))
    lone_table[np.arange(len(lone)), np.asarray(lone) - 1] = 1.0
    pair_table = np.zeros((N[i], N[j], K[i], K[j]))
    for X, (ai, aj) in enumerate(response):
        pair_table[X // N[j], X % N[j], ai, aj] = 1.0
    return ValueReport(
        m.name,
        "bilocal-general",
        report.value,
        "enumeration",
        {
            "partition": partition.label(),
            "lone_strategy": lone,
            # merged player's answer pair (1-based) for each input pair in row-major order
            "merged_response": [[ai + 1, aj + 1] for ai, aj in response],
        },
        _bilocal_witness(m.scenario, partition, lone_table, pair_table),
    )


# non-signalling LPs -----------------------------------------------------------


@functools.lru_cache(maxsize=32)
def ns_program(scenario: Scenario) -> LinearProgram:
    """Feasibility program of the non-signalling polytope (zero objective).

    Variables are the behaviour entries in table order.  Constraints: every
    input row sums to one, and for each party i the marginal of the other
    parties does not depend on x_i.
    """
    k = scenario.parties
    shape = scenario.shape
    size = math.prod(shape)
    idx = np.arange(size).reshape(shape)
    n_x = math.prod(scenario.inputs)
    rows, cols, vals = [], [], []
    norm = idx.reshape(n_x, -1)
    rows.append(np.repeat(np.arange(n_x), norm.shape[1]))
    cols.append(norm.ravel())
    vals.append(np.ones(norm.size))
    next_row = n_x
    for i in range(k):
        J = np.moveaxis(idx, (i, k + i), (0, 1)).reshape(scenario.inputs[i], scenario.outputs[i], -1)
        n_rest = J.shape[2]
        for t in range(1, scenario.inputs[i]):
            r = next_row + np.arange(n_rest)
            for sign, block in ((1.0, J[t]), (-1.0, J[0])):
                rows.append(np.tile(r, block.shape[0]))
                cols.append(block.ravel())
                vals.append(np.full(block.size, sign))
            next_row += n_rest
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(next_row, size))
    b = np.zeros(next_row)
    b[:n_x] = 1.0
    return LinearProgram(np.zeros(size), A, b)


def _lp_extreme(lp: LinearProgram, objective: np.ndarray, signed: bool):
    """Solve for max <c, P> (and min when ``signed``); return (|value|, point, certificate)."""
    best = None
    for maximize in (True, False) if signed else (True,):
        prog = lp.with_objective(objective.ravel(), maximize)
        res = solve_lp(prog)
        cert = certify(prog, res)
        if not cert.ok(1e-7):
            raise LPError(f"LP certificate check failed: {cert}", -1)
        if best is None or abs(res.value) > abs(best[0]):
            best = (res.value, res.x, cert)
    value, x, cert = best
    return abs(value), x, cert


def ns_value(m: BellFunctional, budget: int | None = None) -> ValueReport:
    """Value over all non-signalling behaviours by linear programming."""
    if m.is_correlation:
        return ns_correlation_value(m)
    scenario = m.scenario
    lp = ns_program(scenario)
    _check_budget(lp.A_eq.nnz, budget, "ns_value LP constraint matrix")
    signed = bool(m.coeffs.size and m.coeffs.min() < 0)
    value, x, cert = _lp_extreme(lp, m.coeffs, signed)
    witness = Behaviour(scenario, _clean_probabilities(x.reshape(scenario.shape)))
    return ValueReport(
        m.name,
        "ns",
        value,
        "lp",
        {
            "primal_residual": cert.primal_residual,
            "dual_residual": cert.dual_residual,
            "gap": cert.gap,
            "variables": lp.num_variables,
        },
        witness,
    )


def _clean_probabilities(table: np.ndarray) -> np.ndarray:
    # the LP may return entries like -1e-17
    return np.where(table < 0, 0.0, table)


def bilocal_value_ns(m: BellFunctional, budget: int | None = None) -> ValueReport:
    """Value over non-signalling bilocal behaviours of a tripartite functional.

    For each bipartition and each deterministic strategy of the lone party,
    the lone party is folded into the coefficients and the remaining
    bipartite functional is maximised over the non-signalling polytope of
    the pair.
    """
    if m.is_correlation:
        return bilocal_correlation_value(m, budget=budget)
    if m.parties != 3:
        raise UnsupportedScenario("bilocal values are implemented for three parties")
    N, K = m.scenario.inputs, m.scenario.outputs
    total = sum(float(K[p.lone]) ** N[p.lone] * N[p.merged[0]] * N[p.merged[1]] * K[p.merged[0]] * K[p.merged[1]] for p in PARTITIONS)
    _check_budget(total, budget, "bilocal_value_ns LPs (lone strategies x pair variables)")
    signed = bool(m.coeffs.size and m.coeffs.min() < 0)
    best = None
    for partition in PARTITIONS:
        i, j = partition.merged
        l = partition.lone
        pair = Scenario((N[i], N[j]), (K[i], K[j]))
        lp = ns_program(pair)
        U = m.coeffs.transpose(l, 3 + l, i, j, 3 + i, 3 + j)
        rows = np.arange(N[l])
        for s in strategy_table(N[l], K[l]):
            objective = U[rows, s].sum(axis=0)
            value, x, cert = _lp_extreme(lp, objective, signed)
            if best is None or value > best[0]:
                best = (value, partition, tuple(int(a) for a in s), x.reshape(pair.shape), cert)
    value, partition, s, pair_table, cert = best
    l = partition.lone
    lone_table = np.zeros((N[l], K[l]))
    lone_table[np.arange(N[l]), s] = 1.0
    witness = _bilocal_witness(m.scenario, partition, lone_table, _clean_probabilities(pair_table))
    return ValueReport(
        m.name,
        "bilocal-ns",
        value,
        "lp",
        {
            "partition": partition.label(),
            "lone_strategy": [a + 1 for a in s],
            "primal_residual": cert.primal_residual,
            "gap": cert.gap,
        },
        witness,
    )


# correlation scenario ------------------------------------------------------------


def _require_correlation(m: BellFunctional) -> None:
    if not m.is_correlation:
        raise UnsupportedScenario(f"{m.name} is not a correlation functional")


def _sign_table(n_inputs: int) -> np.ndarray:
    """All sign vectors in {+1,-1}^n, lexicographic with +1 first."""
    return 1.0 - 2.0 * strategy_table(n_inputs, 2)


def _signs(v: np.ndarray) -> np.ndarray:
    return np.where(v >= 0, 1.0, -1.0)


def local_correlation_value(m: BellFunctional, budget: int | None = None) -> ValueReport:
    """max |sum M[x] a_1(x_1)...a_k(x_k)| over sign assignments."""
    _require_correlation(m)
    inputs = m.scenario.inputs
    required = math.prod(2.0**n for n in inputs[:-1]) * inputs[-1]
    _check_budget(required, budget, f"local_correlation_value enumerates 2^(N(k-1)) = 2^{sum(inputs[:-1])} sign profiles")
    tables = [_sign_table(n) for n in inputs[:-1]]
    R = np.asarray(m.coeffs, dtype=float)
    for i, S in enumerate(tables):
        R = np.moveaxis(np.tensordot(R, S, axes=([i], [1])), -1, i)
    scores = np.abs(R).sum(axis=-1)
    flat = int(np.argmax(scores))
    picks = np.unravel_index(flat, scores.shape) if tables else ()
    signs = [tables[i][p] for i, p in enumerate(picks)]
    last = _signs(R[tuple(picks)])
    signs.append(last)
    gamma = np.ones(())
    for v in signs:
        gamma = np.multiply.outer(gamma, v)
    value = float(np.sum(m.coeffs * gamma))
    return ValueReport(
        m.name,
        "local-cor",
        abs(value),
        "enumeration",
        {"signs": [[int(s) for s in v] for v in signs]},
        Correlation(m.scenario, gamma),
    )


def ns_correlation_value(m: BellFunctional) -> ValueReport:
    """Closed form sum |M[x]|: the non-signalling correlations fill the cube."""
    _require_correlation(m)
    gamma = _signs(m.coeffs)
    return ValueReport(m.name, "ns-cor", float(np.abs(m.coeffs).sum()), "closed-form", {}, Correlation(m.scenario, gamma))


def bilocal_correlation_value(m: BellFunctional, budget: int | None = None) -> ValueReport:
    """Value over bilocal correlations of a tripartite correlation functional.

    Extreme points are alpha[pair] * c[lone] with alpha anywhere in the
    cube and c a sign vector, so for fixed c the best alpha is the sign of
    the partial sums.
    """
    _require_correlation(m)
    if m.parties != 3:
        raise UnsupportedScenario("bilocal correlation value is implemented for three parties")
    N = m.scenario.inputs
    _check_budget(sum(2.0 ** N[p.lone] * math.prod(N) for p in PARTITIONS), budget, "bilocal_correlation_value sign enumeration")
    best = None
    for partition in PARTITIONS:
        i, j = partition.merged
        l = partition.lone
        T = m.coeffs.transpose(i, j, l).reshape(N[i] * N[j], N[l])
        S = _sign_table(N[l])
        scores = np.abs(T @ S.T).sum(axis=0)
        t = int(np.argmax(scores))
        if best is None or scores[t] > best[0]:
            best = (float(scores[t]), partition, S[t], _signs(T @ S[t]))
    _, partition, c, alpha = best
    i, j = partition.merged
    l = partition.lone
    gamma = np.multiply.outer(alpha.reshape(N[i], N[j]), c).transpose(np.argsort([i, j, l]))
    value = float(np.sum(m.coeffs * gamma))
    return ValueReport(
        m.name,
        "bilocal-cor",
        abs(value),
        "closed-form",
        {"partition": partition.label(), "lone_signs": [int(s) for s in c]},
        Correlation(m.scenario, gamma),
    )


# dispatch -------------------------------------------------------------------------


def compute_value(m: BellFunctional, value_class: str, budget: int | None = None, **options) -> ValueReport:
    """Value of ``m`` over ``value_class`` (one of :data:`CLASSES`).

    ``options`` are forwarded to :func:`bellgap.quantum.quantum_lower_value`
    for the ``quantum-lower`` class.
    """
    if value_class == "local":
        return local_value(m, budget=budget)
    if value_class == "bilocal-general":
        return bilocal_value_general(m, budget=budget)
    if value_class == "bilocal-ns":
        return bilocal_value_ns(m, budget=budget)
    if value_class == "ns":
        return ns_value(m, budget=budget)
    if value_class == "local-cor":
        return local_correlation_value(m, budget=budget)
    if value_class == "bilocal-cor":
        return bilocal_correlation_value(m, budget=budget)
    if value_class == "ns-cor":
        return ns_correlation_value(m)
    if value_class == "quantum-lower":
        from .quantum import quantum_lower_value

        return quantum_lower_value(m, **options)
    raise DomainError(f"unknown value class {value_class!r}; expected one of {', '.join(CLASSES)}")


def lv_ratio(m: BellFunctional, class_num: str, class_den: str, budget: int | None = None, **options) -> LVReport:
    """Ratio of the values of ``m`` over two classes (a lower bound on LV)."""
    num = compute_value(m, class_num, budget=budget, **options).value
    den = num if class_num == class_den else compute_value(m, class_den, budget=budget, **options).value
    if den == 0:
        if num == 0:
            ratio = 0.0
        else:
            warnings.warn(f"{class_den} value of {m.name} is zero; ratio is infinite", RuntimeWarning, stacklevel=2)
            ratio = math.inf
    else:
        ratio = num / den
    return LVReport(m.name, class_num, class_den, num, den, ratio)
