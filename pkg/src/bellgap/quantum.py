"""Quantum strategies: evaluation, explicit constructions and see-saw search.

Quantum values are only ever bounded from below here, either by an
explicit strategy or by the see-saw heuristic for correlation functionals.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .checks import Check
from .errors import DimensionError, UnsupportedScenario, ValidationError
from .games import KVParams, kv_cosets, xor_form
from .model import (
    Behaviour,
    BellFunctional,
    Correlation,
    DeterministicStrategy,
    Scenario,
    evaluate,
)

STATE_TOL = 1e-10
PSD_TOL = 1e-9
COMPLETENESS_TOL = 1e-9

#: bracket for the real Grothendieck constant; checks use the upper end
GROTHENDIECK_BOUNDS = (1.676, 1.7823)
K_G_UPPER = GROTHENDIECK_BOUNDS[1]


@dataclass(frozen=True, eq=False)
class QuantumStrategy:
    """Pure state on C^d_1 x ... x C^d_k with one POVM per party and input.

    ``povms[i]`` has shape (N_i, K_i, d_i, d_i).
    """

    state: np.ndarray
    povms: tuple

    def __post_init__(self):
        povms = tuple(np.array(p, dtype=complex) for p in self.povms)
        state = np.array(self.state, dtype=complex).ravel()
        for p in povms:
            if p.ndim != 4 or p.shape[2] != p.shape[3]:
                raise DimensionError(f"POVM family must have shape (N, K, d, d), got {p.shape}")
        dims = tuple(p.shape[2] for p in povms)
        if state.size != math.prod(dims):
            raise DimensionError(f"state has {state.size} amplitudes, local dimensions {dims} need {math.prod(dims)}")
        problems = []
        if abs(np.linalg.norm(state) - 1.0) > STATE_TOL:
            problems.append(f"state norm {np.linalg.norm(state):.12g}")
        for i, p in enumerate(povms):
            if np.abs(p - p.conj().swapaxes(-1, -2)).max(initial=0.0) > PSD_TOL:
                problems.append(f"party {i}: POVM element not Hermitian")
                continue
            low = np.linalg.eigvalsh(p).min(initial=0.0)
            if low < -PSD_TOL:
                problems.append(f"party {i}: POVM element eigenvalue {low:.3e}")
            dev = np.abs(p.sum(axis=1) - np.eye(p.shape[2])).max(initial=0.0)
            if dev > COMPLETENESS_TOL:
                problems.append(f"party {i}: POVM elements sum to identity only within {dev:.3e}")
        if problems:
            raise ValidationError("invalid quantum strategy: " + "; ".join(problems))
        for p in povms:
            p.setflags(write=False)
        state.setflags(write=False)
        object.__setattr__(self, "povms", povms)
        object.__setattr__(self, "state", state)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(p.shape[2] for p in self.povms)

    @property
    def scenario(self) -> Scenario:
        return Scenario(tuple(p.shape[0] for p in self.povms), tuple(p.shape[1] for p in self.povms))


@dataclass(frozen=True, eq=False)
class CorrelationObservables:
    """Pure state with one self-adjoint contraction per party and input.

    ``observables[i]`` has shape (N_i, d_i, d_i).
    """

    state: np.ndarray
    observables: tuple

    def __post_init__(self):
        obs = tuple(np.array(o, dtype=complex) for o in self.observables)
        state = np.array(self.state, dtype=complex).ravel()
        dims = tuple(o.shape[1] for o in obs)
        if state.size != math.prod(dims):
            raise DimensionError("state size does not match the observables")
        if abs(np.linalg.norm(state) - 1.0) > STATE_TOL:
            raise ValidationError(f"state norm {np.linalg.norm(state):.12g}")
        for i, o in enumerate(obs):
            if np.abs(o - o.conj().swapaxes(-1, -2)).max(initial=0.0) > 1e-10:
                raise ValidationError(f"party {i}: observable not self-adjoint")
            if np.abs(np.linalg.eigvalsh(o)).max(initial=0.0) > 1.0 + 1e-9:
                raise ValidationError(f"party {i}: observable norm exceeds 1")
        object.__setattr__(self, "observables", obs)
        object.__setattr__(self, "state", state)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(o.shape[1] for o in self.observables)


# evaluation -------------------------------------------------------------------


def _expectations(state: np.ndarray, dims, ops) -> np.ndarray:
    """<psi| O_1[idx_1] x ... x O_k[idx_k] |psi> for every index combination.

    ``ops[i]`` has shape (*lead_i, d_i, d_i); the result has shape
    lead_1 + ... + lead_k.
    """
    k = len(dims)
    psi = state.reshape(dims)
    T = np.multiply.outer(psi, psi.conj())
    leads = []
    for p, op in enumerate(ops):
        lead = op.shape[:-2]
        leads.append(lead)
        flat = op.reshape(-1, op.shape[-2], op.shape[-1])
        # contract row index with the bra axis and column index with the ket axis
        T = np.tensordot(T, flat, axes=([0, k - p], [2, 1]))
    return T.reshape(tuple(n for lead in leads for n in lead))


def povm_violation(qs: QuantumStrategy) -> float:
    """Largest deviation from normalisation, positivity and completeness."""
    worst = abs(np.linalg.norm(qs.state) - 1.0)
    for p in qs.povms:
        worst = max(worst, -float(np.linalg.eigvalsh(p).min(initial=0.0)))
        worst = max(worst, float(np.abs(p.sum(axis=1) - np.eye(p.shape[2])).max(initial=0.0)))
    return float(worst)


def behaviour_of(qs: QuantumStrategy) -> Behaviour:
    k = len(qs.povms)
    probs = _expectations(qs.state, qs.dims, qs.povms).real
    order = [2 * i for i in range(k)] + [2 * i + 1 for i in range(k)]
    table = probs.transpose(order)
    # Born-rule round-off below zero
    table = np.where((table < 0) & (table > -PSD_TOL), 0.0, table)
    return Behaviour(qs.scenario, table)


def correlation_of(co: CorrelationObservables) -> Correlation:
    gamma = _expectations(co.state, co.dims, co.observables).real
    scenario = Scenario(tuple(o.shape[0] for o in co.observables), (2,) * len(co.observables))
    return Correlation(scenario, np.clip(gamma, -1.0, 1.0))


def quantum_value(g: BellFunctional, qs: QuantumStrategy) -> float:
    return evaluate(g, behaviour_of(qs))


# explicit strategies -------------------------------------------------------------


def maximally_entangled(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex).ravel() / math.sqrt(d)


def projective_from_observables(observables: np.ndarray) -> np.ndarray:
    """Two-outcome POVMs (I + A)/2, (I - A)/2 for +-1 observables A[x]."""
    d = observables.shape[-1]
    eye = np.eye(d)
    return np.stack([(eye + observables) / 2, (eye - observables) / 2], axis=1)


def chsh_strategy() -> QuantumStrategy:
    """Tsirelson-optimal CHSH strategy on a maximally entangled qubit pair."""
    Z = np.diag([1.0, -1.0])
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    alice = np.stack([Z, X])
    bob = np.stack([(Z + X) / math.sqrt(2), (Z - X) / math.sqrt(2)])
    return QuantumStrategy(maximally_entangled(2), (projective_from_observables(alice), projective_from_observables(bob)))


def deterministic_quantum_strategy(strategy: DeterministicStrategy, dims=None) -> QuantumStrategy:
    """Product state with trivial measurements reproducing ``strategy``."""
    scenario = strategy.scenario
    dims = dims or (1,) * scenario.parties
    povms = []
    for i, row in enumerate(strategy.assignment):
        d = dims[i]
        p = np.zeros((scenario.inputs[i], scenario.outputs[i], d, d))
        for x, a in enumerate(row):
            p[x, a] = np.eye(d)
        povms.append(p)
    state = np.zeros(math.prod(dims), dtype=complex)
    state[0] = 1.0
    return QuantumStrategy(state, tuple(povms))


def kv_strategy(params: KVParams) -> QuantumStrategy:
    """Maximally entangled state of dimension n with coset-vector measurements.

    On question [u] a player measures in the basis of vectors
    (-1)^{u'(i)} / sqrt(n), u' running over the coset; inside a coset these
    are a row-sign-flipped Hadamard basis, so each family is an orthonormal
    basis.
    """
    n = params.n
    cosets = kv_cosets(params.l)
    bits = n - 1 - np.arange(n)
    povm = np.zeros((len(cosets), n, n, n))
    for q, members in enumerate(cosets):
        for a, u in enumerate(members):
            v = (1.0 - 2.0 * ((u >> bits) & 1)) / math.sqrt(n)
            povm[q, a] = np.outer(v, v)
    # real vectors: Bob's conjugate basis is the same family
    return QuantumStrategy(maximally_entangled(n), (povm, povm))


def _check_bipartite(qs: QuantumStrategy) -> None:
    if len(qs.povms) != 2:
        raise UnsupportedScenario("the construction needs a bipartite strategy")


def hat_strategy(qs: QuantumStrategy, g: BellFunctional | None = None) -> QuantumStrategy:
    """Three copies of a bipartite strategy arranged for :func:`bellgap.games.hat_construction`.

    A measures Pi x Pi, B measures Lambda x Pi and C measures Lambda x Lambda
    on the regrouped state phi x phi x phi.
    """
    _check_bipartite(qs)
    if g is not None and (g.parties != 2 or g.scenario != qs.scenario):
        raise DimensionError("strategy and game scenarios differ")
    pi, lam = qs.povms
    d1, d2 = qs.dims
    phi = qs.state.reshape(d1, d2)
    # copies: (A, B), (A, C), (B, C)
    psi = np.einsum("ab,cd,ef->acbedf", phi, phi, phi).reshape(d1 * d1, d2 * d1, d2 * d2)
    return QuantumStrategy(psi.ravel(), (_pair_povm(pi, pi), _pair_povm(lam, pi), _pair_povm(lam, lam)))


def _pair_povm(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.einsum("xaij,ybkl->xyabikjl", p, q)
    n1, k1, d1 = p.shape[0], p.shape[1], p.shape[2]
    n2, k2, d2 = q.shape[0], q.shape[1], q.shape[2]
    return out.reshape(n1 * n2, k1 * k2, d1 * d2, d1 * d2)


def tensor_strategy(qs: QuantumStrategy, qt: QuantumStrategy) -> QuantumStrategy:
    """Both strategies side by side, for :func:`bellgap.games.tensor_product`."""
    _check_bipartite(qs)
    _check_bipartite(qt)
    d1, d2 = qs.dims
    e1, e2 = qt.dims
    psi = np.einsum("ab,cd->acbd", qs.state.reshape(d1, d2), qt.state.reshape(e1, e2))
    return QuantumStrategy(psi.ravel(), (_pair_povm(qs.povms[0], qt.povms[0]), _pair_povm(qs.povms[1], qt.povms[1])))


def tilde_strategy(qs: QuantumStrategy) -> QuantumStrategy:
    """Two copies for :func:`bellgap.games.tilde_construction`: (A, B) and (B, C)."""
    _check_bipartite(qs)
    pi, lam = qs.povms
    d1, d2 = qs.dims
    phi = qs.state.reshape(d1, d2)
    psi = np.einsum("ab,cd->abcd", phi, phi).reshape(d1, d2 * d1, d2)
    return QuantumStrategy(psi.ravel(), (pi, _pair_povm(lam, pi), lam))


def strategy_for(g: BellFunctional) -> QuantumStrategy | None:
    """Known explicit strategy for a game built by :mod:`bellgap.games`, if any."""
    return _strategy_from_meta(g.meta)


def _strategy_from_meta(meta: dict) -> QuantumStrategy | None:
    name = meta.get("construction")
    if name == "chsh":
        return chsh_strategy()
    if name == "trivial":
        parties = int(meta.get("parties", 2))
        scenario = Scenario.uniform(parties, 1, 1)
        return deterministic_quantum_strategy(DeterministicStrategy(scenario, [[0]] * parties))
    if name == "kv":
        return kv_strategy(KVParams(int(meta["l"]), float(meta["eta"])))
    if name in ("hat", "tilde"):
        base = _strategy_from_meta(meta.get("base", {}))
        if base is None:
            return None
        return hat_strategy(base) if name == "hat" else tilde_strategy(base)
    if name == "tensor":
        left, right = _strategy_from_meta(meta.get("left", {})), _strategy_from_meta(meta.get("right", {}))
        if left is None or right is None:
            return None
        return tensor_strategy(left, right)
    return None


# random instances ------------------------------------------------------------------


def random_state(dims, rng: np.random.Generator) -> np.ndarray:
    size = math.prod(dims)
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return v / np.linalg.norm(v)


def random_povm(n_inputs: int, n_outputs: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Random POVM per input: positive elements congruence-normalised to sum to I."""
    out = np.empty((n_inputs, n_outputs, d, d), dtype=complex)
    for x in range(n_inputs):
        g = rng.normal(size=(n_outputs, d, d)) + 1j * rng.normal(size=(n_outputs, d, d))
        elems = g @ g.conj().swapaxes(-1, -2)
        w, v = np.linalg.eigh(elems.sum(axis=0))
        inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
        out[x] = inv_sqrt @ elems @ inv_sqrt
        out[x] = (out[x] + out[x].conj().swapaxes(-1, -2)) / 2
    return out


def random_strategy(scenario: Scenario, dims, rng: np.random.Generator) -> QuantumStrategy:
    povms = tuple(random_povm(n, k, d, rng) for n, k, d in zip(scenario.inputs, scenario.outputs, dims))
    return QuantumStrategy(random_state(dims, rng), povms)


# see-saw -----------------------------------------------------------------------


def _kron_sum(coeffs: np.ndarray, ops) -> np.ndarray:
    """sum_x coeffs[f, x_1..x_m] ops[0][x_1] x ... x ops[m-1][x_m], for each f."""
    F = coeffs.shape[0]
    T = coeffs.reshape(F, -1, 1, 1).astype(complex)
    for op in ops:
        n, d = op.shape[0], op.shape[1]
        R, C = T.shape[-2], T.shape[-1]
        T = T.reshape(F, n, -1, R, C)
        T = np.einsum("fnmrc,nab->fmracb", T, op)
        T = T.reshape(F, T.shape[1], R * d, C * d)
    return T[:, 0]


def matrix_sign(h: np.ndarray) -> np.ndarray:
    """Sign of a Hermitian matrix; zero eigenvalues map to +1."""
    w, v = np.linalg.eigh(h)
    s = np.where(w >= 0, 1.0, -1.0)
    return (v * s) @ v.conj().T


def _random_observables(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))
    return np.stack([matrix_sign(h + h.conj().T) for h in g])


@dataclass
class SeesawTrace:
    value: float
    observables: list
    state: np.ndarray
    history: list = field(default_factory=list)


def seesaw_run(m: BellFunctional, dims, rng: np.random.Generator, max_rounds: int = 500, tol: float = 1e-9) -> SeesawTrace:
    """One see-saw ascent from random +-1 observables.

    ``history`` records the objective after every single update (state or
    one party's observables); it never decreases up to round-off.
    """
    M = np.asarray(m.coeffs, dtype=float)
    k = M.ndim
    dims = tuple(int(d) for d in dims)
    obs = [_random_observables(M.shape[i], dims[i], rng) for i in range(k)]

    def state_step():
        B = _kron_sum(M[None], obs)[0]
        w, v = np.linalg.eigh((B + B.conj().T) / 2)
        return float(w[-1]), v[:, -1]

    value, psi = state_step()
    history = [value]
    for _ in range(max_rounds):
        start = value
        for i in range(k):
            others = [obs[j] for j in range(k) if j != i]
            X = _kron_sum(np.moveaxis(M, i, 0), others)
            psi_i = np.moveaxis(psi.reshape(dims), i, 0).reshape(dims[i], -1)
            O = psi_i @ X.transpose(0, 2, 1) @ psi_i.conj().T
            O = (O + O.conj().swapaxes(-1, -2)) / 2
            obs[i] = np.stack([matrix_sign(o) for o in O])
            history.append(float(sum(np.abs(np.linalg.eigvalsh(o)).sum() for o in O)))
        value, psi = state_step()
        history.append(value)
        if value - start < tol:
            break
    return SeesawTrace(value, obs, psi, history)


def correlation_seesaw(
    m: BellFunctional,
    dims=None,
    seeds: int = 20,
    seed: int = 0,
    max_rounds: int = 500,
    tol: float = 1e-9,
    threads: int = 1,
):
    """Quantum lower bound for a correlation functional, best of ``seeds`` see-saw runs.

    Run ``s`` uses ``numpy.random.default_rng([seed, s])``; the best value
    wins, ties going to the lowest run index, so the result does not
    depend on ``threads``.
    """
    from .solvers import ValueReport

    if not m.is_correlation:
        raise UnsupportedScenario("see-saw is implemented for correlation functionals")
    dims = tuple(dims) if dims is not None else (2,) * m.parties
    if len(dims) != m.parties:
        raise DimensionError("need one local dimension per party")
    if not np.any(m.coeffs):
        obs = tuple(np.ones((n, 1, 1)) for n in m.scenario.inputs)
        co = CorrelationObservables(np.ones(1), obs)
        report = ValueReport(m.name, "quantum-lower", 0.0, "see-saw", {"dims": [1] * m.parties}, correlation_of(co), exact=False)
        return report, co

    def run(s: int) -> SeesawTrace:
        return seesaw_run(m, dims, np.random.default_rng([seed, s]), max_rounds, tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(run, range(seeds)))
    else:
        traces = [run(s) for s in range(seeds)]
    best = max(range(seeds), key=lambda s: (traces[s].value, -s))
    trace = traces[best]
    co = CorrelationObservables(trace.state, tuple(trace.observables))
    gamma = correlation_of(co)
    return ValueReport(
        m.name,
        "quantum-lower",
        abs(evaluate(m, gamma)),
        "see-saw",
        {"dims": list(dims), "seeds": seeds, "seed": seed, "best_run": best, "rounds": len(trace.history)},
        gamma,
        exact=False,
    ), co


def quantum_lower_value(
    m: BellFunctional, dims=None, seeds: int = 20, seed: int = 0, threads: int = 1, max_rounds: int = 500
):
    """Best available quantum lower bound for ``m``.

    Correlation functionals and parity (XOR) games go through the see-saw;
    games built by :mod:`bellgap.games` use their explicit strategies.
    """
    from .solvers import ValueReport

    if m.is_correlation:
        report, _ = correlation_seesaw(m, dims, seeds, seed, max_rounds=max_rounds, threads=threads)
        return report
    qs = strategy_for(m)
    if qs is not None:
        witness = behaviour_of(qs)
        return ValueReport(
            m.name,
            "quantum-lower",
            abs(evaluate(m, witness)),
            "constructed",
            {"strategy": m.meta.get("construction"), "dims": list(qs.dims)},
            witness,
            exact=False,
        )
    split = xor_form(m)
    if split is not None:
        offset, cor = split
        report, co = correlation_seesaw(cor, dims, seeds, seed, max_rounds=max_rounds, threads=threads)
        obs = list(co.observables)
        if evaluate(cor, correlation_of(co)) < 0:
            obs[0] = -obs[0]
        qs = QuantumStrategy(co.state, tuple(projective_from_observables(o) for o in obs))
        witness = behaviour_of(qs)
        cert = dict(report.certificate, offset=offset)
        return ValueReport(m.name, "quantum-lower", abs(evaluate(m, witness)), "see-saw", cert, witness, exact=False)
    raise UnsupportedScenario(
        f"no quantum strategy available for {m.name}: not a correlation functional, parity game or known construction"
    )


# dimension and output bounds ------------------------------------------------------


def _bilocal(g: BellFunctional, bilocal: float | None) -> float:
    if bilocal is not None:
        return bilocal
    from .solvers import bilocal_value_general

    return bilocal_value_general(g).value


def dimension_bound(qs: QuantumStrategy, g: BellFunctional, bilocal: float | None = None) -> Check:
    """<G, P_qs> <= min_i d_i * bilocal value of G."""
    if g.parties != 3:
        raise UnsupportedScenario("the dimension bound is stated for tripartite games")
    lhs = quantum_value(g, qs)
    return Check(f"dimension bound ({g.name}, d={min(qs.dims)})", lhs, min(qs.dims) * _bilocal(g, bilocal))


def output_bound(qs: QuantumStrategy, g: BellFunctional, bilocal: float | None = None) -> Check:
    """<G, P_qs> <= K * bilocal value of G."""
    if g.parties != 3:
        raise UnsupportedScenario("the output bound is stated for tripartite games")
    lhs = quantum_value(g, qs)
    return Check(f"output bound ({g.name}, K={max(g.scenario.outputs)})", lhs, max(g.scenario.outputs) * _bilocal(g, bilocal))


def check_dimension_bound(qs: QuantumStrategy, g: BellFunctional) -> bool:
    return dimension_bound(qs, g).passed


def check_output_bound(qs: QuantumStrategy, g: BellFunctional) -> bool:
    return output_bound(qs, g).passed
