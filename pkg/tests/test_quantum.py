import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellgap import quantum, solvers
from bellgap.errors import DimensionError, UnsupportedScenario, ValidationError
from bellgap.games import (
    KVParams,
    chsh_correlation_functional,
    chsh_game,
    correlation_functional,
    hadamard_correlation_functional,
    hat_construction,
    khot_vishnoi,
    random_correlation_functional,
    random_game,
    tensor_product,
    tilde_construction,
    trivial_game,
)
from bellgap.model import BellFunctional, DeterministicStrategy, Scenario, evaluate, is_non_signalling

CHSH_Q = (2 + math.sqrt(2)) / 4
seeds = st.integers(0, 2**32 - 1)


def born_rule_oracle(qs):
    """P(a|x) = <psi| E^1_{x1,a1} x ... x E^k_{xk,ak} |psi> with explicit Kronecker products."""
    scenario = qs.scenario
    table = np.zeros(scenario.shape)
    for idx in np.ndindex(*scenario.shape):
        k = scenario.parties
        x, a = idx[:k], idx[k:]
        op = np.ones((1, 1))
        for i in range(k):
            op = np.kron(op, qs.povms[i][x[i], a[i]])
        table[idx] = np.real(qs.state.conj() @ op @ qs.state)
    return table


class TestStrategyValidation:
    def test_bad_norm(self):
        p = quantum.chsh_strategy().povms
        with pytest.raises(ValidationError):
            quantum.QuantumStrategy(np.ones(4), p)

    def test_incomplete_povm(self):
        good = quantum.chsh_strategy()
        bad = good.povms[0].copy()
        bad[0, 0] *= 0.5
        with pytest.raises(ValidationError):
            quantum.QuantumStrategy(good.state, (bad, good.povms[1]))

    def test_not_positive(self):
        good = quantum.chsh_strategy()
        p = np.zeros((1, 2, 2, 2))
        p[0, 0] = np.diag([2.0, 0.0])
        p[0, 1] = np.diag([-1.0, 1.0])
        with pytest.raises(ValidationError, match="eigenvalue"):
            quantum.QuantumStrategy(good.state, (p, good.povms[1]))

    def test_dimension_mismatch(self):
        good = quantum.chsh_strategy()
        with pytest.raises(DimensionError):
            quantum.QuantumStrategy(np.ones(3) / math.sqrt(3), good.povms)

    def test_scenario(self):
        assert quantum.chsh_strategy().scenario == Scenario.uniform(2, 2, 2)
        assert quantum.chsh_strategy().dims == (2, 2)


class TestBehaviour:
    def test_chsh_value(self):
        assert quantum.quantum_value(chsh_game(), quantum.chsh_strategy()) == pytest.approx(CHSH_Q, abs=1e-12)

    @given(seeds)
    def test_matches_kronecker_oracle(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 4))
        s = Scenario(tuple(int(n) for n in rng.integers(1, 3, size=k)), tuple(int(o) for o in rng.integers(1, 4, size=k)))
        dims = tuple(int(d) for d in rng.integers(1, 4, size=k))
        qs = quantum.random_strategy(s, dims, rng)
        npt.assert_allclose(quantum.behaviour_of(qs).table, born_rule_oracle(qs), atol=1e-12)

    @given(seeds)
    def test_random_strategies_are_ns(self, seed):
        rng = np.random.default_rng(seed)
        s = Scenario.uniform(3, 2, 3)
        qs = quantum.random_strategy(s, (2, 3, 2), rng)
        assert quantum.povm_violation(qs) < 1e-9
        assert is_non_signalling(quantum.behaviour_of(qs))

    def test_deterministic_embedding(self, rng):
        s = Scenario((2, 3, 2), (2, 2, 3))
        det = DeterministicStrategy(s, [[0, 1], [1, 1, 0], [2, 0]])
        g = random_game(s, rng)
        from bellgap.model import behaviour_from_deterministic

        expected = evaluate(g, behaviour_from_deterministic(det))
        for dims in ((1, 1, 1), (2, 1, 3)):
            qs = quantum.deterministic_quantum_strategy(det, dims)
            assert quantum.quantum_value(g, qs) == pytest.approx(expected)

    def test_correlation_of(self):
        qs = quantum.chsh_strategy()
        obs = tuple(p[:, 0] - p[:, 1] for p in qs.povms)
        gamma = quantum.correlation_of(quantum.CorrelationObservables(qs.state, obs)).table
        npt.assert_allclose(gamma, np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-12)

    def test_observable_norm_checked(self):
        with pytest.raises(ValidationError):
            quantum.CorrelationObservables(np.ones(1), (2 * np.ones((1, 1, 1)), np.ones((1, 1, 1))))


class TestConstructions:
    def test_hat_value(self):
        h = hat_construction(chsh_game())
        qs = quantum.hat_strategy(quantum.chsh_strategy(), chsh_game())
        assert qs.dims == (4, 4, 4)
        assert quantum.quantum_value(h, qs) == pytest.approx(CHSH_Q**3, abs=1e-12)
        assert quantum.quantum_value(h, qs) == pytest.approx(0.853553**3, abs=1e-6)

    @given(seeds)
    def test_hat_value_is_cube_for_any_strategy(self, seed):
        rng = np.random.default_rng(seed)
        s = Scenario((2, 2), (2, 3))
        g = random_game(s, rng)
        qs = quantum.random_strategy(s, (2, 3), rng)
        hs = quantum.hat_strategy(qs)
        assert hs.dims == (4, 6, 9)
        assert quantum.quantum_value(hat_construction(g), hs) == pytest.approx(quantum.quantum_value(g, qs) ** 3, rel=1e-10)

    @given(seeds)
    def test_tensor_and_tilde(self, seed):
        rng = np.random.default_rng(seed)
        s = Scenario.uniform(2, 2, 2)
        g = random_game(s, rng)
        qs = quantum.random_strategy(s, (2, 2), rng)
        v = quantum.quantum_value(g, qs)
        assert quantum.quantum_value(tensor_product(g, g), quantum.tensor_strategy(qs, qs)) == pytest.approx(v**2)
        assert quantum.quantum_value(tilde_construction(g), quantum.tilde_strategy(qs)) == pytest.approx(v**2)

    def test_kv_strategy(self):
        for l, eta in ((2, 0.0), (2, 0.2), (3, None)):
            p = KVParams(l, eta)
            qs = quantum.kv_strategy(p)
            assert qs.dims == (p.n, p.n)
            assert quantum.povm_violation(qs) < 1e-12
            v = quantum.quantum_value(khot_vishnoi(p), qs)
            assert 0 < v <= 1

    def test_kv_l2_values(self):
        g = khot_vishnoi(KVParams(2, 0.2))
        v = quantum.quantum_value(g, quantum.kv_strategy(KVParams(2, 0.2)))
        assert v == pytest.approx(0.52, abs=1e-12)
        assert v <= solvers.ns_value(g).value + 1e-7

    def test_strategy_for(self):
        assert quantum.strategy_for(random_game(Scenario.uniform(2, 2, 2), np.random.default_rng(0))) is None
        assert quantum.quantum_value(trivial_game(3), quantum.strategy_for(trivial_game(3))) == 1.0
        assert quantum.strategy_for(hat_construction(tensor_product(chsh_game(), chsh_game()))).dims == (16, 16, 16)

    def test_hat_requires_bipartite(self):
        qs = quantum.hat_strategy(quantum.chsh_strategy())
        with pytest.raises(UnsupportedScenario):
            quantum.hat_strategy(qs)


class TestKronSum:
    @given(seeds)
    def test_against_explicit_kron(self, seed):
        rng = np.random.default_rng(seed)
        shape = tuple(int(n) for n in rng.integers(1, 4, size=3))
        dims = tuple(int(d) for d in rng.integers(1, 4, size=3))
        M = rng.normal(size=(2,) + shape)
        ops = [rng.normal(size=(n, d, d)) for n, d in zip(shape, dims)]
        got = quantum._kron_sum(M, ops)
        for f in range(2):
            expected = sum(M[(f,) + x] * np.kron(np.kron(ops[0][x[0]], ops[1][x[1]]), ops[2][x[2]]) for x in np.ndindex(*shape))
            npt.assert_allclose(got[f], expected, atol=1e-10)


class TestSeesaw:
    def test_chsh_correlation(self):
        r, co = quantum.correlation_seesaw(chsh_correlation_functional(), seeds=20)
        assert r.value == pytest.approx(math.sqrt(2) / 2, abs=1e-6)
        assert not r.exact
        assert r.value == pytest.approx(abs(evaluate(chsh_correlation_functional(), quantum.correlation_of(co))))

    def test_xor_game_route(self):
        g = BellFunctional(chsh_game().scenario, chsh_game().coeffs, "game", "chsh-without-meta")
        r = quantum.quantum_lower_value(g)
        assert r.method == "see-saw"
        assert r.value >= 0.85355 - 1e-4
        assert evaluate(g, r.witness) == pytest.approx(r.value)

    @given(seeds)
    def test_history_monotone(self, seed):
        rng = np.random.default_rng(seed)
        m = random_correlation_functional(rng.integers(1, 4, size=3), rng)
        trace = quantum.seesaw_run(m, (2, 2, 2), rng, max_rounds=50)
        assert np.all(np.diff(trace.history) >= -1e-10)

    @given(seeds)
    def test_bounded_by_grothendieck(self, seed):
        rng = np.random.default_rng(seed)
        m = random_correlation_functional(rng.integers(1, 4, size=2), rng)
        r, _ = quantum.correlation_seesaw(m, (3, 3), seeds=3, seed=seed)
        assert r.value <= quantum.K_G_UPPER * solvers.local_correlation_value(m).value + 1e-9

    def test_thread_independent(self):
        m = random_correlation_functional((3, 3, 2), np.random.default_rng(7))
        a, _ = quantum.correlation_seesaw(m, seeds=6, seed=3, threads=1)
        b, _ = quantum.correlation_seesaw(m, seeds=6, seed=3, threads=3)
        assert a.value == b.value
        assert a.certificate == b.certificate

    def test_zero_functional(self):
        r, _ = quantum.correlation_seesaw(correlation_functional(np.zeros((2, 2))))
        assert r.value == 0.0

    def test_dimension_count(self):
        with pytest.raises(DimensionError):
            quantum.correlation_seesaw(chsh_correlation_functional(), dims=(2, 2, 2))

    def test_hadamard_below_bilocal(self):
        m = hadamard_correlation_functional(4)
        r = quantum.quantum_lower_value(m, seeds=5)
        assert r.value <= quantum.K_G_UPPER * solvers.bilocal_correlation_value(m).value

    def test_unsupported_game(self):
        with pytest.raises(UnsupportedScenario):
            quantum.quantum_lower_value(random_game(Scenario.uniform(2, 2, 3), np.random.default_rng(0)))


class TestBounds:
    def test_hat(self):
        h = hat_construction(chsh_game())
        qs = quantum.hat_strategy(quantum.chsh_strategy())
        assert quantum.check_dimension_bound(qs, h) is True
        assert quantum.check_output_bound(qs, h) is True
        c = quantum.dimension_bound(qs, h)
        assert c.rhs == pytest.approx(4 * 0.625)

    def test_one_output_game(self):
        s = Scenario.uniform(3, 2, 1)
        g = BellFunctional(s, np.full(s.shape, 0.125), "game")
        qs = quantum.random_strategy(s, (2, 2, 2), np.random.default_rng(1))
        c = quantum.output_bound(qs, g)
        assert c.lhs == pytest.approx(1.0)
        assert c.rhs == pytest.approx(1.0)
        assert c.passed

    def test_random(self, rng):
        for _ in range(10):
            s = Scenario(tuple(int(n) for n in rng.integers(1, 4, size=3)), tuple(int(k) for k in rng.integers(1, 4, size=3)))
            g = random_game(s, rng)
            qs = quantum.random_strategy(s, tuple(int(d) for d in rng.integers(1, 4, size=3)), rng)
            assert quantum.check_dimension_bound(qs, g)
            assert quantum.check_output_bound(qs, g)

    def test_bipartite_rejected(self):
        with pytest.raises(UnsupportedScenario):
            quantum.dimension_bound(quantum.chsh_strategy(), chsh_game())
