import itertools
import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import (
    brute_bilocal_general,
    brute_local,
    brute_local_correlation,
    lp_bilocal_ns,
    lp_ns,
)

from bellgap import solvers
from bellgap.errors import BudgetExceeded, DomainError, UnsupportedScenario
from bellgap.games import (
    KVParams,
    chsh_correlation_functional,
    chsh_game,
    correlation_embedding,
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
from bellgap.model import (
    PARTITIONS,
    BellFunctional,
    Scenario,
    evaluate,
    is_non_signalling,
)

seeds = st.integers(0, 2**32 - 1)


def small_scenario(rng, parties):
    return Scenario(tuple(int(n) for n in rng.integers(1, 3, size=parties)), tuple(int(k) for k in rng.integers(1, 3, size=parties)))


class TestStrategyTable:
    def test_lexicographic(self):
        npt.assert_array_equal(solvers.strategy_table(2, 3)[:4], [[0, 0], [0, 1], [0, 2], [1, 0]])
        assert solvers.strategy_table(3, 2).shape == (8, 3)


class TestLocalValue:
    def test_chsh(self):
        r = solvers.local_value(chsh_game())
        assert r.value == 0.75
        assert r.exact
        assert evaluate(chsh_game(), r.witness) == 0.75

    def test_chsh_squared(self):
        gg = tensor_product(chsh_game(), chsh_game())
        assert solvers.local_value(gg).value == pytest.approx(0.625, abs=1e-12)

    def test_chsh_squared_full_brute_force(self):
        gg = tensor_product(chsh_game(), chsh_game())
        # 256 x 256 strategy pairs, each scored over all 16 question pairs
        assert brute_local(gg.coeffs, (4, 4), (4, 4)) == pytest.approx(0.625, abs=1e-12)
        assert solvers.local_value_brute_force(gg) == pytest.approx(0.625, abs=1e-12)

    def test_tie_break_is_lexicographically_smallest(self):
        assert solvers.local_value(chsh_game()).certificate["strategy"] == [[1, 1], [1, 1]]

    def test_trivial(self):
        assert solvers.local_value(trivial_game(3)).value == 1.0

    def test_kv_l2(self):
        assert solvers.local_value(khot_vishnoi(KVParams(2))).value == pytest.approx(1.0)
        assert solvers.local_value(khot_vishnoi(KVParams(2, 0.2))).value == pytest.approx(0.64)

    def test_hat(self):
        assert solvers.local_value(hat_construction(chsh_game())).value == pytest.approx(0.4375, abs=1e-12)

    @given(seeds)
    def test_matches_brute_force_bipartite(self, seed):
        rng = np.random.default_rng(seed)
        s = small_scenario(rng, 2)
        m = BellFunctional(s, rng.normal(size=s.shape))
        r = solvers.local_value(m)
        oracle = max(brute_local(m.coeffs, s.inputs, s.outputs), brute_local(-m.coeffs, s.inputs, s.outputs))
        assert r.value == pytest.approx(oracle, abs=1e-12)
        assert abs(evaluate(m, r.witness)) == pytest.approx(r.value, abs=1e-12)

    @given(seeds)
    def test_matches_brute_force_tripartite(self, seed):
        rng = np.random.default_rng(seed)
        s = small_scenario(rng, 3)
        g = random_game(s, rng)
        assert solvers.local_value(g).value == pytest.approx(brute_local(g.coeffs, s.inputs, s.outputs), abs=1e-12)

    def test_four_parties(self, rng):
        s = Scenario.uniform(4, 2, 2)
        g = random_game(s, rng)
        assert solvers.local_value(g).value == pytest.approx(brute_local(g.coeffs, s.inputs, s.outputs), abs=1e-12)

    def test_budget(self):
        with pytest.raises(BudgetExceeded) as info:
            solvers.local_value(hat_construction(chsh_game()), budget=100)
        assert info.value.required > 100
        assert "4^(4*2)" in str(info.value)

    def test_budget_from_environment(self, monkeypatch):
        monkeypatch.setenv(solvers.BUDGET_ENV, "10")
        with pytest.raises(BudgetExceeded):
            solvers.local_value(tensor_product(chsh_game(), chsh_game()))

    def test_local_search_lower_bound(self, rng):
        for _ in range(5):
            g = random_game(Scenario.uniform(3, 2, 3), rng)
            search = solvers.local_search_value(g, restarts=5, seed=1)
            assert not search.exact
            assert search.value <= solvers.local_value(g).value + 1e-12
        gg = tensor_product(chsh_game(), chsh_game())
        assert solvers.local_search_value(gg).value == pytest.approx(0.625)


class TestBilocalGeneral:
    def test_hat_chsh(self):
        r = solvers.bilocal_value_general(hat_construction(chsh_game()))
        assert r.value == pytest.approx(0.625, abs=1e-12)
        assert r.certificate["partition"] in [p.label() for p in PARTITIONS]

    def test_witness_attains_value(self):
        h = hat_construction(chsh_game())
        r = solvers.bilocal_value_general(h)
        assert evaluate(h, r.witness) == pytest.approx(r.value, abs=1e-12)

    def test_tilde(self):
        assert solvers.bilocal_value_general(tilde_construction(chsh_game())).value == pytest.approx(0.75)

    def test_product_with_trivial_party(self):
        g = chsh_game()
        coeffs = g.coeffs[:, :, None, :, :, None]
        m = BellFunctional(Scenario((2, 2, 1), (2, 2, 1)), coeffs, "game")
        # merging A and B lets them win outright
        assert solvers.bilocal_value_general(m).value == pytest.approx(1.0)

    @given(seeds)
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        s = Scenario.uniform(3, 2, 2)
        g = random_game(s, rng)
        assert solvers.bilocal_value_general(g).value == pytest.approx(
            brute_bilocal_general(g.coeffs, s.inputs, s.outputs), abs=1e-12
        )

    def test_mixed_alphabets_brute_force(self, rng):
        s = Scenario((1, 2, 2), (2, 2, 1))
        g = random_game(s, rng)
        assert solvers.bilocal_value_general(g).value == pytest.approx(brute_bilocal_general(g.coeffs, s.inputs, s.outputs))

    def test_refuses_negative(self):
        s = Scenario.uniform(3, 2, 2)
        with pytest.raises(DomainError):
            solvers.bilocal_value_general(BellFunctional(s, -np.ones(s.shape)))

    def test_bipartite_unsupported(self):
        with pytest.raises(UnsupportedScenario):
            solvers.bilocal_value_general(chsh_game())

    def test_merge_parties(self):
        h = hat_construction(chsh_game())
        merged = solvers.merge_parties(h, PARTITIONS[0])
        assert merged.scenario == Scenario((4, 16), (4, 16))
        assert merged.coeffs.sum() == pytest.approx(h.coeffs.sum())


class TestNS:
    def test_chsh(self):
        r = solvers.ns_value(chsh_game())
        assert r.value == pytest.approx(1.0, abs=1e-9)
        assert is_non_signalling(r.witness)
        assert max(r.certificate["primal_residual"], r.certificate["gap"]) < 1e-9

    def test_chsh_correlation_embedding(self):
        e = correlation_embedding(chsh_correlation_functional())
        assert solvers.ns_value(e).value == pytest.approx(1.0)

    def test_kv_l2(self):
        assert solvers.ns_value(khot_vishnoi(KVParams(2, 0.2))).value == pytest.approx(0.64, abs=1e-9)

    @given(seeds)
    def test_matches_oracle_lp(self, seed):
        rng = np.random.default_rng(seed)
        s = small_scenario(rng, int(rng.integers(2, 4)))
        m = BellFunctional(s, rng.normal(size=s.shape))
        oracle = max(lp_ns(m.coeffs, s.inputs, s.outputs), lp_ns(-m.coeffs, s.inputs, s.outputs))
        assert solvers.ns_value(m).value == pytest.approx(oracle, abs=1e-8)

    def test_hat(self):
        assert solvers.ns_value(hat_construction(chsh_game())).value == pytest.approx(1.0, abs=1e-8)


class TestBilocalNS:
    def test_hat_between(self):
        h = hat_construction(chsh_game())
        v = solvers.bilocal_value_ns(h).value
        assert v == pytest.approx(0.5625, abs=1e-9)
        assert solvers.local_value(h).value <= v + 1e-9 <= solvers.bilocal_value_general(h).value + 2e-9

    def test_pr_box_pair(self):
        g = chsh_game()
        m = BellFunctional(Scenario((2, 2, 1), (2, 2, 1)), g.coeffs[:, :, None, :, :, None], "game")
        assert solvers.bilocal_value_ns(m).value == pytest.approx(1.0, abs=1e-9)

    def test_zero(self):
        s = Scenario.uniform(3, 2, 2)
        assert solvers.bilocal_value_ns(BellFunctional(s, np.zeros(s.shape))).value == pytest.approx(0.0)

    @given(seeds)
    def test_matches_joint_lp(self, seed):
        rng = np.random.default_rng(seed)
        s = Scenario.uniform(3, 2, 2)
        g = random_game(s, rng)
        assert solvers.bilocal_value_ns(g).value == pytest.approx(lp_bilocal_ns(g.coeffs, s.inputs, s.outputs), abs=1e-8)

    def test_tilde_matches_joint_lp(self):
        t = tilde_construction(chsh_game())
        oracle = lp_bilocal_ns(t.coeffs, t.scenario.inputs, t.scenario.outputs)
        assert solvers.bilocal_value_ns(t).value == pytest.approx(oracle, abs=1e-8)

    def test_witness_is_valid(self, rng):
        g = random_game(Scenario.uniform(3, 2, 2), rng)
        r = solvers.bilocal_value_ns(g)
        assert evaluate(g, r.witness) == pytest.approx(r.value, abs=1e-8)


class TestCorrelationValues:
    def test_chsh(self):
        m = chsh_correlation_functional()
        assert solvers.local_correlation_value(m).value == pytest.approx(0.5)
        assert solvers.ns_correlation_value(m).value == 1.0

    def test_hadamard_4(self):
        m = hadamard_correlation_functional(4)
        assert solvers.ns_correlation_value(m).value == 16
        assert solvers.bilocal_correlation_value(m).value == pytest.approx(16, abs=1e-9)
        assert solvers.local_correlation_value(m).value == 8
        assert brute_local_correlation(m.coeffs) == 8

    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_hadamard_bilocal_is_ns(self, n):
        m = hadamard_correlation_functional(n)
        assert solvers.bilocal_correlation_value(m).value == pytest.approx(n * n)

    @given(seeds)
    def test_local_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        m = random_correlation_functional(rng.integers(1, 4, size=int(rng.integers(2, 4))), rng)
        r = solvers.local_correlation_value(m)
        assert r.value == pytest.approx(brute_local_correlation(m.coeffs), abs=1e-12)
        assert abs(evaluate(m, r.witness)) == pytest.approx(r.value)

    @given(seeds)
    def test_bilocal_matches_embedding_lp(self, seed):
        rng = np.random.default_rng(seed)
        m = random_correlation_functional(rng.integers(1, 3, size=3), rng)
        e = correlation_embedding(m)
        s = e.scenario
        oracle = max(lp_bilocal_ns(e.coeffs, s.inputs, s.outputs), lp_bilocal_ns(-e.coeffs, s.inputs, s.outputs))
        r = solvers.bilocal_correlation_value(m)
        assert r.value == pytest.approx(oracle, abs=1e-8)
        assert abs(evaluate(m, r.witness)) == pytest.approx(r.value)

    @given(seeds)
    def test_ordering_and_bounds(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        m = random_correlation_functional((n, n, n), rng)
        loc = solvers.local_correlation_value(m).value
        bl = solvers.bilocal_correlation_value(m).value
        ns = solvers.ns_correlation_value(m).value
        assert loc <= bl + 1e-12 <= ns + 2e-12
        assert bl <= math.sqrt(2 * n) * loc + 1e-9

    @given(seeds)
    def test_bipartite_ns_over_local(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        m = random_correlation_functional((n, n), rng)
        assert solvers.ns_correlation_value(m).value <= math.sqrt(2 * n) * solvers.local_correlation_value(m).value + 1e-9

    def test_requires_correlation(self):
        with pytest.raises(UnsupportedScenario):
            solvers.local_correlation_value(chsh_game())
        with pytest.raises(UnsupportedScenario):
            solvers.bilocal_correlation_value(chsh_correlation_functional())

    def test_local_value_dispatches(self):
        m = correlation_functional(np.eye(3))
        assert solvers.local_value(m).value == solvers.local_correlation_value(m).value == 3


class TestSandwich:
    @given(seeds)
    def test_inclusions(self, seed):
        rng = np.random.default_rng(seed)
        g = random_game(Scenario.uniform(3, 2, 2), rng)
        loc = solvers.local_value(g).value
        blns = solvers.bilocal_value_ns(g).value
        blg = solvers.bilocal_value_general(g).value
        ns = solvers.ns_value(g).value
        assert loc <= blns + 1e-7
        assert blns <= blg + 1e-7
        assert loc <= ns + 1e-7


class TestComputeValue:
    def test_dispatch(self):
        g = chsh_game()
        assert solvers.compute_value(g, "local").value == 0.75
        assert solvers.compute_value(g, "ns").value == pytest.approx(1.0)
        assert solvers.compute_value(g, "quantum-lower").value == pytest.approx((2 + math.sqrt(2)) / 4)

    def test_unknown_class(self):
        with pytest.raises(DomainError):
            solvers.compute_value(chsh_game(), "magic")

    def test_lv_ratio(self):
        r = solvers.lv_ratio(chsh_game(), "ns", "local")
        assert r.ratio == pytest.approx(4 / 3)
        assert r.to_dict()["numerator"] == "ns"

    def test_lv_ratio_zero_over_zero(self):
        s = Scenario.uniform(2, 2, 2)
        assert solvers.lv_ratio(BellFunctional(s, np.zeros(s.shape)), "ns", "local").ratio == 0.0

    def test_report_dict(self):
        d = solvers.local_value(chsh_game()).to_dict()
        assert set(d) == {"functional", "class", "value", "method", "exact", "certificate"}


def test_enumeration_size_monotone():
    sizes = [solvers.enumeration_size(Scenario.uniform(3, n, 2)) for n in range(1, 5)]
    assert sizes == sorted(sizes)
    assert all(isinstance(s, float) for s in sizes)


def test_bilocal_brute_force_exhaustive_small():
    # every 0/1 game on the 1-input, 2-output tripartite scenario
    s = Scenario.uniform(3, 1, 2)
    for bits in itertools.product((0.0, 0.125), repeat=8):
        coeffs = np.array(bits).reshape(s.shape)
        g = BellFunctional(s, coeffs, "game")
        assert solvers.bilocal_value_general(g).value == pytest.approx(brute_bilocal_general(coeffs, s.inputs, s.outputs))
