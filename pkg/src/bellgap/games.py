"""Constructors for the games and Bell functionals used throughout the package."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedScenario, ValidationError
from .model import OUTPUT_SIGNS, PROB_TOL, BellFunctional, Scenario, normalization_sum


@dataclass(frozen=True, eq=False)
class HadamardMatrix:
    order: int
    entries: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=np.int64)
        if h.shape != (self.order, self.order) or not np.all(np.abs(h) == 1):
            raise ValidationError("Hadamard matrix needs +-1 entries and square shape")
        if not np.array_equal(h @ h.T, self.order * np.eye(self.order, dtype=np.int64)):
            raise ValidationError("rows are not orthogonal")
        h.setflags(write=False)
        object.__setattr__(self, "entries", h)


def sylvester_hadamard(order: int) -> HadamardMatrix:
    """Sylvester's construction; ``order`` must be a power of two."""
    if order < 1 or order & (order - 1):
        raise DomainError(f"Sylvester construction needs a power of two, got {order}")
    h = np.ones((1, 1), dtype=np.int64)
    while h.shape[0] < order:
        h = np.block([[h, h], [h, -h]])
    return HadamardMatrix(order, h)


def chsh_game() -> BellFunctional:
    """CHSH as a game: uniform questions, win iff a XOR b = x AND y."""
    coeffs = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for a in range(2):
                coeffs[x, y, a, a ^ (x & y)] = 0.25
    return BellFunctional(Scenario.uniform(2, 2, 2), coeffs, "game", "chsh", {"construction": "chsh"})


def chsh_correlation_functional() -> BellFunctional:
    """CHSH expression with coefficients +-1/4; local value 1/2, Tsirelson value sqrt(2)/2."""
    coeffs = np.array([[1.0, 1.0], [1.0, -1.0]]) / 4
    return BellFunctional(Scenario.uniform(2, 2, 2), coeffs, "correlation", "chsh-cor", {"construction": "chsh-cor"})


def trivial_game(parties: int = 2) -> BellFunctional:
    """One input, one output per party, coefficient 1."""
    scenario = Scenario.uniform(parties, 1, 1)
    return BellFunctional(scenario, np.ones(scenario.shape), "game", "trivial", {"construction": "trivial", "parties": parties})


def correlation_functional(coeffs, name: str = "correlation") -> BellFunctional:
    coeffs = np.asarray(coeffs, dtype=float)
    scenario = Scenario(coeffs.shape, (2,) * coeffs.ndim)
    return BellFunctional(scenario, coeffs, "correlation", name)


def hadamard_correlation_functional(n_inputs: int) -> BellFunctional:
    """Tripartite functional M[x, y, 0] = h[x, y] on the largest Hadamard block that fits.

    The block order is the power of two with ``n_inputs/2 < order <= n_inputs``;
    all other coefficients vanish.
    """
    if n_inputs < 2:
        raise DomainError("need at least two inputs")
    order = 1 << (n_inputs.bit_length() - 1)
    h = sylvester_hadamard(order).entries
    coeffs = np.zeros((n_inputs,) * 3)
    coeffs[:order, :order, 0] = h
    return BellFunctional(
        Scenario.uniform(3, n_inputs, 2),
        coeffs,
        "correlation",
        f"hadamard-cor-{n_inputs}",
        {"construction": "hadamard-cor", "N": n_inputs},
    )


# Khot-Vishnoi game -----------------------------------------------------------


@dataclass(frozen=True)
class KVParams:
    """Size ``n = 2**l`` of the hypercube and noise rate ``eta``.

    ``eta`` defaults to ``1/2 - 1/log2(n)``.
    """

    l: int
    eta: float | None = None

    def __post_init__(self):
        if self.l < 1:
            raise DomainError("KV game needs l >= 1")
        eta = 0.5 - 1.0 / self.l if self.eta is None else float(self.eta)
        if not 0.0 <= eta <= 0.5:
            raise DomainError(f"eta = {eta} outside [0, 1/2]; pass eta explicitly for l = {self.l}")
        object.__setattr__(self, "eta", eta)

    @property
    def n(self) -> int:
        return 1 << self.l

    @property
    def num_cosets(self) -> int:
        return (1 << self.n) // self.n


def _popcount(v: int) -> int:
    return bin(v).count("1")


def hadamard_code(l: int) -> list[int]:
    """Codewords of the length-2^l Hadamard code as n-bit integers.

    Coordinate i of a vector sits at bit ``n-1-i`` so that integer order is
    lexicographic order of the bit strings.  Codeword s has coordinate
    i equal to <s, i> mod 2.
    """
    n = 1 << l
    words = []
    for s in range(n):
        w = 0
        for i in range(n):
            if _popcount(s & i) & 1:
                w |= 1 << (n - 1 - i)
        words.append(w)
    return words


def kv_cosets(l: int) -> list[list[int]]:
    """Cosets of the Hadamard code in {0,1}^n, each sorted, ordered by smallest member."""
    n = 1 << l
    code = hadamard_code(l)
    seen = np.zeros(1 << n, dtype=bool)
    cosets = []
    for u in range(1 << n):
        if seen[u]:
            continue
        members = sorted(u ^ c for c in code)
        seen[members] = True
        cosets.append(members)
    return cosets


def kv_noise(z: int | np.ndarray, params: KVParams) -> np.ndarray:
    """Probability eta^|z| (1-eta)^(n-|z|) of the noise vector z."""
    weight = np.vectorize(_popcount)(np.asarray(z))
    return params.eta**weight * (1.0 - params.eta) ** (params.n - weight)


def khot_vishnoi(params: KVParams) -> BellFunctional:
    """Khot-Vishnoi game on the cosets of the Hadamard code.

    Questions are cosets; answer index ``a`` names the a-th element of the
    question's coset.  The coefficient of answers (u, w) is the probability
    of the question pair times the chance that the noise equals u XOR w.
    """
    cosets = np.array(kv_cosets(params.l), dtype=np.int64)
    n_c = cosets.shape[0]
    z = cosets[:, None, :, None] ^ cosets[None, :, None, :]
    coeffs = kv_noise(z, params) / n_c
    return BellFunctional(
        Scenario.uniform(2, n_c, params.n),
        coeffs,
        "game",
        f"kv-l{params.l}",
        {"construction": "kv", "l": params.l, "eta": params.eta},
    )


def kv_question_distribution(params: KVParams) -> np.ndarray:
    """Probability that Alice is asked coset U and Bob coset W."""
    cosets = kv_cosets(params.l)
    index = {u: i for i, c in enumerate(cosets) for u in c}
    n_c = len(cosets)
    dist = np.zeros((n_c, n_c))
    weights = kv_noise(np.arange(1 << params.n), params)
    for i, c in enumerate(cosets):
        u = c[0]
        for z, pz in enumerate(weights):
            dist[i, index[u ^ z]] += pz / n_c
    return dist


# Product constructions ---------------------------------------------------------


def _require_bipartite(g: BellFunctional, what: str) -> None:
    if g.parties != 2 or g.is_correlation:
        raise UnsupportedScenario(f"{what} needs a bipartite functional with outputs")


def _product_kind(*gs: BellFunctional) -> str:
    return "game" if all(g.kind == "game" for g in gs) else "general"


def tensor_product(g: BellFunctional, h: BellFunctional) -> BellFunctional:
    """Both games played in parallel; each party answers a pair of questions."""
    _require_bipartite(g, "tensor_product")
    _require_bipartite(h, "tensor_product")
    coeffs = np.einsum("pqPQ,rsRS->prqsPRQS", g.coeffs, h.coeffs)
    (na, nb), (ka, kb) = g.scenario.inputs, g.scenario.outputs
    (ma, mb), (la, lb) = h.scenario.inputs, h.scenario.outputs
    scenario = Scenario((na * ma, nb * mb), (ka * la, kb * lb))
    return BellFunctional(
        scenario,
        coeffs.reshape(scenario.shape),
        _product_kind(g, h),
        f"({g.name})x({h.name})",
        {"construction": "tensor", "left": g.meta, "right": h.meta},
    )


def hat_construction(g: BellFunctional) -> BellFunctional:
    """Tripartite game from three pairwise copies of ``g``.

    Copy 1 is played by (A, B), copy 2 by (A, C) and copy 3 by (B, C);
    each player's question and answer is a pair, first component for the
    earlier copy.  A takes the first role in copies 1 and 2, B the second
    role in copy 1 and the first in copy 3, C the second role in copies 2
    and 3.
    """
    _require_bipartite(g, "hat_construction")
    G = g.coeffs
    coeffs = np.einsum("pqPQ,rsRS,tuTU->prqtsuPRQTSU", G, G, G)
    (n1, n2), (k1, k2) = g.scenario.inputs, g.scenario.outputs
    scenario = Scenario((n1 * n1, n2 * n1, n2 * n2), (k1 * k1, k2 * k1, k2 * k2))
    return BellFunctional(
        scenario,
        coeffs.reshape(scenario.shape),
        _product_kind(g),
        f"hat({g.name})",
        {"construction": "hat", "base": g.meta},
    )


def tilde_construction(g: BellFunctional) -> BellFunctional:
    """Tripartite game from two copies: (A, B) play one, (B, C) the other."""
    _require_bipartite(g, "tilde_construction")
    coeffs = np.einsum("pqPQ,rsRS->pqrsPQRS", g.coeffs, g.coeffs)
    (n1, n2), (k1, k2) = g.scenario.inputs, g.scenario.outputs
    scenario = Scenario((n1, n2 * n1, n2), (k1, k2 * k1, k2))
    return BellFunctional(
        scenario,
        coeffs.reshape(scenario.shape),
        _product_kind(g),
        f"tilde({g.name})",
        {"construction": "tilde", "base": g.meta},
    )


def check_normalization(g: BellFunctional) -> bool:
    """True iff ``g`` is non-negative and its per-question maxima sum to at most 1."""
    if g.is_correlation:
        raise UnsupportedScenario("normalisation is defined for full functionals")
    if g.coeffs.size and g.coeffs.min() < 0:
        return False
    return normalization_sum(g.coeffs, g.parties) <= 1.0 + PROB_TOL


def xor_form(g: BellFunctional) -> tuple[float, BellFunctional] | None:
    """Split a binary-output functional that only sees the output parity.

    Returns ``(offset, c)`` with <g, P> = offset + <c, gamma(P)> for every
    behaviour P, or None when coefficients depend on more than the parity.
    """
    if g.is_correlation or set(g.scenario.outputs) != {2}:
        return None
    k = g.parties
    parity = np.zeros(())
    for _ in range(k):
        parity = np.add.outer(parity, np.array([0, 1]))
    odd = (parity % 2).astype(bool)
    flat = g.coeffs.reshape(int(np.prod(g.scenario.inputs)), -1)
    odd_flat = odd.ravel()
    even_vals, odd_vals = flat[:, ~odd_flat], flat[:, odd_flat]
    if np.ptp(even_vals, axis=1).max() > 0 or np.ptp(odd_vals, axis=1).max() > 0:
        return None
    e, o = even_vals[:, 0], odd_vals[:, 0]
    offset = float(np.sum(e + o) / 2)
    coeffs = ((e - o) / 2).reshape(g.scenario.inputs)
    cor = BellFunctional(g.scenario, coeffs, "correlation", f"xor({g.name})")
    return offset, cor


def random_game(scenario: Scenario, rng: np.random.Generator) -> BellFunctional:
    """Uniform random non-negative coefficients scaled to normalisation sum 1."""
    coeffs = rng.random(scenario.shape)
    total = normalization_sum(coeffs, scenario.parties)
    return BellFunctional(scenario, coeffs / total, "game", "random-game")


def random_correlation_functional(inputs, rng: np.random.Generator) -> BellFunctional:
    """Coefficients drawn uniformly from [-1, 1]."""
    return correlation_functional(rng.uniform(-1.0, 1.0, size=tuple(inputs)), "random-cor")


def correlation_embedding(m: BellFunctional) -> BellFunctional:
    """Full functional with coefficients M[x] * a_1 ... a_k on +-1 outputs.

    Its value on any behaviour P equals <m, gamma(P)>.
    """
    if not m.is_correlation:
        raise UnsupportedScenario("expected a correlation functional")
    signs = np.ones(())
    for _ in range(m.parties):
        signs = np.multiply.outer(signs, OUTPUT_SIGNS)
    coeffs = np.multiply.outer(m.coeffs, signs)
    return BellFunctional(m.scenario, coeffs, "general", f"embed({m.name})", {"construction": "embedding"})


__all__ = [
    "HadamardMatrix",
    "KVParams",
    "chsh_correlation_functional",
    "chsh_game",
    "check_normalization",
    "correlation_embedding",
    "correlation_functional",
    "hadamard_code",
    "hadamard_correlation_functional",
    "hat_construction",
    "khot_vishnoi",
    "kv_cosets",
    "kv_noise",
    "kv_question_distribution",
    "random_correlation_functional",
    "random_game",
    "sylvester_hadamard",
    "tensor_product",
    "tilde_construction",
    "trivial_game",
    "xor_form",
]
