"""JSON interchange for Bell functionals.

A game file lists only the non-zero coefficients, with 1-based input and
output labels.  Correlation functionals have no outputs, so their entries
carry no ``"a"`` field.  Floats are written with Python's shortest
round-trip representation, so saving and loading is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .model import KINDS, BellFunctional, Scenario

REQUIRED_KEYS = ("parties", "inputs", "outputs", "kind", "coeffs")


def to_document(m: BellFunctional) -> dict:
    k = m.parties
    entries = []
    # keep negative zeros so the round trip is bitwise exact
    present = (m.coeffs != 0) | np.signbit(m.coeffs)
    for index in zip(*np.nonzero(present)):
        entry = {"x": [int(i) + 1 for i in index[:k]]}
        if not m.is_correlation:
            entry["a"] = [int(i) + 1 for i in index[k:]]
        entry["v"] = float(m.coeffs[index])
        entries.append(entry)
    return {
        "parties": k,
        "inputs": list(m.scenario.inputs),
        "outputs": list(m.scenario.outputs),
        "kind": m.kind,
        "name": m.name,
        "coeffs": entries,
        "meta": m.meta,
    }


def from_document(doc: dict) -> BellFunctional:
    missing = [key for key in REQUIRED_KEYS if key not in doc]
    if missing:
        raise ValidationError(f"game file lacks {', '.join(missing)}")
    k = int(doc["parties"])
    inputs, outputs = tuple(int(n) for n in doc["inputs"]), tuple(int(n) for n in doc["outputs"])
    if len(inputs) != k or len(outputs) != k:
        raise ValidationError("inputs and outputs need one entry per party")
    kind = doc["kind"]
    if kind not in KINDS:
        raise ValidationError(f"unknown kind {kind!r}")
    scenario = Scenario(inputs, outputs)
    correlation = kind == "correlation"
    coeffs = np.zeros(inputs if correlation else scenario.shape)
    seen = set()
    for n, entry in enumerate(doc["coeffs"]):
        x = tuple(int(i) - 1 for i in entry["x"])
        a = () if correlation else tuple(int(i) - 1 for i in entry["a"])
        if len(x) != k or len(a) != (0 if correlation else k):
            raise ValidationError(f"coefficient {n}: wrong number of labels")
        if any(not 0 <= i < b for i, b in zip(x, inputs)) or any(not 0 <= i < b for i, b in zip(a, outputs)):
            raise ValidationError(f"coefficient {n}: label out of range (labels are 1-based)")
        if x + a in seen:
            raise ValidationError(f"coefficient {n}: duplicate entry for x={entry['x']}")
        seen.add(x + a)
        v = float(entry["v"])
        if kind == "game" and v < 0:
            raise ValidationError(f"coefficient {n}: games need non-negative coefficients")
        coeffs[x + a] = v
    return BellFunctional(scenario, coeffs, kind, doc.get("name", "functional"), doc.get("meta", {}))


def dumps(m: BellFunctional) -> str:
    return json.dumps(to_document(m), indent=1)


def loads(text: str) -> BellFunctional:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}") from exc
    return from_document(doc)


def save(m: BellFunctional, path) -> None:
    Path(path).write_text(dumps(m) + "\n")


def load(path) -> BellFunctional:
    return loads(Path(path).read_text())


def same_functional(f: BellFunctional, g: BellFunctional) -> bool:
    """Exact equality of scenario, kind and every coefficient bit."""
    return (
        f.scenario == g.scenario
        and f.kind == g.kind
        and f.coeffs.shape == g.coeffs.shape
        and bool(np.array_equal(f.coeffs.view(np.uint64), g.coeffs.view(np.uint64)))
    )
