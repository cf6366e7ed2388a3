"""JSON instance documents, shipped fixtures and random instance generators.

Instance documents::

    {"family": "separable", "tables": [[...], ...], "K": k}
    {"family": "oxs", "left": N, "right": M, "edges": [[i, j, w], ...],
     "caps": [...], "right_caps": [...]}          # right_caps optional, default 1
    {"family": "matroid_distance", "matroid": {...}}
    {"family": "table", "points": [[...], ...], "values": [...]}

Any document may add ``"rescale": [lower, upper]`` to map its values onto
``[0, 1]``.  Matroid documents::

    {"type": "uniform", "n": N, "r": r}
    {"type": "partition", "blocks": [[...], ...], "caps": [...], "n": N}   # n optional
    {"type": "explicit", "bases": [[...], ...], "n": N}                    # n optional
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InstanceError, MnatError
from .lattice import TableValuation, Valuation, rescale
from .matroids import Matroid, explicit_matroid, partition_matroid, uniform_matroid
from .valuations import (
    BipartiteFlowSpec,
    SeparableConcaveSpec,
    geometric_tables,
    matroid_distance,
    oxs_maxflow,
    separable_concave,
)


def _require(doc, key):
    if not isinstance(doc, dict) or key not in doc:
        raise InstanceError(f"missing key {key!r}")
    return doc[key]


def load_matroid(doc) -> Matroid:
    kind = _require(doc, "type")
    try:
        if kind == "uniform":
            return uniform_matroid(int(_require(doc, "n")), int(_require(doc, "r")))
        if kind == "partition":
            return partition_matroid(_require(doc, "blocks"), _require(doc, "caps"), doc.get("n"))
        if kind == "explicit":
            return explicit_matroid(_require(doc, "bases"), doc.get("n"))
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"bad {kind} matroid: {exc}") from exc
    raise InstanceError(f"unknown matroid type {kind!r}")


def load_instance(doc) -> Valuation:
    """Build a valuation from a parsed JSON document."""
    family = _require(doc, "family")
    try:
        if family == "separable":
            f = separable_concave(SeparableConcaveSpec(_require(doc, "tables"), _require(doc, "K")))
        elif family == "oxs":
            spec = BipartiteFlowSpec(
                int(_require(doc, "left")),
                int(_require(doc, "right")),
                tuple(tuple(e) for e in _require(doc, "edges")),
                tuple(_require(doc, "caps")),
                tuple(doc["right_caps"]) if "right_caps" in doc else None,
            )
            f = oxs_maxflow(spec)
        elif family == "matroid_distance":
            f = matroid_distance(load_matroid(_require(doc, "matroid")))
        elif family == "table":
            points = _require(doc, "points")
            values = _require(doc, "values")
            if len(points) != len(values):
                raise InstanceError("points and values differ in length")
            f = TableValuation({tuple(p): v for p, v in zip(points, values)})
        else:
            raise InstanceError(f"unknown family {family!r}")
        if "rescale" in doc:
            lower, upper = doc["rescale"]
            f = rescale(f, float(lower), float(upper))
    except MnatError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise InstanceError(f"bad {family} instance: {exc}") from exc
    return f


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_instance_file(path) -> Valuation:
    return load_instance(read_json(path))


def load_matroid_file(path) -> Matroid:
    return load_matroid(read_json(path))


# -- shipped fixtures ---------------------------------------------------------

SUPERMODULAR_DOC = {
    "family": "table",
    "points": [[0, 0], [0, 1], [1, 0], [1, 1]],
    "values": [0.0, 0.0, 0.0, 1.0],
}

# Bandit fixture: N = 4, K = 2, values in [0, 1].
BANDIT_SEPARABLE_DOC = {
    "family": "separable",
    "tables": [[0.0, 0.40, 0.60], [0.0, 0.39, 0.585], [0.0, 0.375, 0.5625], [0.0, 0.35, 0.525]],
    "K": 2,
}

SHIPPED_DOCS = {
    "separable-2": {"family": "separable", "tables": [[0, 1, 1.5], [0, 0.8, 1.0]], "K": 2},
    "separable-unit": {"family": "separable", "tables": [[0, 1], [0, 1]], "K": 2},
    "separable-3": {"family": "separable", "tables": [[0, 0.5, 0.7], [0, 0.6, 0.6], [0, -0.1, -0.5]], "K": 3},
    "separable-4": BANDIT_SEPARABLE_DOC,
    "oxs-2x2": {"family": "oxs", "left": 2, "right": 2,
                "edges": [[1, 1, 0.3], [1, 2, 0.1], [2, 1, 0.2], [2, 2, 0.2]], "caps": [1, 1]},
    "oxs-3x2": {"family": "oxs", "left": 3, "right": 2,
                "edges": [[1, 1, 0.9], [1, 2, 0.4], [2, 1, 0.7], [3, 2, 0.5], [3, 1, 0.2]], "caps": [1, 1, 1]},
    "flow-3x3-caps": {"family": "oxs", "left": 3, "right": 3,
                      "edges": [[1, 1, 1.0], [1, 2, 0.2], [2, 2, 0.8], [2, 3, -0.3], [3, 1, 0.6], [3, 3, 0.4]],
                      "caps": [2, 2, 2], "right_caps": [2, 1, 3]},
    "flow-4x2": {"family": "oxs", "left": 4, "right": 2,
                 "edges": [[1, 1, 0.5], [2, 1, 0.45], [2, 2, 0.3], [3, 2, 0.6], [4, 1, 0.1], [4, 2, 0.2]],
                 "caps": [2, 1, 2, 1], "right_caps": [2, 2]},
    "matroid-U23": {"family": "matroid_distance", "matroid": {"type": "uniform", "n": 3, "r": 2}},
    "matroid-partition": {"family": "matroid_distance",
                          "matroid": {"type": "partition", "blocks": [[1, 2], [3, 4]], "caps": [1, 1]}},
    "matroid-explicit": {"family": "matroid_distance",
                         "matroid": {"type": "explicit", "bases": [[1, 2], [1, 3], [2, 3], [2, 4], [3, 4]]}},
}

# Three matroids over {1..6} sharing the transversal {1, 4, 5}.
COMMON_BASE_TRIPLE = (
    {"type": "partition", "blocks": [[1, 2], [3, 4], [5, 6]], "caps": [1, 1, 1]},
    {"type": "partition", "blocks": [[1, 3], [2, 5], [4, 6]], "caps": [1, 1, 1]},
    {"type": "partition", "blocks": [[1, 6], [2, 4], [3, 5]], "caps": [1, 1, 1]},
)

# Ranks 1, 2, 3: bases are never equicardinal across the triple.
RANK_MISMATCH_TRIPLE = (
    {"type": "uniform", "n": 6, "r": 1},
    {"type": "uniform", "n": 6, "r": 2},
    {"type": "uniform", "n": 6, "r": 3},
)

# Same rank, no common base: each pair of elements shares a block in one of the three.
PAIRING_TRIPLE = (
    {"type": "partition", "blocks": [[1, 2], [3, 4]], "caps": [1, 1]},
    {"type": "partition", "blocks": [[1, 3], [2, 4]], "caps": [1, 1]},
    {"type": "partition", "blocks": [[1, 4], [2, 3]], "caps": [1, 1]},
)


def supermodular_fixture() -> Valuation:
    return load_instance(SUPERMODULAR_DOC)


def bandit_fixture() -> Valuation:
    return load_instance(BANDIT_SEPARABLE_DOC)


def shipped_instances() -> dict:
    return {name: load_instance(doc) for name, doc in SHIPPED_DOCS.items()}


def triple(docs) -> tuple:
    return tuple(load_matroid(d) for d in docs)


# -- random instances ---------------------------------------------------------


def random_separable(rng: np.random.Generator, n: int, hi: int = 2, budget: int | None = None) -> Valuation:
    coeffs = rng.uniform(0.0, 1.0, n)
    K = int(budget if budget is not None else rng.integers(1, n * hi + 1))
    return separable_concave(SeparableConcaveSpec(geometric_tables(coeffs, hi), K))


def random_oxs(rng: np.random.Generator, n: int, m: int = 3, hi: int = 1, density: float = 0.6,
               allow_negative: bool = False) -> Valuation:
    edges = []
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if rng.random() < density:
                low = -0.5 if allow_negative else 0.0
                edges.append((i, j, round(float(rng.uniform(low, 1.0)), 3)))
    right_caps = tuple(int(c) for c in rng.integers(1, hi + 1, m))
    # A zero-weight sink agent keeps every allocation routable (items may go unmatched).
    edges += [(i, m + 1, 0.0) for i in range(1, n + 1)]
    spec = BipartiteFlowSpec(n, m + 1, tuple(edges), (hi,) * n, right_caps + (n * hi,))
    return oxs_maxflow(spec)


def random_matroid(rng: np.random.Generator, n: int) -> Matroid:
    if rng.random() < 0.5:
        return uniform_matroid(n, int(rng.integers(0, n + 1)))
    perm = [int(e) + 1 for e in rng.permutation(n)]
    n_blocks = int(rng.integers(1, n + 1))
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, n), size=n_blocks - 1, replace=False)) if n_blocks > 1 else []
    blocks = [perm[a:b] for a, b in zip([0] + cuts, cuts + [n])]
    caps = [int(rng.integers(0, len(b) + 1)) for b in blocks]
    return partition_matroid(blocks, caps, n)


def random_instance(rng: np.random.Generator, max_n: int = 4) -> Valuation:
    """A random member of one of the three families with ``N <= max_n`` and box ``<= {0,1,2}^N``."""
    kind = int(rng.integers(3))
    n = int(rng.integers(1, max_n + 1))
    if kind == 0:
        return random_separable(rng, n, hi=int(rng.integers(1, 3)))
    if kind == 1:
        return random_oxs(rng, n, m=int(rng.integers(1, 4)), hi=int(rng.integers(1, 3)),
                          allow_negative=bool(rng.random() < 0.3))
    return matroid_distance(random_matroid(rng, n))
