"""Seeded random instances for tests and demos, plus the decaying two-column example.

Designs come in three flavours: plain coin-flip matrices, identity-anchored
matrices (no masking at all), and planted-masking matrices whose masking
relation is exactly a requested set of pairs.  Models drawn on top of a
design satisfy all four model assumptions by construction and are verified,
not assumed, before being returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .design_matrix import DesignMatrix
from .factor_model import FactorModel

__all__ = [
    "GeneratorSpec",
    "DecayStats",
    "random_design",
    "random_model",
    "decay_example",
    "decay_stats",
    "default_split",
    "min_rows_for_model",
]

UNIFORM_RANDOM = "uniform-random"
PLANTED_MASKING = "planted-masking"
IDENTITY_ANCHORED = "identity-anchored"
POLICIES = (UNIFORM_RANDOM, PLANTED_MASKING, IDENTITY_ANCHORED)

MAX_MODEL_RETRIES = 100


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for one reproducible random instance.

    ``planted`` lists ``(masker, masked)`` column pairs (zero-based) and is
    only meaningful under the planted-masking policy.  The requested
    relation must be transitively closed: support inclusion is transitive,
    so an implied-but-unrequested pair would make "exactly these pairs"
    unsatisfiable.
    """

    n: int
    j: int
    k: int
    seed: int = 0
    pattern_policy: str = IDENTITY_ANCHORED
    planted: tuple[tuple[int, int], ...] = ()
    entry_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1 or self.j < 1 or self.k < 1:
            raise ValueError("n, j and k must all be at least 1")
        if self.pattern_policy not in POLICIES:
            raise ValueError(f"unknown pattern policy {self.pattern_policy!r}")
        if not self.entry_scale > 0:
            raise ValueError("entry_scale must be positive")
        planted = tuple((int(a), int(b)) for a, b in self.planted)
        object.__setattr__(self, "planted", planted)
        if planted and self.pattern_policy != PLANTED_MASKING:
            raise ValueError("planted pairs require the planted-masking policy")
        for masker, masked in planted:
            if not (0 <= masker < self.k and 0 <= masked < self.k):
                raise ValueError(f"planted pair {(masker, masked)} out of range for k={self.k}")
            if masker == masked:
                raise ValueError("planted pairs must involve distinct columns")


class DecayStats(NamedTuple):
    """Scaled smallest singular value, squared Frobenius norm, and its upper bound."""

    sigma_min: float
    frobenius_sq: float
    upper_bound: float


def random_design(spec: GeneratorSpec) -> DesignMatrix:
    """Draw a design matrix according to the spec's pattern policy.

    Deterministic in the seed.  Identity-anchored designs start with the
    K x K identity (so no column masks another) and fill remaining rows
    with random patterns, replicated enough times that every realized
    pattern has at least as many rows as factors in it.  Planted-masking
    designs realize exactly the requested masking pairs among all columns.
    Uniform-random designs are plain coin flips with no structural
    guarantees.
    """
    rng = np.random.default_rng([spec.seed, 1])
    if spec.pattern_policy == UNIFORM_RANDOM:
        return DesignMatrix(rng.integers(0, 2, size=(spec.j, spec.k)))
    if spec.pattern_policy == IDENTITY_ANCHORED:
        if spec.j < spec.k:
            raise ValueError("identity-anchored designs need j >= k")
        prefix = [frozenset({c}) for c in range(spec.k)]
        tail = _fill_rows(rng, spec.k, spec.j - spec.k)
        rng.shuffle(tail)
        rows = prefix + tail
        return _patterns_to_design(rows, spec.k)
    return _planted_design(rng, spec)


def random_model(spec: GeneratorSpec, q: DesignMatrix) -> FactorModel:
    """Draw a model on the given design that satisfies all four assumptions.

    Entries are continuous-uniform in ``(-entry_scale, entry_scale)``;
    loadings are masked to the design's support with exact zeros.  Such
    draws satisfy the rank assumptions almost surely, but the result is
    verified and redrawn on failure rather than trusted (bounded retries).

    The design must be structurally compatible: scores need at least as
    many rows as factors, and every realized pattern needs at least as many
    items as the factors it contains, otherwise no valid model exists on it.
    """
    if spec.n < q.n_factors:
        raise ValueError(f"n={spec.n} < k={q.n_factors}: score columns cannot be independent")
    for pattern, items in q.realized_patterns().items():
        if len(items) < len(pattern):
            raise ValueError(
                f"design incompatible with the rank assumptions: pattern "
                f"{sorted(x + 1 for x in pattern)} is realized by {len(items)} item(s), "
                f"needs at least {len(pattern)}"
            )
    rng = np.random.default_rng([spec.seed, 2])
    mask = q.entries.astype(float)
    for _ in range(MAX_MODEL_RETRIES):
        theta = rng.uniform(-spec.entry_scale, spec.entry_scale, size=(spec.n, q.n_factors))
        a = rng.uniform(-spec.entry_scale, spec.entry_scale, size=(q.n_items, q.n_factors))
        a *= mask
        model = FactorModel(theta, a, q)
        if model.check_assumptions().overall:
            return model
    raise RuntimeError(
        f"no assumption-satisfying model found in {MAX_MODEL_RETRIES} draws; "
        "the design is likely too degenerate"
    )


def decay_example(n: int) -> np.ndarray:
    """The two-column matrix whose rows alternate single entries ``1/j``.

    Row ``j`` (one-based) has its only nonzero in column 0 when ``j`` is
    even and in column 1 when ``j`` is odd, with value ``1/j`` either way.
    The columns have disjoint supports, hence are linearly independent for
    every ``n >= 2``, yet the scaled matrix loses its smallest singular
    value as ``n`` grows.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    idx = np.arange(1, n + 1, dtype=float)
    out = np.zeros((n, 2))
    even = np.arange(1, n + 1) % 2 == 0
    out[even, 0] = 1.0 / idx[even]
    out[~even, 1] = 1.0 / idx[~even]
    return out


def default_split(n: int) -> int:
    """Default head/tail split for :func:`decay_stats`: ``ceil(sqrt(n))``, capped at ``n - 1``."""
    return min(math.isqrt(n - 1) + 1, n - 1)


def decay_stats(n: int, m: int | None = None) -> DecayStats:
    """Spectral statistics of the row-normalized decaying example.

    Scales :func:`decay_example` by ``1/sqrt(n)`` and returns its smallest
    singular value, its squared Frobenius norm, and the closed-form upper
    bound ``2m/n + 2(n-m)/(m^2 n)`` obtained by splitting the rows at ``m``:
    the first ``m`` rows contribute at most ``2m/n`` and the remaining
    entries are each at most ``1/m``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if m is None:
        m = default_split(n)
    if not 1 <= m < n:
        raise ValueError(f"split must satisfy 1 <= m < n, got m={m}, n={n}")
    scaled = decay_example(n) / math.sqrt(n)
    singular = np.linalg.svd(scaled, compute_uv=False)
    sigma_min = float(singular[-1])
    frobenius_sq = float((scaled**2).sum())
    upper_bound = 2.0 * m / n + (1.0 / m**2) * 2.0 * (n - m) / n
    assert frobenius_sq <= upper_bound * (1 + 1e-12)
    assert sigma_min <= math.sqrt(frobenius_sq) * (1 + 1e-12)
    return DecayStats(sigma_min, frobenius_sq, upper_bound)


def min_rows_for_model(spec: GeneratorSpec) -> int:
    """Fewest rows on which the spec's policy can realize a model-compatible design."""
    if spec.pattern_policy == IDENTITY_ANCHORED:
        return spec.k
    if spec.pattern_policy == PLANTED_MASKING:
        return sum(len(p) for p in _planted_patterns(spec))
    return 1


def _fill_rows(rng: np.random.Generator, k: int, budget: int) -> list[frozenset[int]]:
    """Random non-empty patterns, each emitted |pattern| times so the
    realized multiplicities stay model-compatible."""
    rows: list[frozenset[int]] = []
    remaining = budget
    while remaining > 0:
        bits = rng.integers(0, 2, size=k)
        pattern = frozenset(np.flatnonzero(bits).tolist())
        if not pattern or len(pattern) > remaining:
            pattern = frozenset({int(rng.integers(k))})
        rows.extend([pattern] * len(pattern))
        remaining -= len(pattern)
    return rows


def _patterns_to_design(rows: list[frozenset[int]], k: int) -> DesignMatrix:
    entries = np.zeros((len(rows), k), dtype=np.int8)
    for j, pattern in enumerate(rows):
        entries[j, sorted(pattern)] = 1
    return DesignMatrix(entries)


def _planted_patterns(spec: GeneratorSpec) -> list[frozenset[int]]:
    """Distinct row patterns realizing exactly the requested masking pairs.

    Column ``c`` gets the pattern {c} union {columns c masks}; the requested
    relation must already contain every pair implied by transitivity.
    """
    relation = set(spec.planted)
    for a, b in list(relation):
        for c, d in list(relation):
            if b == c and a != d and (a, d) not in relation:
                raise ValueError(
                    f"plant infeasible: pairs {(a, b)} and {(c, d)} imply {(a, d)} "
                    "by transitivity of support inclusion, but it was not requested"
                )
    masks_of = {c: {d for a, d in relation if a == c} for c in range(spec.k)}
    patterns = {frozenset({c}) | frozenset(masks_of[c]) for c in range(spec.k)}
    return sorted(patterns, key=lambda p: tuple(sorted(p)))


def _planted_design(rng: np.random.Generator, spec: GeneratorSpec) -> DesignMatrix:
    patterns = _planted_patterns(spec)
    if spec.j < len(patterns):
        raise ValueError(
            f"j={spec.j} is too small: the plant needs {len(patterns)} distinct row patterns"
        )
    counts = {p: 1 for p in patterns}
    budget = spec.j - len(patterns)
    # Top multiplicities up toward |pattern| so the design supports a valid model.
    for p in patterns:
        need = len(p) - counts[p]
        take = min(need, budget)
        counts[p] += take
        budget -= take
    cycle = 0
    while budget > 0:
        counts[patterns[cycle % len(patterns)]] += 1
        cycle += 1
        budget -= 1
    rows = [p for p in patterns for _ in range(counts[p])]
    rng.shuffle(rows)
    return _patterns_to_design(rows, spec.k)
