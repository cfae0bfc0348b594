"""Factor models: scores, loadings, their design, and the model assumptions.

A :class:`FactorModel` bundles a score matrix, a loading matrix and the
design that constrains the loadings' support.  Construction validates shapes
only; whether the instance actually satisfies the four model assumptions is
a question answered by :meth:`FactorModel.check_assumptions`, whose failures
are data, not exceptions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._linalg import DEFAULT_TOL, numerical_rank
from .design_matrix import DesignMatrix

__all__ = ["FactorModel", "AssumptionReport"]


class FactorModel:
    """A pair of real matrices tied to a binary design.

    The score matrix ``theta`` is ``N x K``, the loading matrix ``a`` is
    ``J x K``, and both share the design's column count ``K``.  The observed
    data matrix is their product ``theta @ a.T``.

    ``bound_c`` is the strict entrywise bound that every entry of ``theta``
    and ``a`` must stay below in absolute value.  It defaults to one plus the
    largest absolute entry, which always leaves slack for the perturbation
    constructions in :mod:`qident.counterexample`.
    """

    def __init__(self, theta, a, q, bound_c: float | None = None) -> None:
        if not isinstance(q, DesignMatrix):
            q = DesignMatrix(q)
        theta = np.array(theta, dtype=float)
        a = np.array(a, dtype=float)
        if theta.ndim != 2 or theta.shape[0] < 1:
            raise ValueError(f"theta must be a non-empty 2-d matrix, got shape {theta.shape}")
        if theta.shape[1] != q.n_factors:
            raise ValueError(
                f"theta has {theta.shape[1]} columns but the design has {q.n_factors}"
            )
        if a.shape != (q.n_items, q.n_factors):
            raise ValueError(
                f"loading matrix shape {a.shape} does not match design shape "
                f"{(q.n_items, q.n_factors)}"
            )
        if bound_c is None:
            bound_c = 1.0 + max(np.abs(theta).max(), np.abs(a).max())
        bound_c = float(bound_c)
        if not bound_c > 0:
            raise ValueError("bound_c must be positive")
        theta.flags.writeable = False
        a.flags.writeable = False
        self._theta = theta
        self._a = a
        self._q = q
        self._bound_c = bound_c

    @property
    def theta(self) -> np.ndarray:
        return self._theta

    @property
    def a(self) -> np.ndarray:
        return self._a

    @property
    def q(self) -> DesignMatrix:
        return self._q

    @property
    def bound_c(self) -> float:
        return self._bound_c

    @property
    def n_rows(self) -> int:
        """Number of score rows (the data matrix's row count)."""
        return self._theta.shape[0]

    @property
    def n_items(self) -> int:
        return self._q.n_items

    @property
    def n_factors(self) -> int:
        return self._q.n_factors

    def max_abs_entry(self) -> float:
        return float(max(np.abs(self._theta).max(), np.abs(self._a).max()))

    def compose(self) -> np.ndarray:
        """The data matrix ``theta @ a.T`` in working precision."""
        return self._theta @ self._a.T

    def check_assumptions(self, tol: float = DEFAULT_TOL) -> AssumptionReport:
        """Numerically verify the four model assumptions.

        1. The score columns are linearly independent (numerical rank ``K``
           at relative tolerance ``tol``).
        2. For every realized pattern ``S``, the loading block on the items
           realizing ``S`` and the columns in ``S`` has numerical rank
           ``|S|`` (impossible unless at least ``|S|`` items realize ``S``).
        3. Loadings are exactly zero wherever the design is zero.  The zero
           test is exact by design: the support constraint is structural and
           generators must write literal zeros.
        4. Every entry of both matrices is strictly below ``bound_c`` in
           absolute value.

        Failures are reported, never raised.
        """
        if not tol > 0:
            raise ValueError("tol must be positive")
        n_factors = self.n_factors

        s = np.linalg.svd(self._theta, compute_uv=False)
        a1_min = float(s[-1])
        if s.size < n_factors or s[0] == 0.0:
            a1_ok = False
        else:
            a1_ok = bool(s[-1] >= tol * s[0])

        a2_failures: list[tuple[frozenset[int], int, int]] = []
        for pattern, items in sorted(
            self._q.realized_patterns().items(), key=lambda kv: tuple(sorted(kv[0]))
        ):
            cols = sorted(pattern)
            block = self._a[np.ix_(list(items), cols)]
            rank = numerical_rank(block, tol)
            if rank != len(cols):
                a2_failures.append((pattern, rank, len(cols)))

        masked = self._q.entries == 0
        bad = masked & (self._a != 0.0)
        a3_violations = [(int(j), int(k)) for j, k in np.argwhere(bad)]

        a4_max = self.max_abs_entry()
        a4_ok = a4_max < self._bound_c

        return AssumptionReport(
            a1_rank_ok=a1_ok,
            a1_min_singular_value=a1_min,
            a2_failures=tuple(a2_failures),
            a3_violations=tuple(a3_violations),
            a4_max_entry=a4_max,
            a4_within_bound=a4_ok,
            bound_c=self._bound_c,
            overall=a1_ok and not a2_failures and not a3_violations and a4_ok,
        )


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of the four assumption checks on one model.

    ``a2_failures`` holds ``(pattern, rank_found, rank_required)`` triples;
    ``a3_violations`` holds ``(item, factor)`` pairs of nonzero loadings
    outside the design's support.  ``overall`` is the conjunction of the
    four checks.
    """

    a1_rank_ok: bool
    a1_min_singular_value: float
    a2_failures: tuple[tuple[frozenset[int], int, int], ...]
    a3_violations: tuple[tuple[int, int], ...]
    a4_max_entry: float
    a4_within_bound: bool
    bound_c: float
    overall: bool

    def to_dict(self) -> dict:
        """JSON-ready dict with fixed key order and one-based indices."""
        return {
            "a1_rank_ok": self.a1_rank_ok,
            "a1_min_singular_value": self.a1_min_singular_value,
            "a2_failures": [
                {
                    "pattern": sorted(k + 1 for k in pattern),
                    "rank_found": found,
                    "rank_required": required,
                }
                for pattern, found, required in self.a2_failures
            ],
            "a3_violations": [[j + 1, k + 1] for j, k in sorted(self.a3_violations)],
            "a4_max_entry": self.a4_max_entry,
            "a4_within_bound": self.a4_within_bound,
            "bound_c": self.bound_c,
            "overall": self.overall,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
