"""Combinatorics of binary design matrices.

Everything that depends only on the zero pattern of the design lives here:
column supports, row patterns, the items realizing a given pattern, the
masking relation between columns, and the per-column identifiability
verdicts derived from it.
"""

from __future__ import annotations

import json
import operator
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["DesignMatrix", "IdentifiabilityReport"]


class DesignMatrix:
    """Binary item-by-factor matrix driving the identifiability analysis.

    Rows index items, columns index factors.  A one in entry ``(j, k)``
    declares that item ``j`` may load on factor ``k``; a zero forces the
    corresponding loading entry to vanish.  Instances are immutable.

    All row and column indices in the Python API are zero-based.  The JSON
    report rendered by :meth:`IdentifiabilityReport.to_json` uses one-based
    indices, as do warning messages.

    Parameters
    ----------
    entries : array-like
        A ``J x K`` matrix whose entries are all 0 or 1, with ``J >= 1``
        and ``K >= 1``.  No other shape constraint applies; ``K > J`` is
        allowed.
    """

    def __init__(self, entries) -> None:
        arr = np.asarray(entries)
        if arr.ndim != 2:
            raise ValueError(f"design matrix must be two-dimensional, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(
                f"design matrix needs at least one row and one column, got shape {arr.shape}"
            )
        if arr.dtype.kind not in "biuf" or not np.isin(arr, (0, 1)).all():
            raise ValueError("design matrix entries must all be 0 or 1")
        q = arr.astype(np.int8)
        q.flags.writeable = False
        self._q = q

    @property
    def entries(self) -> np.ndarray:
        """The underlying read-only ``J x K`` 0/1 array."""
        return self._q

    @property
    def n_items(self) -> int:
        return self._q.shape[0]

    @property
    def n_factors(self) -> int:
        return self._q.shape[1]

    def __repr__(self) -> str:
        return f"DesignMatrix({self._q.tolist()!r})"

    def _check_factor(self, k: int) -> int:
        k = operator.index(k)
        if not 0 <= k < self.n_factors:
            raise ValueError(f"factor index {k} out of range for K={self.n_factors}")
        return k

    def support(self, k: int) -> frozenset[int]:
        """Items on which column ``k`` is one."""
        k = self._check_factor(k)
        return frozenset(np.flatnonzero(self._q[:, k]).tolist())

    def row_pattern(self, j: int) -> frozenset[int]:
        """Factors active on item ``j`` (possibly empty)."""
        j = operator.index(j)
        if not 0 <= j < self.n_items:
            raise ValueError(f"item index {j} out of range for J={self.n_items}")
        return frozenset(np.flatnonzero(self._q[j]).tolist())

    def masks(self, k_prime: int, k: int) -> bool:
        """Whether column ``k_prime`` masks column ``k``.

        ``k_prime`` masks ``k`` when the support of column ``k_prime`` is
        contained (non-strictly) in the support of column ``k``.  Columns
        with identical supports therefore mask each other, and an
        empty-support column masks every other column.

        The relation is only defined between distinct columns; ``k_prime ==
        k`` is rejected.
        """
        k_prime = self._check_factor(k_prime)
        k = self._check_factor(k)
        if k_prime == k:
            raise ValueError("masking is a relation between distinct columns")
        return bool(np.all(self._q[:, k_prime] <= self._q[:, k]))

    def r_set(self, s) -> frozenset[int]:
        """Items whose row pattern is exactly the factor set ``s``.

        Returns the empty set when no row realizes ``s``.
        """
        want = np.zeros(self.n_factors, dtype=np.int8)
        for k in s:
            want[self._check_factor(k)] = 1
        hit = np.all(self._q == want, axis=1)
        return frozenset(np.flatnonzero(hit).tolist())

    @cached_property
    def _pattern_items(self) -> dict[frozenset[int], tuple[int, ...]]:
        out: dict[frozenset[int], list[int]] = {}
        for j in range(self.n_items):
            pattern = frozenset(np.flatnonzero(self._q[j]).tolist())
            if pattern:
                out.setdefault(pattern, []).append(j)
        return {p: tuple(items) for p, items in out.items()}

    def realized_patterns(self) -> dict[frozenset[int], tuple[int, ...]]:
        """Map each non-empty realized row pattern to the items carrying it.

        All-zero rows realize no pattern and are excluded; they surface as
        warnings in :meth:`analyze`.
        """
        return dict(self._pattern_items)

    def zero_rows(self) -> tuple[int, ...]:
        """Items whose row is entirely zero."""
        return tuple(np.flatnonzero(~self._q.any(axis=1)).tolist())

    def intersection_set(self, k: int) -> frozenset[int]:
        """Intersection of all realized row patterns containing ``k``.

        When the support of column ``k`` is empty no realized pattern
        contains ``k`` and, by the empty-intersection convention, the full
        factor set is returned; the singleton test used by
        :meth:`theta_identifiable` then fails for ``K >= 2``.

        Runs in ``O(J K)`` by scanning rows instead of enumerating subsets;
        the subset enumeration survives as the cross-check in
        :mod:`qident.oracle`.
        """
        k = self._check_factor(k)
        rows = self._q[self._q[:, k] == 1]
        if rows.shape[0] == 0:
            return frozenset(range(self.n_factors))
        common = rows.min(axis=0) == 1
        return frozenset(np.flatnonzero(common).tolist())

    def theta_identifiable(self, k: int) -> bool:
        """Whether the latent factor for column ``k`` is identifiable up to scale.

        True exactly when column ``k`` masks no other column, which is
        equivalent to ``intersection_set(k) == {k}`` (both directions of the
        equivalence are exercised by the test suite).
        """
        k = self._check_factor(k)
        q = self._q.astype(bool)
        contained = (q[:, [k]] <= q).all(axis=0)
        contained[k] = False
        return not bool(contained.any())

    def a_identifiable(self, k: int) -> bool | None:
        """Whether the loading column ``k`` is identifiable up to scale.

        Returns ``None`` (undefined) whenever any column of the design has
        empty support: the loading characterization carries that hypothesis,
        and we surface the gap rather than guess.  Otherwise true exactly
        when no other column masks ``k``.
        """
        k = self._check_factor(k)
        q = self._q.astype(bool)
        if not q.any(axis=0).all():
            return None
        covered = (q <= q[:, [k]]).all(axis=0)
        covered[k] = False
        return not bool(covered.any())

    def analyze(self) -> IdentifiabilityReport:
        """Full per-column report: masking relation, verdicts, warnings.

        Deterministic: warnings are sorted and all arrays have fixed
        orientation (``masking[k_prime, k]`` means ``k_prime`` masks ``k``).
        """
        q = self._q.astype(bool)
        n_factors = self.n_factors
        masking = np.zeros((n_factors, n_factors), dtype=bool)
        for kp in range(n_factors):
            masking[kp] = (q[:, [kp]] <= q).all(axis=0)
        np.fill_diagonal(masking, False)
        masking.flags.writeable = False

        theta = tuple(not masking[k].any() for k in range(n_factors))
        empty_cols = [k for k in range(n_factors) if not q[:, k].any()]
        if empty_cols:
            a_verdicts: tuple[bool | None, ...] = (None,) * n_factors
        else:
            a_verdicts = tuple(not masking[:, k].any() for k in range(n_factors))
        inter = tuple(self.intersection_set(k) for k in range(n_factors))

        warnings: list[str] = []
        for j in self.zero_rows():
            warnings.append(f"row {j + 1} is all-zero")
        for k in empty_cols:
            warnings.append(f"column {k + 1} has empty support")
        for k1 in range(n_factors):
            for k2 in range(k1 + 1, n_factors):
                if (q[:, k1] == q[:, k2]).all():
                    warnings.append(f"columns {k1 + 1} and {k2 + 1} have identical support")

        return IdentifiabilityReport(
            n_factors=n_factors,
            n_items=self.n_items,
            masking=masking,
            theta_identifiable=theta,
            a_identifiable=a_verdicts,
            intersection_sets=inter,
            warnings=tuple(sorted(warnings)),
        )


@dataclass(frozen=True)
class IdentifiabilityReport:
    """Per-column identifiability verdicts for one design matrix.

    ``masking[k_prime, k]`` is true iff column ``k_prime`` masks column
    ``k`` (diagonal always false).  ``a_identifiable`` entries are ``None``
    when the loading characterization's non-empty-support hypothesis fails.
    """

    n_factors: int
    n_items: int
    masking: np.ndarray
    theta_identifiable: tuple[bool, ...]
    a_identifiable: tuple[bool | None, ...]
    intersection_sets: tuple[frozenset[int], ...]
    warnings: tuple[str, ...]

    def to_dict(self) -> dict:
        """JSON-ready dict with fixed key order and one-based indices."""
        return {
            "k": self.n_factors,
            "j": self.n_items,
            "masking": [[bool(x) for x in row] for row in self.masking],
            "theta_identifiable": [bool(v) for v in self.theta_identifiable],
            "a_identifiable": ["undefined" if v is None else bool(v) for v in self.a_identifiable],
            "intersection_sets": [sorted(k + 1 for k in s) for s in self.intersection_sets],
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
