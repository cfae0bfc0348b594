"""Recover identifiable factors from the data matrix by subspace intersection.

For a realized pattern ``S`` the columns of the data matrix on the items
realizing ``S`` span the same space as the score columns in ``S``.
Intersecting those spans over every realized pattern containing a factor
``k`` therefore pins the factor down to a line whenever ``k`` is
identifiable; the loadings then follow row by row from exact least squares
restricted to each item's pattern.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import DEFAULT_TOL, fix_sign, numerical_rank
from .design_matrix import DesignMatrix

__all__ = [
    "Subspace",
    "RecoveryResult",
    "RecoveryError",
    "column_space",
    "intersect",
    "factor_subspace",
    "recover_theta",
    "recover_a",
    "recover",
]


class RecoveryError(ValueError):
    """Raised when an intersected subspace does not have the expected dimension.

    Signals non-identifiability, an assumption violation in the data, or a
    tolerance failure; the offending dimension is carried along.
    """

    def __init__(self, message: str, factor: int, dimension: int) -> None:
        super().__init__(message)
        self.factor = factor
        self.dimension = dimension


@dataclass(frozen=True)
class Subspace:
    """A linear subspace held as an orthonormal basis.

    ``basis`` is ``N x d`` with orthonormal columns (validated entrywise to
    within ``10 * tol``); ``d == 0`` encodes the zero subspace and doubles
    as the flag for an all-zero input to :func:`column_space`.
    """

    basis: np.ndarray
    tol: float

    def __post_init__(self) -> None:
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2:
            raise ValueError("subspace basis must be a 2-d matrix")
        gram = basis.T @ basis
        if gram.size and not np.allclose(gram, np.eye(basis.shape[1]), atol=10 * self.tol):
            raise ValueError("subspace basis is not orthonormal at the stated tolerance")
        basis = basis.copy()
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]


def column_space(m_cols, tol: float = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the numerical column space of ``m_cols``.

    Keeps the left singular vectors whose singular values are at least
    ``tol`` times the largest.  An all-zero input yields the
    zero-dimensional subspace.
    """
    cols = np.asarray(m_cols, dtype=float)
    if cols.ndim == 1:
        cols = cols[:, None]
    if cols.ndim != 2 or cols.shape[0] < 1 or cols.shape[1] < 1:
        raise ValueError(f"expected a non-empty N x r matrix, got shape {cols.shape}")
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Subspace(np.zeros((cols.shape[0], 0)), tol)
    keep = s >= tol * s[0]
    return Subspace(u[:, keep], tol)


def intersect(u: Subspace, v: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    """Numerical intersection of two subspaces via principal angles.

    The singular values of the product of the two bases are the cosines of
    the principal angles; directions with cosine at least ``1 - tol`` are
    treated as common, mapped back to ambient coordinates and
    re-orthonormalized.  Symmetric in its arguments up to the tolerance.
    """
    if u.ambient_dim != v.ambient_dim:
        raise ValueError(
            f"ambient dimensions differ: {u.ambient_dim} vs {v.ambient_dim}"
        )
    n = u.ambient_dim
    if u.dim == 0 or v.dim == 0:
        return Subspace(np.zeros((n, 0)), tol)
    left, cosines, _ = np.linalg.svd(u.basis.T @ v.basis)
    keep = cosines >= 1.0 - tol
    if not keep.any():
        return Subspace(np.zeros((n, 0)), tol)
    common = u.basis @ left[:, : int(keep.sum())]
    ortho, _ = np.linalg.qr(common)
    return Subspace(ortho, tol)


def factor_subspace(m, q: DesignMatrix, k: int, tol: float = DEFAULT_TOL) -> Subspace:
    """Intersect the pattern column spaces over all realized patterns containing ``k``.

    Patterns are folded left to right in lexicographic order for
    determinism; in exact arithmetic the result is order-independent.  If no
    realized pattern contains ``k`` (empty support) the fold is empty and
    the full ambient space is returned.
    """
    m = _as_data_matrix(m, q)
    patterns = q.realized_patterns()
    containing = sorted(tuple(sorted(p)) for p in patterns if k in p)
    if not containing:
        return Subspace(np.eye(m.shape[0]), tol)
    result: Subspace | None = None
    for pat in containing:
        items = list(patterns[frozenset(pat)])
        span = column_space(m[:, items], tol)
        result = span if result is None else intersect(result, span, tol)
    return result


def recover_theta(m, q: DesignMatrix, k: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Recover the direction of score column ``k`` from the data matrix alone.

    Requires ``k`` to be identifiable; refuses otherwise rather than
    returning a higher-dimensional subspace (use :func:`factor_subspace` for
    the subspace itself).  The returned vector has unit norm and its first
    non-negligible coordinate positive, so results are comparable across
    runs; it is parallel to the true score column whenever the data come
    from a model satisfying the assumptions.

    Raises
    ------
    RecoveryError
        If the intersected subspace does not come out one-dimensional,
        which indicates an assumption violation in the data or a tolerance
        failure; the offending dimension is attached.
    """
    k = _check_factor(q, k)
    if not q.theta_identifiable(k):
        raise ValueError(
            f"factor {k} is not identifiable from this design; refusing to recover it"
        )
    sub = factor_subspace(m, q, k, tol)
    if sub.dim != 1:
        raise RecoveryError(
            f"intersected subspace for factor {k} has dimension {sub.dim}, expected 1; "
            "the data may violate the model assumptions or the tolerance is too tight",
            factor=k,
            dimension=sub.dim,
        )
    return fix_sign(sub.basis[:, 0])


def recover_a(m, q: DesignMatrix, theta_hat, tol: float = DEFAULT_TOL):
    """Recover loadings row by row given a full score matrix estimate.

    For each item the overdetermined system restricted to the item's pattern
    is solved in the least-squares sense; entries outside the pattern are
    exact zeros.  Rescaling a column of ``theta_hat`` by ``c`` rescales the
    recovered loading column by ``1/c``, leaving the product unchanged.

    Returns
    -------
    (loadings, residuals)
        The ``J x K`` loading estimate and the per-item residual norms.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    m = _as_data_matrix(m, q)
    if theta_hat.ndim != 2 or theta_hat.shape != (m.shape[0], q.n_factors):
        raise ValueError(
            f"theta_hat shape {theta_hat.shape} does not match data rows {m.shape[0]} "
            f"and design columns {q.n_factors}"
        )
    if numerical_rank(theta_hat, tol) != q.n_factors:
        raise ValueError("theta_hat is numerically rank-deficient; loadings are not unique")
    columns = {k: theta_hat[:, k] for k in range(q.n_factors)}
    return _solve_loadings(m, q, columns)


def recover(m, q: DesignMatrix, tol: float = DEFAULT_TOL) -> RecoveryResult:
    """Run the full pipeline: directions for every identifiable factor, then loadings.

    Non-identifiable factors are skipped (their intersected-subspace
    dimension is still reported).  Loadings are solved for every item whose
    pattern touches only recovered factors; other items get NaN inside
    their pattern and exact zeros elsewhere.
    """
    m = _as_data_matrix(m, q)
    directions: dict[int, np.ndarray] = {}
    dims: list[int] = []
    for k in range(q.n_factors):
        sub = factor_subspace(m, q, k, tol)
        dims.append(sub.dim)
        if q.theta_identifiable(k):
            if sub.dim != 1:
                raise RecoveryError(
                    f"intersected subspace for identifiable factor {k} has dimension "
                    f"{sub.dim}, expected 1",
                    factor=k,
                    dimension=sub.dim,
                )
            directions[k] = fix_sign(sub.basis[:, 0])
    loadings, residuals = _solve_loadings(m, q, directions)
    return RecoveryResult(
        directions=directions,
        skipped=frozenset(k for k in range(q.n_factors) if k not in directions),
        loadings=loadings,
        residuals=residuals,
        subspace_dims=tuple(dims),
        ambient_dim=m.shape[0],
    )


@dataclass(frozen=True)
class RecoveryResult:
    """Directions and loadings recovered from one data matrix.

    ``directions`` maps each recovered factor to a unit vector (first
    non-negligible coordinate positive).  ``subspace_dims`` records, per
    factor, the dimension of the intersected subspace; it equals 1 for
    every recovered factor.  Loadings are NaN where undefined.
    """

    directions: dict[int, np.ndarray]
    skipped: frozenset[int]
    loadings: np.ndarray
    residuals: np.ndarray
    subspace_dims: tuple[int, ...]
    ambient_dim: int

    def theta_hat(self) -> np.ndarray:
        """Recovered directions as an ``N x K`` matrix, NaN for skipped columns."""
        out = np.full((self.ambient_dim, self.loadings.shape[1]), np.nan)
        for k, vec in self.directions.items():
            out[:, k] = vec
        return out


def _check_factor(q: DesignMatrix, k: int) -> int:
    if not 0 <= int(k) < q.n_factors:
        raise ValueError(f"factor index {k} out of range for K={q.n_factors}")
    return int(k)


def _as_data_matrix(m, q: DesignMatrix) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1:
        raise ValueError(f"data matrix must be 2-d and non-empty, got shape {m.shape}")
    if m.shape[1] != q.n_items:
        raise ValueError(
            f"data matrix has {m.shape[1]} columns but the design has {q.n_items} items"
        )
    return m


def _solve_loadings(m: np.ndarray, q: DesignMatrix, columns: dict[int, np.ndarray]):
    n_items, n_factors = q.n_items, q.n_factors
    loadings = np.zeros((n_items, n_factors))
    residuals = np.zeros(n_items)
    for j in range(n_items):
        pattern = sorted(q.row_pattern(j))
        if not pattern:
            residuals[j] = float(np.linalg.norm(m[:, j]))
            continue
        if any(k not in columns for k in pattern):
            loadings[j, pattern] = np.nan
            residuals[j] = np.nan
            continue
        basis = np.column_stack([columns[k] for k in pattern])
        x, *_ = np.linalg.lstsq(basis, m[:, j], rcond=None)
        loadings[j, pattern] = x
        residuals[j] = float(np.linalg.norm(basis @ x - m[:, j]))
    loadings.flags.writeable = False
    residuals.flags.writeable = False
    return loadings, residuals
