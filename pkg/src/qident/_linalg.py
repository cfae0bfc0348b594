"""Shared numerical-linear-algebra helpers."""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-8


def numerical_rank(arr: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Number of singular values at least ``tol`` times the largest.

    A zero or empty matrix has rank 0.
    """
    arr = np.asarray(arr, dtype=float)
    if arr.size == 0:
        return 0
    s = np.linalg.svd(arr, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s >= tol * s[0]))


def fix_sign(v: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Flip ``v`` so its leading non-negligible coordinate is positive.

    "Non-negligible" means magnitude above ``rel_tol`` times the largest
    magnitude, so the convention is insensitive to coordinates that are
    zero up to rounding.  The zero vector is returned unchanged.
    """
    v = np.asarray(v, dtype=float)
    mags = np.abs(v)
    top = mags.max()
    if top == 0.0:
        return v
    lead = int(np.argmax(mags > rel_tol * top))
    return -v if v[lead] < 0 else v
