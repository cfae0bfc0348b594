"""Slow, obviously-correct reference implementations.

These exist to cross-check the fast paths: a literal enumeration of all
factor subsets, and a dense null-space search for mixable loading columns.
They ship in the library rather than the test tree so the command line can
run them behind ``--paranoid``.  Performance is explicitly not a goal.
"""

from __future__ import annotations

import numpy as np

from ._linalg import DEFAULT_TOL, fix_sign
from .design_matrix import DesignMatrix
from .factor_model import FactorModel

__all__ = ["intersection_set_bruteforce", "a_nonidentifiability_witness", "MAX_BRUTEFORCE_FACTORS"]

MAX_BRUTEFORCE_FACTORS = 24


def intersection_set_bruteforce(q: DesignMatrix, k: int) -> frozenset[int]:
    """Intersection of all realized factor subsets containing ``k``, by full enumeration.

    Walks all ``2^K`` subsets, keeps those containing ``k`` that some item
    realizes exactly, and intersects them; with none realized the full
    factor set is returned, matching the fast path's convention.
    """
    n_factors = q.n_factors
    if n_factors > MAX_BRUTEFORCE_FACTORS:
        raise ValueError(
            f"refusing brute-force enumeration for K={n_factors} > {MAX_BRUTEFORCE_FACTORS}"
        )
    if not 0 <= int(k) < n_factors:
        raise ValueError(f"factor index {k} out of range for K={n_factors}")
    result: frozenset[int] | None = None
    for bits in range(1 << n_factors):
        if not bits >> k & 1:
            continue
        subset = frozenset(i for i in range(n_factors) if bits >> i & 1)
        if q.r_set(subset):
            result = subset if result is None else result & subset
    return frozenset(range(n_factors)) if result is None else result


def a_nonidentifiability_witness(
    model: FactorModel, k: int, tol: float = DEFAULT_TOL
) -> np.ndarray | None:
    """Coefficients mixing other loading columns into column ``k``, if any exist.

    Searches the null space of the matrix whose columns are the other
    loading columns restricted to the items where column ``k``'s design is
    zero.  A nonzero null vector means some combination of other loadings
    vanishes exactly where loading ``k`` must vanish, so loading ``k`` can
    absorb it without breaking the support constraint: column ``k`` is not
    identifiable.  Returns ``None`` when the null space is trivial (at the
    absolute singular-value threshold ``tol``).

    The returned vector has length ``K - 1`` and is indexed by the other
    columns in increasing order.  On a model violating the rank
    assumptions the answer is unreliable; callers are expected to pass
    valid models.
    """
    q = model.q
    n_factors = q.n_factors
    if not 0 <= int(k) < n_factors:
        raise ValueError(f"factor index {k} out of range for K={n_factors}")
    if n_factors == 1:
        return None
    others = [kp for kp in range(n_factors) if kp != k]
    roots = sorted(set(range(q.n_items)) - q.support(k))
    if not roots:
        witness = np.zeros(len(others))
        witness[0] = 1.0
        return witness
    constraint = model.a[np.ix_(roots, others)]
    _, s, vh = np.linalg.svd(constraint)
    rank = int(np.count_nonzero(s >= tol))
    if rank >= len(others):
        return None
    return fix_sign(vh[-1])
