"""Construct alternative factorizations witnessing non-identifiability.

Every masking pair in the design admits an elementary gauge change that
produces a genuinely different factorization of the same data matrix while
keeping all model assumptions intact.  Two flavours exist: one perturbs a
score column (witnessing a non-identifiable factor), the other a loading
column (witnessing a non-identifiable loading).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .factor_model import FactorModel

__all__ = [
    "AlternativeFactorization",
    "epsilon_budget",
    "theta_counterexample",
    "a_counterexample",
    "recomposition_error",
]

EPSILON_CAP = 0.1

THETA_COUNTEREXAMPLE = "theta-counterexample"
A_COUNTEREXAMPLE = "a-counterexample"


@dataclass(frozen=True)
class AlternativeFactorization:
    """A second factorization of the same data matrix.

    ``perturbation`` records ``(k, k_prime, epsilon)`` with zero-based
    column indices as passed to the constructor that produced it;
    ``which_theorem`` is one of ``"theta-counterexample"`` or
    ``"a-counterexample"``.  The perturbed matrices live in ``model``
    together with the original design and entry bound, so
    ``model.check_assumptions()`` applies directly.
    """

    model: FactorModel
    perturbation: tuple[int, int, float]
    which_theorem: str

    @property
    def theta_tilde(self) -> np.ndarray:
        return self.model.theta

    @property
    def a_tilde(self) -> np.ndarray:
        return self.model.a


def epsilon_budget(model: FactorModel, target_col: int, source_col: int) -> float:
    """Largest safe size for the elementary gauge perturbation.

    The perturbation adds ``epsilon`` times loading column ``source_col``
    into loading column ``target_col`` and, dually, subtracts ``epsilon``
    times score column ``target_col`` from score column ``source_col``.
    With ``slack`` the gap between ``bound_c`` and the current largest
    absolute entry and ``g`` the largest absolute entry of the two added
    columns (floored at 1), the budget is ``min(0.1, slack / (2 g))``:
    the entry bound then survives the perturbation with room to spare.
    """
    target_col, source_col = _check_pair(model, target_col, source_col)
    slack = model.bound_c - model.max_abs_entry()
    if slack <= 0:
        raise ValueError(
            "model entries reach or exceed bound_c; no perturbation budget exists"
        )
    g = max(
        1.0,
        float(np.abs(model.a[:, source_col]).max()),
        float(np.abs(model.theta[:, target_col]).max()),
    )
    return min(EPSILON_CAP, slack / (2.0 * g))


def theta_counterexample(
    model: FactorModel, k: int, k_prime: int, eps: float | None = None
) -> AlternativeFactorization:
    """Witness that score column ``k`` is not identifiable when ``k`` masks ``k_prime``.

    Replaces loading column ``k_prime`` by itself plus ``eps`` times loading
    column ``k``, and score column ``k`` by itself minus ``eps`` times score
    column ``k_prime``.  The product is unchanged for every ``eps`` (the two
    correction terms cancel exactly), and for ``eps`` within
    :func:`epsilon_budget` the perturbed model satisfies all assumptions.

    ``eps`` defaults to the full budget; a supplied value must lie in
    ``[0, budget]``.  ``eps = 0`` is the identity transformation.
    """
    k, k_prime = _check_pair(model, k, k_prime)
    if not model.q.masks(k, k_prime):
        raise ValueError(
            f"construction inapplicable: column {k} does not mask column {k_prime}"
        )
    eps = _resolve_eps(model, eps, target_col=k_prime, source_col=k)
    a_tilde = model.a.copy()
    a_tilde[:, k_prime] += eps * model.a[:, k]
    theta_tilde = model.theta.copy()
    theta_tilde[:, k] -= eps * model.theta[:, k_prime]
    perturbed = FactorModel(theta_tilde, a_tilde, model.q, bound_c=model.bound_c)
    return AlternativeFactorization(
        model=perturbed, perturbation=(k, k_prime, eps), which_theorem=THETA_COUNTEREXAMPLE
    )


def a_counterexample(
    model: FactorModel, k: int, k_prime: int, eps: float | None = None
) -> AlternativeFactorization:
    """Witness that loading column ``k`` is not identifiable when ``k_prime`` masks ``k``.

    Replaces loading column ``k`` by itself plus ``eps`` times loading
    column ``k_prime``, and score column ``k_prime`` by itself minus ``eps``
    times score column ``k``.  Requires ``k_prime`` to have non-empty
    support: a masking column with empty support contributes a zero loading
    column, so the perturbed loading would not actually differ.
    """
    k, k_prime = _check_pair(model, k, k_prime)
    if not model.q.masks(k_prime, k):
        raise ValueError(
            f"construction inapplicable: column {k_prime} does not mask column {k}"
        )
    if not model.q.support(k_prime):
        raise ValueError(
            f"column {k_prime} has empty support; the loading perturbation would be trivial"
        )
    eps = _resolve_eps(model, eps, target_col=k, source_col=k_prime)
    a_tilde = model.a.copy()
    a_tilde[:, k] += eps * model.a[:, k_prime]
    theta_tilde = model.theta.copy()
    theta_tilde[:, k_prime] -= eps * model.theta[:, k]
    perturbed = FactorModel(theta_tilde, a_tilde, model.q, bound_c=model.bound_c)
    return AlternativeFactorization(
        model=perturbed, perturbation=(k, k_prime, eps), which_theorem=A_COUNTEREXAMPLE
    )


def recomposition_error(alt: AlternativeFactorization, reference) -> float:
    """Relative Frobenius distance between the perturbed product and ``reference``.

    ``reference`` may be the original model or its composed data matrix.
    Absolute distance is returned when the reference is zero.
    """
    if isinstance(reference, FactorModel):
        reference = reference.compose()
    reference = np.asarray(reference, dtype=float)
    diff = float(np.linalg.norm(alt.model.compose() - reference))
    scale = float(np.linalg.norm(reference))
    return diff / scale if scale > 0 else diff


def _check_pair(model: FactorModel, first: int, second: int) -> tuple[int, int]:
    n = model.n_factors
    first, second = int(first), int(second)
    for idx in (first, second):
        if not 0 <= idx < n:
            raise ValueError(f"factor index {idx} out of range for K={n}")
    if first == second:
        raise ValueError("the two column indices must be distinct")
    return first, second


def _resolve_eps(
    model: FactorModel, eps: float | None, target_col: int, source_col: int
) -> float:
    budget = epsilon_budget(model, target_col, source_col)
    if eps is None:
        return budget
    eps = float(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps > budget:
        raise ValueError(f"eps={eps} exceeds the safe budget {budget}")
    return eps
