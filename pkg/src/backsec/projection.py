"""Euclidean projection onto {P_s >= 0, Lambda PSD, P_s + Tr(Lambda) <= P}."""

from __future__ import annotations

import numpy as np

from .errors import ContractError
from .model import Solution, hermitian_part


def waterfill_level(v, p_total: float) -> float:
    """Smallest lambda >= 0 with sum(max(v - lambda, 0)) <= p_total.

    Uses the sorted-breakpoint method: with v sorted in descending order, the
    level is (sum of the k largest entries - p_total) / k for the largest k whose
    k-th entry still sits above that level.
    """
    v = np.asarray(v, dtype=float).ravel()
    if p_total < 0:
        raise ContractError(f"p_total must be >= 0, got {p_total}")
    if v.size == 0 or np.maximum(v, 0.0).sum() <= p_total:
        return 0.0
    u = np.sort(v)[::-1]
    levels = (np.cumsum(u) - p_total) / np.arange(1, u.size + 1)
    active = np.nonzero(u > levels)[0]
    # with p_total == 0 and ties at the top no prefix is strictly active
    lam = levels[active[-1]] if active.size else u[0]
    return max(float(lam), 0.0)


def project_feasible(p_total: float, p_cw: float, an_cov: np.ndarray) -> Solution:
    """Project (p_cw, an_cov) onto the feasible set in the Frobenius metric.

    The matrix part is symmetrized, eigendecomposed, and its eigenvalues are
    water-filled jointly with ``p_cw`` against the power budget.
    """
    if p_total < 0:
        raise ContractError(f"p_total must be >= 0, got {p_total}")
    eta, u = np.linalg.eigh(hermitian_part(np.asarray(an_cov, dtype=complex)))
    v = np.concatenate(([float(p_cw)], eta))
    lam = waterfill_level(v, p_total)
    w = np.maximum(v - lam, 0.0)
    # guard against rounding pushing the clipped sum a hair over the budget
    total = w.sum()
    if total > p_total and total > 0:
        w *= p_total / total
    mat = (u * w[1:]) @ u.conj().T
    return Solution(w[0], hermitian_part(mat))
