"""Linear combination of unitaries for the sparse potential operators.

V_X = (1/2) * (LCU1 + LCU2 + LCU3 + LCU4) with LCU1 = I, LCU2 diagonal, and
LCU3 / LCU4 a rotation and a reflection in the two planes V_X touches. The
same pattern applied to the planes of V_Y gives a set for V_Y; that one is
derived by symmetry and has no printed counterpart.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evolution import potential_matrix_x, potential_matrix_y


@dataclass(frozen=True)
class LcuSet:
    terms: np.ndarray  # (4, 6, 6)
    weights: np.ndarray  # (4,)

    def combine(self) -> np.ndarray:
        return np.einsum("k,kij->ij", self.weights, self.terms)

    @property
    def normalization(self) -> float:
        """Sum of |weights|: the LCU normalization cost (2 here)."""
        return float(np.sum(np.abs(self.weights)))

    def orthogonality_residuals(self) -> np.ndarray:
        eye = np.eye(6)
        return np.array([np.max(np.abs(t.T @ t - eye)) for t in self.terms])


def _lcu_from_planes(planes) -> LcuSet:
    """``planes``: (src, dst, sign, beta) with the potential row
    q_dst <- sign*sin(beta)*q_src + cos(beta)*q_dst."""
    src = {p[0] for p in planes}
    lcu1 = np.eye(6)
    lcu2 = np.diag([1.0 if c in src else -1.0 for c in range(6)])
    lcu3 = np.eye(6)
    lcu4 = np.eye(6)
    for s, d, sg, beta in planes:
        c, sn = np.cos(beta), np.sin(beta)
        lcu3[s, s], lcu3[s, d], lcu3[d, s], lcu3[d, d] = c, -sg * sn, sg * sn, c
        lcu4[s, s], lcu4[s, d], lcu4[d, s], lcu4[d, d] = -c, sg * sn, sg * sn, c
    return LcuSet(np.stack([lcu1, lcu2, lcu3, lcu4]), np.full(4, 0.5))


def lcu_terms(beta0: float, beta2: float) -> LcuSet:
    """The four unitaries whose half-sum is V_X(beta0, beta2)."""
    if not (np.isfinite(beta0) and np.isfinite(beta2)):
        raise ValueError("angles must be finite")
    return _lcu_from_planes([(1, 5, 1.0, beta0), (2, 4, -1.0, beta2)])


def lcu_terms_y(beta1: float, beta3: float) -> LcuSet:
    """Same construction for V_Y(beta1, beta3) (derived by symmetry)."""
    if not (np.isfinite(beta1) and np.isfinite(beta3)):
        raise ValueError("angles must be finite")
    return _lcu_from_planes([(0, 5, -1.0, beta1), (2, 3, 1.0, beta3)])


def verify_lcu(beta0: float, beta2: float) -> float:
    """Max-abs entry of V_X - (1/2) sum LCU_i."""
    return float(np.max(np.abs(potential_matrix_x(beta0, beta2) - lcu_terms(beta0, beta2).combine())))


def verify_lcu_y(beta1: float, beta3: float) -> float:
    return float(np.max(np.abs(potential_matrix_y(beta1, beta3) - lcu_terms_y(beta1, beta3).combine())))
