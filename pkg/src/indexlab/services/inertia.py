"""Inertie de matrices symétriques par factorisation triangulaire (loi de Sylvester).

Petites matrices : LDLᵀ de Bunch-Kaufman (scipy.linalg.ldl, blocs 1×1 et 2×2).
Grandes matrices : SuperLU en mode symétrique, pivots diagonaux, de sorte que
A = Pᵀ L D Lᵀ P et que les signes de diag(U) donnent l'inertie.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from indexlab.config import settings
from indexlab.exceptions import SingularPivot
from indexlab.logging_conf import get_logger
from indexlab.utils.seed import make_rng

logger = get_logger(__name__)

_PIVOT_TOL = 1e-14


@dataclass(frozen=True)
class InertiaResult:
    """Triplet d'inertie et provenance du calcul."""

    negative: int
    zero: int
    positive: int
    perturbed: bool
    method: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "negative": self.negative,
            "zero": self.zero,
            "positive": self.positive,
            "perturbed": self.perturbed,
            "method": self.method,
        }


def _block_inertia(d: np.ndarray, tol: float) -> tuple[int, int, int]:
    """Compte les signes d'une matrice diagonale par blocs 1×1 / 2×2."""
    n = d.shape[0]
    neg = zero = pos = 0
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            eigs = np.linalg.eigvalsh(d[i : i + 2, i : i + 2])
            i += 2
        else:
            eigs = np.array([d[i, i]])
            i += 1
        neg += int(np.sum(eigs < -tol))
        pos += int(np.sum(eigs > tol))
        zero += int(np.sum(np.abs(eigs) <= tol))
    return neg, zero, pos


def dense_inertia(A: Any) -> InertiaResult:
    """Inertie par Bunch-Kaufman dense."""
    dense = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    if dense.size == 0:
        return InertiaResult(0, 0, 0, False, "bunch-kaufman")
    _, d, _ = la.ldl(dense, lower=True, hermitian=True)
    scale = max(np.abs(dense).max(), 1.0)
    neg, zero, pos = _block_inertia(d, _PIVOT_TOL * scale)
    return InertiaResult(neg, zero, pos, False, "bunch-kaufman")


def _superlu_pivots(A: sp.csc_matrix) -> np.ndarray | None:
    """Pivots diagonaux, ou None si SuperLU a permuté hors diagonale ou échoué."""
    try:
        lu = spla.splu(
            A,
            permc_spec="MMD_AT_PLUS_A",
            diag_pivot_thresh=0.0,
            options={"SymmetricMode": True},
        )
    except RuntimeError as e:
        logger.debug(f"SuperLU failed: {e}")
        return None
    if not np.array_equal(lu.perm_r, lu.perm_c):
        logger.debug("SuperLU left the diagonal: row and column permutations differ")
        return None
    return lu.U.diagonal()


def sparse_inertia(A: sp.spmatrix) -> InertiaResult:
    """Inertie par SuperLU symétrique, avec une relance perturbée si un pivot est nul.

    Raises:
        SingularPivot: Si la relance perturbée échoue aussi et que la matrice
            dépasse le seuil dense
    """
    C = A.tocsc().astype(float)
    n = C.shape[0]
    scale = max(float(spla.norm(C, np.inf)), 1.0)
    tol = _PIVOT_TOL * scale

    pivots = _superlu_pivots(C)
    if pivots is not None and np.all(np.abs(pivots) > tol):
        return InertiaResult(
            int(np.sum(pivots < 0)), 0, int(np.sum(pivots > 0)), False, "superlu"
        )

    rng = make_rng(offset=101)
    shift = settings.pivot_perturbation * scale * rng.uniform(-1.0, 1.0, n)
    pivots = _superlu_pivots((C + sp.diags(shift)).tocsc())
    if pivots is not None and np.all(np.abs(pivots) > tol):
        logger.warning(f"Singular pivot on n={n}: inertia computed on a perturbed matrix")
        return InertiaResult(
            int(np.sum(pivots < 0)), 0, int(np.sum(pivots > 0)), True, "superlu"
        )
    if n <= 4 * settings.dense_threshold:
        logger.warning(f"SuperLU could not factor n={n} on its diagonal, falling back to Bunch-Kaufman")
        return dense_inertia(C)
    raise SingularPivot(f"Symmetric factorization failed for n={n}, even after perturbation")


def inertia(A: Any) -> InertiaResult:
    """Inertie de A (dense sous settings.dense_threshold, creuse au-delà)."""
    n = A.shape[0]
    if n <= settings.dense_threshold:
        return dense_inertia(A)
    return sparse_inertia(A if sp.issparse(A) else sp.csc_matrix(A))


def negative_inertia(A: Any) -> int:
    """Nombre de valeurs propres négatives de A, indépendant de toute masse SPD."""
    return inertia(A).negative
