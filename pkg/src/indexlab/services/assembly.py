"""Assemblage P1 de la forme Q(u) = ∫ |∇u|² + V u² dx dy sur la carte.

La réduction conforme ∫|∇_Σ u|² dA = ∫|∇u|² dx dy ramène l'opérateur de
stabilité à un problème euclidien de potentiel V = 2κλ². Les matrices sont
assemblées élément par élément (COO puis CSR, sommation des doublons).
"""

from __future__ import annotations

from typing import Literal

import numpy as np
import scipy.sparse as sp

from indexlab.config import settings
from indexlab.logging_conf import get_logger
from indexlab.services.mesh import ConformalMesh

logger = get_logger(__name__)

PotentialRule = Literal["upper", "consistent", "lumped"]

_CONSTANT_MASS = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


def _opposite_edges(corners: np.ndarray) -> np.ndarray:
    """e_i = p_{i+2} - p_{i+1} pour chaque sommet i, forme (m, 3, ...)."""
    return np.stack(
        [corners[:, 2] - corners[:, 1], corners[:, 0] - corners[:, 2], corners[:, 1] - corners[:, 0]],
        axis=1,
    )


def _to_sparse(mesh: ConformalMesh, local: np.ndarray) -> sp.csr_matrix:
    n = mesh.n_vertices
    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    matrix = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    matrix.sum_duplicates()
    return matrix


def stiffness_local(mesh: ConformalMesh) -> np.ndarray:
    """K_T[i, j] = ∇λ_i·∇λ_j |T| = Re(e_i ē_j)/(4|T|), forme (m, 3, 3)."""
    edges = _opposite_edges(mesh.corner_points())
    areas = mesh.areas()
    dots = np.real(edges[:, :, None] * np.conj(edges[:, None, :]))
    return dots / (4.0 * areas[:, None, None])


def mass_local(areas: np.ndarray, density: np.ndarray) -> np.ndarray:
    """Masse consistante pour une densité linéaire par élément, densité (m, 3)."""
    rho = density
    total = rho.sum(axis=1)
    local = np.empty((len(areas), 3, 3))
    for i in range(3):
        for j in range(3):
            if i == j:
                local[:, i, i] = rho[:, i] / 10.0 + (total - rho[:, i]) / 30.0
            else:
                k = 3 - i - j
                local[:, i, j] = (rho[:, i] + rho[:, j]) / 30.0 + rho[:, k] / 60.0
    return local * areas[:, None, None]


def potential_local(mesh: ConformalMesh, rule: PotentialRule) -> np.ndarray:
    """Contribution ∫ V φ_i φ_j selon la règle de quadrature du potentiel."""
    areas = mesh.areas()
    vertex_v = mesh.potential[mesh.triangles]
    if rule == "consistent":
        return mass_local(areas, vertex_v)
    if rule == "lumped":
        local = np.zeros((len(areas), 3, 3))
        idx = np.arange(3)
        local[:, idx, idx] = vertex_v * (areas / 3.0)[:, None]
        return local
    if rule == "upper":
        # V ≤ 0 : la plus grande valeur échantillonnée minore |V| sur T
        top = np.maximum(vertex_v.max(axis=1), mesh.centroid_potential)
        return (top * areas)[:, None, None] * _CONSTANT_MASS[None, :, :]
    raise ValueError(f"unknown potential rule {rule!r}")


def assemble_full(
    mesh: ConformalMesh, rule: PotentialRule | None = None
) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Matrices sur tous les sommets : A = raideur + potentiel, M = masse λ²."""
    rule = rule or settings.potential_rule
    A = _to_sparse(mesh, stiffness_local(mesh) + potential_local(mesh, rule))
    M = _to_sparse(mesh, mass_local(mesh.areas(), mesh.lambda2[mesh.triangles]))
    return A, M


def free_dofs(mesh: ConformalMesh) -> np.ndarray:
    return mesh.free


def restrict(matrix: sp.spmatrix, free: np.ndarray) -> sp.csr_matrix:
    return matrix.tocsr()[free][:, free].tocsr()


def assemble_Q(
    mesh: ConformalMesh, rule: PotentialRule | None = None
) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """(A, M) restreintes aux sommets libres (Dirichlet homogène).

    A discrétise Q ; M est la masse λ² (forme d'aire), symétrique définie positive.
    """
    A, M = assemble_full(mesh, rule)
    free = free_dofs(mesh)
    logger.debug(f"Assembled Q on {len(free)} free vertices ({mesh.n_vertices} total)")
    return restrict(A, free), restrict(M, free)


def assemble_weighted_mass(mesh: ConformalMesh) -> sp.csr_matrix:
    """Masse W de densité w(|X|)·λ², restreinte aux sommets libres."""
    W = _to_sparse(mesh, mass_local(mesh.areas(), mesh.weight[mesh.triangles]))
    return restrict(W, free_dofs(mesh))


def _free_part(mesh: ConformalMesh, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[0] == mesh.n_vertices:
        return u[mesh.free]
    if u.shape[0] == len(mesh.free):
        return u
    raise ValueError(f"vector of length {u.shape[0]} does not match the mesh")


def quadratic_form(mesh: ConformalMesh, u: np.ndarray, rule: PotentialRule | None = None) -> float:
    """Q_h(u) pour u donné sur tous les sommets (valeurs de Dirichlet ignorées) ou sur les libres."""
    A, _ = assemble_Q(mesh, rule)
    x = _free_part(mesh, u)
    return float(x @ (A @ x))


def dirichlet_energy(mesh: ConformalMesh, u: np.ndarray) -> float:
    """∫|∇u|² pour u défini sur tous les sommets."""
    K = _to_sparse(mesh, stiffness_local(mesh))
    x = np.asarray(u, dtype=float)
    return float(x @ (K @ x))


def intrinsic_energy(mesh: ConformalMesh, u: np.ndarray) -> float:
    """Q évaluée sur le polyèdre immergé X(mesh) : raideur cotangente + masse 2κ dA.

    Sert de contrôle indépendant de la réduction conforme (règle "consistent").
    """
    X = mesh.positions[mesh.triangles]
    edges = np.stack([X[:, 2] - X[:, 1], X[:, 0] - X[:, 2], X[:, 1] - X[:, 0]], axis=1)
    cross = np.cross(X[:, 1] - X[:, 0], X[:, 2] - X[:, 0])
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    stiff = np.einsum("mik,mjk->mij", edges, edges) / (4.0 * areas[:, None, None])
    two_kappa = (mesh.potential / mesh.lambda2)[mesh.triangles]
    local = stiff + mass_local(areas, two_kappa)
    Q = _to_sparse(mesh, local)
    x = np.where(mesh.dirichlet, 0.0, np.asarray(u, dtype=float))
    return float(x @ (Q @ x))
