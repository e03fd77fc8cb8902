"""Tests pour l'assemblage P1 de la forme de stabilité."""

import numpy as np
import pytest

from indexlab.services.assembly import (
    assemble_full,
    assemble_Q,
    assemble_weighted_mass,
    dirichlet_energy,
    intrinsic_energy,
    mass_local,
    potential_local,
    quadratic_form,
)
from indexlab.services.catalog import catenoid
from indexlab.services.mesh import build_mesh, flat_disk


@pytest.fixture(scope="module")
def disk():
    return flat_disk(1.0, 0.1)


@pytest.fixture(scope="module")
def catenoid_mesh():
    return build_mesh(catenoid(), 3.0, 1e-3, 0.2)


def test_stiffness_kills_constants(disk):
    """Les lignes de la raideur complète somment à zéro."""
    A, _ = assemble_full(disk)
    np.testing.assert_allclose(A @ np.ones(disk.n_vertices), 0.0, atol=1e-12)


def test_matrices_symmetric(catenoid_mesh):
    A, M = assemble_Q(catenoid_mesh)
    assert abs(A - A.T).max() < 1e-12
    assert abs(M - M.T).max() < 1e-12
    assert A.shape == (len(catenoid_mesh.free), len(catenoid_mesh.free))


def test_mass_integrates_area(disk):
    """1ᵀM1 = aire (λ = 1 sur le disque plat)."""
    _, M = assemble_full(disk)
    ones = np.ones(disk.n_vertices)
    assert ones @ (M @ ones) == pytest.approx(disk.areas().sum(), rel=1e-12)


def test_mass_local_constant_density():
    """Densité 1 : masse consistante classique |T|/12·(1 + δᵢⱼ)."""
    local = mass_local(np.array([2.0]), np.ones((1, 3)))
    expected = 2.0 / 12.0 * (np.ones((3, 3)) + np.eye(3))
    np.testing.assert_allclose(local[0], expected)


def test_dirichlet_energy_of_linear_function(disk):
    """∫|∇x|² = aire, exact en P1."""
    energy = dirichlet_energy(disk, disk.vertices.real)
    assert energy == pytest.approx(disk.areas().sum(), rel=1e-12)


def test_quadratic_form_ignores_dirichlet_values(disk):
    u = np.cos(disk.vertices.real) + disk.vertices.imag
    v = u.copy()
    v[disk.dirichlet] = 17.0
    assert quadratic_form(disk, u) == pytest.approx(quadratic_form(disk, v))


def test_potential_rules_order(catenoid_mesh):
    """V ≤ 0 : la règle "upper" donne la forme la plus grande."""
    u = np.cos(np.angle(catenoid_mesh.vertices)) * np.abs(catenoid_mesh.vertices)
    upper = quadratic_form(catenoid_mesh, u, "upper")
    consistent = quadratic_form(catenoid_mesh, u, "consistent")
    assert upper >= consistent - 1e-12


def test_unknown_potential_rule(disk):
    with pytest.raises(ValueError):
        potential_local(disk, "simpson")


def test_weighted_mass_positive(catenoid_mesh):
    W = assemble_weighted_mass(catenoid_mesh)
    x = np.ones(W.shape[0])
    assert x @ (W @ x) > 0


def test_intrinsic_energy_matches_conformal(catenoid_mesh):
    """La réduction conforme coïncide avec Q sur le polyèdre immergé (à la discrétisation près)."""
    mesh = catenoid_mesh
    u = np.where(mesh.dirichlet, 0.0, 1.0 - (np.log(np.abs(mesh.vertices)) / 1.8) ** 2)
    conformal = quadratic_form(mesh, u, "consistent")
    intrinsic = intrinsic_energy(mesh, u)
    assert intrinsic == pytest.approx(conformal, rel=0.1, abs=0.1)
