"""Tests pour l'estimation de l'indice par exhaustion."""

import numpy as np
import pytest
import scipy.linalg as la
from scipy.special import jn_zeros

from indexlab.exceptions import MeshFailure, NotStabilized
from indexlab.services.assembly import assemble_Q
from indexlab.services.catalog import catenoid, costa, enneper, plane
from indexlab.services.forms import ParityType
from indexlab.services.mesh import MeshRegion, build_mesh, flat_disk, quarter_mesh
from indexlab.services.spectral import (
    _lowest_generalized,
    default_schedule,
    eigenfunctions_frame,
    gradient_l2_check,
    index_estimate,
    nodal_domain_count,
    parity_dirichlet,
    rotational_jacobi_field,
    run_stage,
    weighted_eigenpairs,
)


def _flat_mesher(region):
    return flat_disk(region.R, region.h)


def test_dirichlet_disk_eigenvalue():
    """Premier mode de Dirichlet du disque unité : j₀,₁²."""
    mesh = flat_disk(1.0, 0.05)
    A, M = assemble_Q(mesh)
    values, vectors = _lowest_generalized(A, M, 2)
    assert values[0] == pytest.approx(jn_zeros(0, 1)[0] ** 2, rel=2e-2)
    assert values[1] > values[0]
    np.testing.assert_allclose(vectors[:, 0] @ (M @ vectors[:, 0]), 1.0, rtol=1e-8)


def test_dense_and_iterative_solvers_agree():
    """Sous et au-dessus du seuil dense, mêmes valeurs propres."""
    mesh = flat_disk(1.0, 0.05)
    A, M = assemble_Q(mesh)
    iterative, _ = _lowest_generalized(A, M, 3)
    dense = la.eigh(A.toarray(), M.toarray(), eigvals_only=True)[:3]
    np.testing.assert_allclose(iterative, dense, rtol=1e-8)


def test_flat_disk_has_no_negative_direction():
    stage = run_stage(flat_disk(1.0, 0.1), k_eigs=1)
    assert stage.count == 0
    assert stage.lowest_eigs[0] > 0


def test_plane_index_zero():
    """Le plan est stable : tous les comptes sont nuls."""
    schedule = [MeshRegion(R=R, delta=0.0, h=0.3) for R in (2.0, 4.0, 8.0)]
    report = index_estimate(plane(), schedule, adaptive=False, k_eigs=0)
    assert report.counts == [0, 0, 0]
    assert report.stabilized
    assert report.index_estimate == 0


def test_not_stabilized_carries_partial_report():
    schedule = [MeshRegion(R=1.0, delta=0.0, h=0.25), MeshRegion(R=2.0, delta=0.0, h=0.25)]
    with pytest.raises(NotStabilized) as excinfo:
        index_estimate(plane(), schedule, k_eigs=0, mesher=_flat_mesher)
    assert excinfo.value.report.counts == [0, 0]
    assert excinfo.value.report.index_estimate is None


def test_lenient_mode_returns_report():
    schedule = [MeshRegion(R=1.0, delta=0.0, h=0.25), MeshRegion(R=2.0, delta=0.0, h=0.25)]
    report = index_estimate(plane(), schedule, k_eigs=0, mesher=_flat_mesher, strict=False)
    assert not report.stabilized
    assert report.to_dict()["counts"] == [0, 0]


def test_schedule_must_grow():
    schedule = [MeshRegion(R=4.0, delta=1e-3, h=0.3), MeshRegion(R=2.0, delta=1e-3, h=0.3)]
    with pytest.raises(MeshFailure):
        index_estimate(catenoid(), schedule)


def test_default_schedule_shrinks_excision():
    """δ_k = δ0·(R1/R_k)², R croissant."""
    schedule = default_schedule(catenoid(), radii=[10.0, 20.0, 40.0])
    assert [region.R for region in schedule] == [10.0, 20.0, 40.0]
    assert schedule[0].delta > 0
    assert schedule[1].delta == pytest.approx(schedule[0].delta / 4)
    assert schedule[2].delta == pytest.approx(schedule[0].delta / 16)
    assert default_schedule(plane(), radii=[5.0])[0].delta == 0.0


def test_mesh_above_vertex_cap(monkeypatch):
    from indexlab.config import settings

    monkeypatch.setattr(settings, "max_vertices", 10)
    with pytest.raises(MeshFailure):
        run_stage(flat_disk(1.0, 0.25))


def test_nodal_domains():
    """Fonction constante : un domaine ; x ↦ x : deux domaines."""
    mesh = flat_disk(1.0, 0.1)
    assert nodal_domain_count(mesh, np.ones(mesh.n_vertices)) == 1
    assert nodal_domain_count(mesh, mesh.vertices.real) == 2
    assert nodal_domain_count(mesh, mesh.vertices.real * mesh.vertices.imag) == 4


def test_gradient_check_identical_meshes():
    mesh = flat_disk(1.0, 0.2)
    u = 1.0 - np.abs(mesh.vertices) ** 2
    report = gradient_l2_check([mesh] * 3, [u] * 3, normalization="area")
    assert report.passes
    assert report.relative_changes == (0.0, 0.0)


def test_gradient_check_detects_growth():
    mesh = flat_disk(1.0, 0.2)
    u = 1.0 - np.abs(mesh.vertices) ** 2
    report = gradient_l2_check([mesh] * 3, [u, 2 * u, 4 * u], normalization="none")
    assert not report.passes


def test_gradient_check_length_mismatch():
    mesh = flat_disk(1.0, 0.5)
    with pytest.raises(ValueError):
        gradient_l2_check([mesh], [])


def test_weighted_eigenpairs_vanish_on_boundary():
    mesh = build_mesh(catenoid(), 3.0, 1e-3, 0.3)
    pairs = weighted_eigenpairs(mesh, 2)
    assert len(pairs) == 2
    assert pairs[0][0] <= pairs[1][0]
    assert np.all(pairs[0][1][mesh.dirichlet] == 0.0)
    frame = eigenfunctions_frame(mesh, pairs)
    assert {"eig_0", "eig_1", "X3"} <= set(frame.columns)


def test_rotational_field_vanishes_on_catenoid():
    """La caténoïde est de révolution : le champ des rotations est nul."""
    wd = catenoid()
    mesh = build_mesh(wd, 3.0, 1e-3, 0.3)
    field = rotational_jacobi_field(wd, mesh)
    assert np.max(np.abs(field)) < 1e-2


@pytest.mark.slow
def test_catenoid_index_one():
    """Indice de la caténoïde : 1."""
    schedule = [MeshRegion(R=R, delta=1e-4, h=0.15) for R in (10.0, 20.0, 40.0)]
    report = index_estimate(catenoid(), schedule, adaptive=False, k_eigs=1, strict=False)
    assert report.counts[-1] == 1
    assert all(count <= 1 for count in report.counts)


@pytest.mark.slow
def test_parity_dirichlet_marks_reflection_lines():
    """Parité impaire en τ1 : Dirichlet sur x = 0 et x = 1/2."""
    wd = costa(1.0)
    mesh = quarter_mesh(wd, MeshRegion(R=4.0, delta=0.02, h=0.5))
    odd = parity_dirichlet(mesh, ParityType.from_label("-+"), 1.0)
    on_lines = np.isclose(mesh.vertices.real, 0.0) | np.isclose(mesh.vertices.real, 0.5)
    assert np.all(odd.dirichlet[on_lines])
    even = parity_dirichlet(mesh, ParityType.from_label("++"), 1.0)
    assert np.array_equal(even.dirichlet, mesh.dirichlet)


@pytest.mark.slow
def test_enneper_order_two_index_three():
    """Enneper d'ordre 2 (g(z) = z², degré 2) : indice 3."""
    report = index_estimate(enneper(2))
    assert report.stabilized
    assert report.index_estimate == 3


@pytest.mark.slow
def test_counts_grow_with_the_region():
    """Régions emboîtées de la caténoïde : comptes croissants, jamais au-dessus de 1."""
    schedule = [MeshRegion(R=R, delta=1e-4, h=0.3) for R in (2.0, 5.0, 10.0, 20.0)]
    report = index_estimate(catenoid(), schedule, adaptive=False, k_eigs=0, strict=False)
    assert report.counts == sorted(report.counts)
    assert max(report.counts) <= 1


@pytest.mark.slow
def test_counts_grow_under_refinement():
    """Même région, pas divisé par deux : le compte ne baisse pas."""
    wd = catenoid()
    counts = [run_stage(build_mesh(wd, 10.0, 1e-4, h), k_eigs=0).count for h in (0.3, 0.15, 0.075)]
    assert counts == sorted(counts)
    assert counts[-1] <= 1
