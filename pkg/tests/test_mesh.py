"""Tests pour les maillages des régions d'exhaustion."""

import math

import numpy as np
import pytest

from indexlab.exceptions import MeshFailure
from indexlab.services.catalog import catenoid, costa, enneper, plane, rational
from indexlab.services.mesh import MeshRegion, build_mesh, dump_mesh, flat_disk, quarter_mesh
from indexlab.services.surface import immerse


def _euler_characteristic(mesh):
    return mesh.n_vertices - len(mesh.edges()) + mesh.n_triangles


def test_flat_disk_counts():
    """Disque hexagonal à 10 anneaux : 331 sommets, 600 triangles, 60 au bord."""
    mesh = flat_disk(1.0, 0.1)
    assert mesh.n_vertices == 331
    assert mesh.n_triangles == 600
    assert int(mesh.dirichlet.sum()) == 60
    assert _euler_characteristic(mesh) == 1


def test_flat_disk_area_and_orientation():
    """Triangles orientés positivement ; l'aire totale est celle du 60-gone inscrit."""
    mesh = flat_disk(1.0, 0.1)
    areas = mesh.areas()
    assert np.all(areas > 0)
    polygon = 0.5 * 60 * math.sin(2.0 * math.pi / 60)
    assert areas.sum() == pytest.approx(polygon, rel=1e-12)
    assert mesh.min_angle() > 15.0


def test_with_dirichlet_adds_vertices():
    mesh = flat_disk(1.0, 0.25)
    mask = np.zeros(mesh.n_vertices, dtype=bool)
    mask[0] = True
    extended = mesh.with_dirichlet(mask)
    assert extended.dirichlet.sum() == mesh.dirichlet.sum() + 1
    assert len(extended.free) == len(mesh.free) - 1
    assert extended.boundary_flags[0] == "dirichlet"
    assert extended.summary()["dirichlet"] == int(extended.dirichlet.sum())


def test_catenoid_annulus_mesh():
    """Anneau autour de |z| = 1 : deux bords de Dirichlet, positions sur |X| ≤ R."""
    R = 3.0
    mesh = build_mesh(catenoid(), R, 1e-3, 0.3)
    assert mesh.chart == "plane"
    assert np.all(mesh.areas() > 0)
    assert _euler_characteristic(mesh) == 0
    norms = np.linalg.norm(mesh.positions, axis=-1)
    assert norms.max() <= R * 1.01
    boundary = norms[mesh.dirichlet]
    np.testing.assert_allclose(boundary, R, rtol=1e-2)
    assert np.all(mesh.potential <= 0.0)
    assert np.all(mesh.weight > 0.0)


def test_mesh_positions_match_immersion():
    mesh = build_mesh(catenoid(), 3.0, 1e-3, 0.3)
    wd = catenoid()
    for k in np.linspace(0, mesh.n_vertices - 1, 7).astype(int):
        expected = immerse(wd, complex(mesh.vertices[k]))
        np.testing.assert_allclose(mesh.positions[k], expected, atol=1e-2)


def test_enneper_disk_mesh():
    """Enneper sans puncture finie : disque central et anneau étiré."""
    mesh = build_mesh(enneper(1), 2.0, 0.0, 0.3)
    assert np.all(mesh.areas() > 0)
    assert _euler_characteristic(mesh) == 1
    norms = np.linalg.norm(mesh.positions, axis=-1)
    np.testing.assert_allclose(norms[mesh.dirichlet], 2.0, rtol=1e-2)


def test_plane_mesh_is_flat():
    mesh = build_mesh(plane(), 4.0, 0.0, 0.3)
    assert np.all(mesh.potential == 0.0)
    np.testing.assert_allclose(mesh.lambda2, 1.0)


def test_unsupported_punctures():
    """Une puncture finie hors de 0 n'est pas maillable."""
    wd = rational([1.0], [1.0], dh_denominator=[-1.0, 1.0], punctures=[[1.0, 0.0], "inf"])
    with pytest.raises(MeshFailure):
        build_mesh(wd, 5.0, 1e-3, 0.3)


def test_invalid_region():
    with pytest.raises(MeshFailure):
        build_mesh(catenoid(), -1.0, 1e-3, 0.3)


@pytest.mark.slow
def test_costa_quarter_and_torus_meshes():
    """Le tore complet est l'image du quart par les deux réflexions."""
    wd = costa(1.0)
    region = MeshRegion(R=4.0, delta=0.02, h=0.5)
    quarter = quarter_mesh(wd, region)
    torus = build_mesh(wd, region.R, region.delta, region.h)
    assert torus.chart == "torus"
    assert np.all(quarter.areas() > 0)
    assert np.all(torus.areas() > 0)
    assert torus.areas().sum() == pytest.approx(4.0 * quarter.areas().sum(), rel=1e-10)
    assert torus.dirichlet.any()
    assert np.all(np.linalg.norm(quarter.positions, axis=-1) <= region.R * (1 + 1e-9))


def test_dump_mesh_format(tmp_path):
    mesh = flat_disk(1.0, 0.5)
    path = dump_mesh(mesh, tmp_path / "mesh.txt")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# indexlab mesh v1 flat_disk flat")
    assert lines[1] == f"vertices {mesh.n_vertices}"
    assert lines[2 + mesh.n_vertices] == f"triangles {mesh.n_triangles}"
    assert len(lines[2].split()) == 9
    assert len(lines) == 3 + mesh.n_vertices + mesh.n_triangles
