"""Tests pour le moteur de Weierstrass et le catalogue."""

import math

import numpy as np
import pytest

from indexlab.exceptions import PoleHit
from indexlab.services.catalog import CATALOG, build, catenoid, costa, enneper, plane, rational
from indexlab.services.complexfn import INFINITY, is_infinity
from indexlab.services.surface import (
    check_periods,
    conformal_factor,
    curvature_density_identity,
    end_analysis,
    gauss_curvature,
    gauss_map_degree,
    immerse,
    phi_array,
    phi_components,
    pole_multiplicity,
    sample_surface,
    surface_topology,
    total_curvature,
    unit_normal,
)
from indexlab.services.topology import SurfaceTopology

PLANE_POINTS = np.array([0.6 + 0.3j, -1.4 + 0.8j, 0.2 - 1.7j, 2.1 + 0.4j])
TORUS_POINTS = np.array([0.31 + 0.17j, 0.12 + 0.71j, 0.77 + 0.42j, 0.58 + 0.09j])


@pytest.fixture(scope="module")
def costa_surface():
    return costa(1.0)


@pytest.mark.parametrize("wd", [catenoid(), enneper(1), enneper(2)], ids=["catenoid", "enneper1", "enneper2"])
def test_conformality(wd):
    """Σ φᵢ² = 0 (la paramétrisation est conforme)."""
    phi = phi_array(wd, PLANE_POINTS)
    squares = np.sum(phi**2, axis=-1)
    scale = np.sum(np.abs(phi) ** 2, axis=-1)
    assert np.all(np.abs(squares) <= 1e-12 * scale)


def test_conformality_costa(costa_surface):
    phi = phi_array(costa_surface, TORUS_POINTS)
    squares = np.sum(phi**2, axis=-1)
    scale = np.sum(np.abs(phi) ** 2, axis=-1)
    assert np.all(np.abs(squares) <= 1e-9 * scale)


def test_catenoid_waist():
    """Le cercle |z| = 1 est le cercle unité du plan x₃ = 0, de courbure -1."""
    wd = catenoid()
    for theta in (0.3, 1.7, 2.9, 4.4):
        X = immerse(wd, complex(math.cos(theta), math.sin(theta)))
        assert X[2] == pytest.approx(0.0, abs=1e-9)
        assert math.hypot(X[0], X[1]) == pytest.approx(1.0, rel=1e-9)
    assert gauss_curvature(wd, 1j) == pytest.approx(-1.0, rel=1e-12)
    assert conformal_factor(wd, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_catenoid_height():
    """x₃ = log|z| sur la caténoïde."""
    assert immerse(catenoid(), 2.0)[2] == pytest.approx(math.log(2.0), abs=1e-9)


def test_enneper_height():
    """x₃ = Re(z²/2) sur Enneper."""
    X = immerse(enneper(1), 1.0 + 0.5j)
    assert X[2] == pytest.approx(((1.0 + 0.5j) ** 2 / 2).real, abs=1e-9)


def test_plane_is_flat():
    wd = plane()
    assert np.all(np.asarray(gauss_curvature(wd, PLANE_POINTS)) == 0.0)
    np.testing.assert_allclose(immerse(wd, 2.0 + 3.0j), [0.0, -3.0, 2.0], atol=1e-10)


def test_puncture_raises_pole_hit():
    with pytest.raises(PoleHit):
        immerse(catenoid(), 0j)
    with pytest.raises(PoleHit):
        phi_components(catenoid(), 0j)


@pytest.mark.parametrize("wd", [catenoid(), enneper(1), enneper(3)], ids=["catenoid", "enneper1", "enneper3"])
def test_curvature_identity(wd):
    """κλ² calculé par la densité sphérique coïncide avec la forme directe."""
    assert curvature_density_identity(wd, PLANE_POINTS) < 1e-10


def test_unit_normal_on_both_hemispheres():
    """La bascule sur 1/g redonne la normale directe."""
    wd = catenoid()
    np.testing.assert_allclose(unit_normal(wd, 2.0 + 0j), [0.8, 0.0, 0.6], atol=1e-12)
    np.testing.assert_allclose(unit_normal(wd, 0.5 + 0j), [0.8, 0.0, -0.6], atol=1e-12)


@pytest.mark.parametrize("wd", [catenoid(), enneper(2), costa(1.0)], ids=["catenoid", "enneper2", "costa"])
def test_normal_orthogonal_to_tangent_plane(wd):
    """N est unitaire et orthogonal à Re φ et Im φ."""
    points = TORUS_POINTS if wd.name == "costa" else PLANE_POINTS
    N = unit_normal(wd, points)
    phi = phi_array(wd, points)
    np.testing.assert_allclose(np.linalg.norm(N, axis=-1), 1.0, rtol=1e-12)
    scale = np.linalg.norm(phi, axis=-1)
    assert np.all(np.abs(np.sum(N * phi.real, axis=-1)) <= 1e-10 * scale)
    assert np.all(np.abs(np.sum(N * phi.imag, axis=-1)) <= 1e-10 * scale)


def test_topology_read_from_data(costa_surface):
    """Multiplicités lues sur les ordres de pôle."""
    assert surface_topology(plane()) == SurfaceTopology.of(0, [1])
    assert surface_topology(catenoid()) == SurfaceTopology.of(0, [1, 1])
    assert surface_topology(enneper(2)) == SurfaceTopology.of(0, [5])
    assert surface_topology(costa_surface) == SurfaceTopology.of(1, [1, 1, 1])
    assert pole_multiplicity(enneper(1), INFINITY) == 3


def test_catenoid_end_analysis():
    """Deux bouts plongés, normales limites opposées et verticales."""
    wd = catenoid()
    ends = [end_analysis(wd, p) for p in wd.punctures]
    assert [end.multiplicity for end in ends] == [1, 1]
    assert ends[0].normal_limit[2] == pytest.approx(-1.0, abs=1e-6)
    assert ends[1].normal_limit[2] == pytest.approx(1.0, abs=1e-6)


def test_total_curvature_rational():
    """∫κ = -4π·deg g."""
    assert total_curvature(catenoid()).value == pytest.approx(-4.0 * math.pi, rel=1e-3)
    assert total_curvature(enneper(2)).value == pytest.approx(-8.0 * math.pi, rel=1e-3)
    assert gauss_map_degree(enneper(3)) == 3


def test_total_curvature_costa(costa_surface):
    """∫κ = -12π sur la surface de Costa."""
    result = total_curvature(costa_surface)
    assert result.value == pytest.approx(-12.0 * math.pi, rel=1e-3)
    assert round(result.degree) == 3


def test_costa_periods_close_at_square_lattice(costa_surface):
    assert costa_surface.period_defect < 1e-6
    assert costa_surface.parameter("A") > 0


def test_catenoid_periods():
    report = check_periods(catenoid())
    assert report["0+0i"][2] == pytest.approx(1.0, abs=1e-10)


def test_rational_infers_punctures():
    """g = z, dh = dz/z : punctures en 0 et à l'infini."""
    wd = rational([[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0]], dh_denominator=[[0.0, 0.0], [1.0, 0.0]])
    finite = [p for p in wd.punctures if not is_infinity(p)]
    assert len(finite) == 1 and abs(finite[0]) < 1e-12
    assert any(is_infinity(p) for p in wd.punctures)
    assert surface_topology(wd) == SurfaceTopology.of(0, [1, 1])


def test_build_catalog():
    for name in CATALOG:
        assert build(name).name == name
    assert build("enneper", k=2).parameter("k") == 2.0
    with pytest.raises(ValueError):
        build("helicoid")
    with pytest.raises(ValueError):
        enneper(0)


def test_sample_surface_columns():
    frame = sample_surface(catenoid(), np.array([1.0 + 0j, 2.0 + 0j]))
    assert list(frame.columns) == ["z.re", "z.im", "X1", "X2", "X3", "lambda", "kappa"]
    assert frame["X3"].iloc[1] == pytest.approx(math.log(2.0), abs=1e-9)
