"""Tests pour l'arithmétique exacte des bornes d'indice."""

from fractions import Fraction

import pytest

from indexlab.exceptions import PlanarInput
from indexlab.services.topology import (
    FormulaTag,
    Sidedness,
    SurfaceTopology,
    bound_report,
    index_lower_bound,
    index_upper_bound,
    jorge_meeks_degree,
    known_index_check,
    sandwich,
    sandwich_from_curvature,
    total_curvature_over_pi,
)

CATENOID = SurfaceTopology.of(0, [1, 1])
ENNEPER = SurfaceTopology.of(0, [3])
COSTA = SurfaceTopology.of(1, [1, 1, 1])
PLANE = SurfaceTopology.of(0, [1])


def test_multiplicities_are_sorted():
    """Les multiplicités sont rangées par ordre décroissant."""
    t = SurfaceTopology.of(2, [1, 3, 2])
    assert t.multiplicities == (3, 2, 1)
    assert t.ends == 3
    assert t.end_weight == 9


@pytest.mark.parametrize(
    "genus,mults",
    [(-1, [1]), (0, []), (0, [0, 1])],
)
def test_invalid_topologies(genus, mults):
    with pytest.raises(ValueError):
        SurfaceTopology.of(genus, mults)


def test_jorge_meeks_degrees():
    """Degré 0 pour le plan, 1 pour caténoïde et Enneper, 3 pour Costa."""
    assert jorge_meeks_degree(PLANE) == 0
    assert jorge_meeks_degree(CATENOID) == 1
    assert jorge_meeks_degree(ENNEPER) == 1
    assert jorge_meeks_degree(COSTA) == 3
    assert total_curvature_over_pi(COSTA) == -12


def test_jorge_meeks_one_sided():
    """Unilatère : g - 1 + (r + Σdⱼ)."""
    t = SurfaceTopology.of(0, [3], Sidedness.ONE)
    assert jorge_meeks_degree(t) == 3
    assert total_curvature_over_pi(t) == -6


def test_lower_bounds():
    """Bornes inférieures des surfaces classiques."""
    assert index_lower_bound(CATENOID) == 1
    assert index_lower_bound(ENNEPER) == 1
    assert index_lower_bound(COSTA) == 3
    assert index_lower_bound(PLANE) == Fraction(-1, 3)


def test_embedded_formula_agrees_with_general():
    """À bouts plongés, (2g + 4r - 5)/3 coïncide avec la formule générale."""
    for genus in range(4):
        for ends in range(1, 6):
            t = SurfaceTopology.of(genus, [1] * ends)
            assert index_lower_bound(t) == Fraction(2 * genus + 2 * t.end_weight - 5, 3)


def test_one_sided_lower_bound():
    """(g + 2Σ(dⱼ+1) - 4)/3 et son plafond entier."""
    t = SurfaceTopology.of(0, [3], "one")
    report = bound_report(t)
    assert report.lower == Fraction(4, 3)
    assert report.lower_ceil == 2
    assert report.upper is None
    assert report.formula_used == FormulaTag.ONE_SIDED


def test_ejiri_micallef_upper_bound():
    assert index_upper_bound(CATENOID) == 1
    assert index_upper_bound(COSTA) == 11
    assert index_upper_bound(COSTA, total_curvature=Fraction(-12)) == 11
    with pytest.raises(ValueError):
        index_upper_bound(SurfaceTopology.of(0, [1, 1], "one"))


def test_bound_report_dict():
    data = bound_report(CATENOID).to_dict()
    assert data["lower"] == "1"
    assert data["lower_ceil"] == 1
    assert data["upper"] == "1"
    assert data["formula_used"] == "two_sided_embedded_ends"
    assert data["upper_formula"] == "ejiri_micallef"


def test_sandwich_values():
    """Encadrement de Costa : 7/3 ≤ Index ≤ 15."""
    assert sandwich(CATENOID) == (Fraction(1), Fraction(3))
    assert sandwich(COSTA) == (Fraction(7, 3), Fraction(15))


def test_sandwich_one_sided():
    lower, upper = sandwich_from_curvature(Fraction(6), Sidedness.ONE)
    assert lower == Fraction(4, 3)
    assert upper == 12


def test_sandwich_rejects_planar():
    with pytest.raises(PlanarInput):
        sandwich(PLANE)
    with pytest.raises(PlanarInput):
        sandwich_from_curvature(Fraction(0))


def test_known_indices_inside_sandwich():
    """Indices connus : caténoïde 1, Enneper 1, Costa 5."""
    for t, index in ((CATENOID, 1), (ENNEPER, 1), (COSTA, 5)):
        check = known_index_check(t, index)
        assert check["contained"]
        assert check["above_lower_bound"]


def test_label():
    assert COSTA.label() == "(g=1, r=3, d=(1,1,1), two-sided)"
