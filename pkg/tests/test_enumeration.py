"""Tests pour l'énumération des topologies compatibles avec un budget d'indice."""

import pytest

from indexlab.exceptions import ConfigError
from indexlab.services.enumeration import (
    FactKind,
    FeasibilityConstraints,
    case_split,
    enumerate_feasible,
    genus_cap,
    load_literature,
    weight_cap,
)
from indexlab.services.topology import Sidedness, SurfaceTopology, index_lower_bound


def test_budget_three_embedded_three_ends_positive_genus():
    """Budget 3, bouts plongés, r ≥ 3, g ≥ 1 : seule la topologie de Costa survit."""
    constraints = FeasibilityConstraints(embedded=True, min_ends=3, min_genus=1)
    found = enumerate_feasible(3, constraints=constraints)
    assert found == [SurfaceTopology.of(1, [1, 1, 1])]


def test_budget_one_nonflat():
    """Budget 1 non plan : Enneper (d = 3) et caténoïde."""
    found = enumerate_feasible(1, constraints=FeasibilityConstraints(nonflat=True))
    assert found == [SurfaceTopology.of(0, [3]), SurfaceTopology.of(0, [1, 1])]


def test_budget_zero():
    """Budget 0 : seul le plan, exclu par la non-planéité."""
    assert enumerate_feasible(0) == [SurfaceTopology.of(0, [1])]
    assert enumerate_feasible(0, constraints=FeasibilityConstraints(nonflat=True)) == []


def test_negative_budget_rejected():
    with pytest.raises(ValueError):
        enumerate_feasible(-1)


@pytest.mark.parametrize("sided", [Sidedness.TWO, Sidedness.ONE])
@pytest.mark.parametrize("budget", [0, 1, 2, 3, 4])
def test_enumeration_is_complete(sided, budget):
    """Toute topologie de borne ≤ budget (dans une boîte large) est énumérée."""
    found = set(enumerate_feasible(budget, sided))
    for genus in range(0, 3 * budget + 3):
        for d1 in range(1, 8):
            for d2 in range(0, d1 + 1):
                mults = [d1] + ([d2] if d2 else [])
                t = SurfaceTopology.of(genus, mults, sided)
                assert (t in found) == (index_lower_bound(t) <= budget)


def test_enumeration_is_sorted_and_bounded():
    found = enumerate_feasible(4)
    assert found == sorted(found)
    assert all(index_lower_bound(t) <= 4 for t in found)


def test_caps_match_lower_bound():
    """Les plafonds de genre et de poids sont atteints exactement."""
    for budget in range(5):
        g_max = genus_cap(budget, Sidedness.TWO)
        assert index_lower_bound(SurfaceTopology.of(g_max, [1])) <= budget
        assert index_lower_bound(SurfaceTopology.of(g_max + 1, [1])) > budget
        cap = weight_cap(budget, 0, Sidedness.TWO)
        assert index_lower_bound(SurfaceTopology.of(0, [cap - 1])) <= budget
        assert index_lower_bound(SurfaceTopology.of(0, [cap])) > budget


def test_case_split_reports_exclusions():
    """Chaque exclusion porte sa raison et sa citation."""
    constraints = FeasibilityConstraints(
        embedded=True,
        min_ends=3,
        min_genus=1,
        citations=(("min_ends", "three ends assumed"),),
    )
    rows = case_split(3, constraints=constraints)
    assert rows[0].genus == 1
    assert rows[0].survivors == [SurfaceTopology.of(1, [1, 1, 1])]
    reasons = [reason for _, reason in rows[0].excluded]
    assert any("not embedded" in r for r in reasons)
    assert any("three ends assumed" in r for r in reasons)
    assert all(not row.survivors for row in rows[1:])


def test_default_literature_file():
    facts = load_literature()
    kinds = {fact.kind for fact in facts}
    assert kinds == {FactKind.NONEXISTENT, FactKind.KNOWN_INDEX, FactKind.FAMILY}
    assert all(fact.citation for fact in facts)


def test_literature_excludes_and_annotates():
    """Le genre 1 à deux bouts plongés est exclu ; Costa survit avec une note."""
    constraints = FeasibilityConstraints(min_genus=1).with_literature()
    rows = case_split(3, constraints=constraints)
    genus_one = rows[0]
    assert SurfaceTopology.of(1, [1, 1]) not in genus_one.survivors
    assert SurfaceTopology.of(1, [1, 1, 1]) in genus_one.survivors
    assert SurfaceTopology.of(1, [3]) in genus_one.survivors
    assert any("costa" in note for note in genus_one.notes)


def test_literature_missing_citation(tmp_path):
    path = tmp_path / "facts.txt"
    path.write_text("kind = nonexistent; genus = 1; d = 1,1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_literature(path)


def test_literature_bad_kind(tmp_path):
    path = tmp_path / "facts.txt"
    path.write_text("# commentaire\nkind = maybe; genus = 1; d = 1; citation = x\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_literature(path)
