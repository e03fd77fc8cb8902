"""Tests pour la décomposition par parité de la famille de Costa."""

import pytest

from indexlab.services.catalog import costa
from indexlab.services.mesh import MeshRegion
from indexlab.services.parity import (
    COSTA_DIMS,
    SECTOR_LABELS,
    costa_audit,
    costa_parity_dims,
    feasibility_inequalities,
    parity_feasibility,
    replay_index_three,
    rotational_nodal_count,
)
from indexlab.services.spectral import restricted_indices


@pytest.fixture(scope="module")
def costa_dims():
    return costa_parity_dims(1.0)


def test_sector_slots(costa_dims):
    """Douze formes L²* réparties (2, 4, 4, 2), puis (2, 3, 3, 1) sans les *dxⁱ."""
    assert costa_dims.ends == 3
    assert costa_dims.tilde == (2, 4, 4, 2)
    assert costa_dims.dims == COSTA_DIMS
    assert costa_dims.total == 9
    assert sorted(costa_dims.star_dx) == sorted(["+-", "-+", "--"])
    assert costa_dims.residue_rank == {"++": 1, "+-": 0, "-+": 0, "--": 1}
    assert costa_dims.global_forms == {"++": 0, "+-": 1, "-+": 1, "--": 0}


def test_parity_dims_to_dict(costa_dims):
    payload = costa_dims.to_dict()
    assert payload["sectors"] == list(SECTOR_LABELS)
    assert payload["tilde_total"] == 12
    assert len(payload["table"]) == 6


def test_inequalities_text():
    rendered = [str(ineq) for ineq in feasibility_inequalities()]
    assert rendered == [
        "2 <= w-+ + w+- + w++",
        "3 <= w-- + w++ + w+-",
        "3 <= w++ + w-- + w-+",
        "1 <= w+- + w-+ + w--",
    ]


def test_feasible_counts():
    assert parity_feasibility((2, 0, 0, 1)) == []
    assert parity_feasibility((3, 3, 3, 3)) == []
    assert parity_feasibility({"++": 2, "+-": 0, "-+": 0, "--": 1}) == []


def test_nodal_fact_breaks_three_inequalities():
    """w-- = 0 avec (2, 0, 0) : les secteurs +-, -+ et -- échouent."""
    violated = parity_feasibility((2, 0, 0, 0))
    assert [ineq.sector for ineq in violated] == ["+-", "-+", "--"]


def test_bad_counts():
    with pytest.raises(ValueError):
        parity_feasibility((1, 2, 3))
    with pytest.raises(ValueError):
        parity_feasibility((1, -1, 0, 0))


def test_replay_index_three():
    """La seule répartition admissible est (2, 0, 0, 1), incompatible avec w-- = 0."""
    report = replay_index_three()
    assert report.solutions == [(2, 0, 0, 1)]
    assert report.with_nodal_fact == []
    assert report.contradiction
    assert len(report.violations["2,0,0,0"]) == 3
    assert report.to_dict()["solutions"] == [[2, 0, 0, 1]]


def test_replay_index_four_is_not_contradictory():
    report = replay_index_three(total=4)
    assert report.with_nodal_fact
    assert not report.contradiction


def test_parity_dims_do_not_depend_on_t():
    """Les réflexions fixent les trois bouts pour tout t : mêmes dimensions."""
    assert costa_parity_dims(1.2).dims == COSTA_DIMS


@pytest.mark.slow
def test_restricted_indices_cover_four_sectors():
    wd = costa(1.0)
    schedule = [MeshRegion(R=R, delta=0.02, h=0.5) for R in (4.0, 6.0)]
    reports = restricted_indices(wd, schedule, strict=False)
    assert sorted(reports) == sorted(SECTOR_LABELS)
    for label, report in reports.items():
        assert report.sector == label
        assert len(report.counts) == 2
        assert min(report.counts) >= 0


@pytest.mark.slow
def test_rotational_field_changes_sign():
    """Le champ des rotations est impair en τ1 : au moins deux domaines nodaux."""
    wd = costa(1.0)
    assert rotational_nodal_count(wd, MeshRegion(R=6.0, delta=0.02, h=0.5)) >= 2


@pytest.mark.slow
def test_costa_audit():
    """Σ_1 : comptes (3, 1, 1, 0), indice 5, quatre domaines nodaux."""
    audit = costa_audit(1.0)
    assert audit.last_counts == {"++": 3, "+-": 1, "-+": 1, "--": 0}
    assert audit.index_total == 5
    assert audit.nodal_domains == 4
    assert audit.measured_violations == []
    assert audit.replay.contradiction
    payload = audit.to_dict()
    assert payload["index_at_least_4"] is True
    assert payload["sector_counts"] == audit.last_counts
