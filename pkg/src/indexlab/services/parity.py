"""Décomposition par parité de la famille de Costa et argument de faisabilité.

Les deux réflexions τ1 (z ↦ -z̄) et τ2 (z ↦ z̄) fixent chacune des trois
punctures ; les formes harmoniques L²* et les fonctions propres se répartissent
en quatre secteurs (++, +-, -+, --). Un indice égal à 3 imposerait aux comptes
par secteur des inégalités incompatibles avec w^{--} = 0.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from indexlab.logging_conf import get_logger
from indexlab.services.catalog import costa
from indexlab.services.forms import (
    ModelEndForm,
    ParityType,
    dim_harmonic_l2star,
    form_parity,
    hodge_star_dx,
    parity_type_of,
    sectors_table,
)
from indexlab.services.mesh import MeshRegion, costa_grid, torus_mesh
from indexlab.services.spectral import (
    SpectralReport,
    default_schedule,
    nodal_domain_count,
    restricted_indices,
    rotational_jacobi_field,
)
from indexlab.services.surface import WeierstrassData, surface_topology

logger = get_logger(__name__)

SECTORS: tuple[ParityType, ...] = ParityType.sectors()
SECTOR_LABELS: tuple[str, ...] = tuple(p.label for p in SECTORS)

MODEL_END_FORMS: tuple[ModelEndForm, ...] = (
    ModelEndForm.RADIAL,
    ModelEndForm.ANGULAR,
    ModelEndForm.QUADRUPOLE_REAL,
    ModelEndForm.QUADRUPOLE_IMAG,
)
# formes L² globales (parties réelles de dz et i dz)
GLOBAL_FORMS: tuple[ModelEndForm, ...] = (ModelEndForm.DX, ModelEndForm.DY)
# formes modèles portant un résidu (réel pour RADIAL, imaginaire pour ANGULAR)
RESIDUE_FORMS: frozenset[ModelEndForm] = frozenset({ModelEndForm.RADIAL, ModelEndForm.ANGULAR})

# parités des fonctions coordonnées x1, x2, x3
COORDINATE_PARITIES: tuple[ParityType, ...] = (ParityType(-1, 1), ParityType(1, -1), ParityType(1, 1))
COSTA_DIMS: tuple[int, int, int, int] = (2, 3, 3, 1)


@dataclass
class CostaParityDims:
    """Dimensions de H par secteur, avec le détail du décompte."""

    t: float
    ends: int
    local_slots: dict[str, int]
    residue_rank: dict[str, int]
    global_forms: dict[str, int]
    tilde: tuple[int, int, int, int]
    star_dx: tuple[str, str, str]
    dims: tuple[int, int, int, int]
    table: list[tuple[str, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.dims)

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "ends": self.ends,
            "sectors": list(SECTOR_LABELS),
            "local_slots": self.local_slots,
            "residue_rank": self.residue_rank,
            "global_forms": self.global_forms,
            "tilde": list(self.tilde),
            "tilde_total": sum(self.tilde),
            "star_dx": list(self.star_dx),
            "dims": list(self.dims),
            "total": self.total,
            "table": [{"form": f, "parity": p} for f, p in self.table],
        }


def _fixed_by_reflections(wd: WeierstrassData, p: complex) -> bool:
    """p est fixe (modulo le réseau) sous z ↦ -z̄ et z ↦ z̄."""
    t = wd.lattice.t

    def same(a: complex, b: complex) -> bool:
        d = a - b
        return abs(d.real - round(d.real)) < 1e-12 and abs(d.imag / t - round(d.imag / t)) < 1e-12

    return same(-p.conjugate(), p) and same(p.conjugate(), p)


def costa_parity_dims(t: float = 1.0) -> CostaParityDims:
    """(dim H^{++}, H^{+-}, H^{-+}, H^{--}) pour Σ_t.

    Par secteur : coefficients locaux autorisés aux trois bouts, moins le rang
    de la contrainte de somme des résidus, plus les formes L² globales ;
    on retire ensuite les directions *dxⁱ selon leur parité.
    """
    wd = costa(t)
    punctures = list(wd.punctures)
    if not all(_fixed_by_reflections(wd, p) for p in punctures):
        raise ValueError(f"{wd.name}: punctures are not fixed by both reflections")
    ends = len(punctures)

    forms_by_sector: dict[str, list[ModelEndForm]] = {label: [] for label in SECTOR_LABELS}
    for form in MODEL_END_FORMS:
        forms_by_sector[parity_type_of(form).label].append(form)

    local_slots: dict[str, int] = {}
    residue_rank: dict[str, int] = {}
    global_forms: dict[str, int] = {label: 0 for label in SECTOR_LABELS}
    for label, forms in forms_by_sector.items():
        local_slots[label] = ends * len(forms)
        rows = [np.ones(ends) for form in forms if form in RESIDUE_FORMS]
        residue_rank[label] = int(np.linalg.matrix_rank(np.array(rows))) if rows else 0
    for form in GLOBAL_FORMS:
        global_forms[parity_type_of(form).label] += 1

    tilde = tuple(
        local_slots[label] - residue_rank[label] + global_forms[label] for label in SECTOR_LABELS
    )
    expected = dim_harmonic_l2star(surface_topology(wd))
    if sum(tilde) != expected:
        raise ValueError(f"sector slots sum to {sum(tilde)}, expected {expected}")

    star_dx = tuple(form_parity(wd, hodge_star_dx(wd, i)).label for i in range(1, 4))
    dims = list(tilde)
    for label in star_dx:
        dims[SECTOR_LABELS.index(label)] -= 1

    logger.info(f"Costa t={t:g}: tilde dims {tilde}, dims {tuple(dims)}")
    return CostaParityDims(
        t=float(t),
        ends=ends,
        local_slots=local_slots,
        residue_rank=residue_rank,
        global_forms=global_forms,
        tilde=tilde,  # type: ignore[arg-type]
        star_dx=star_dx,  # type: ignore[arg-type]
        dims=tuple(dims),  # type: ignore[arg-type]
        table=sectors_table(MODEL_END_FORMS + GLOBAL_FORMS),
    )


# --- inégalités ---


@dataclass(frozen=True)
class Inequality:
    """dim H^P ≤ Σ w^{P·Q} sur les parités Q des trois coordonnées."""

    sector: str
    bound: int
    terms: tuple[str, str, str]

    def value(self, w: dict[str, int]) -> int:
        return sum(w[label] for label in self.terms)

    def holds(self, w: dict[str, int]) -> bool:
        return self.bound <= self.value(w)

    def __str__(self) -> str:
        return f"{self.bound} <= " + " + ".join(f"w{label}" for label in self.terms)


def feasibility_inequalities(dims: Sequence[int] = COSTA_DIMS) -> list[Inequality]:
    """Une inégalité par secteur, dans l'ordre (++, +-, -+, --)."""
    return [
        Inequality(
            sector=p.label,
            bound=int(bound),
            terms=tuple((p * q).label for q in COORDINATE_PARITIES),  # type: ignore[arg-type]
        )
        for p, bound in zip(SECTORS, dims)
    ]


def _as_sector_map(w: Sequence[int] | dict[str, int]) -> dict[str, int]:
    if isinstance(w, dict):
        return {label: int(w[label]) for label in SECTOR_LABELS}
    if len(w) != 4:
        raise ValueError("four sector counts (++, +-, -+, --) are required")
    if any(int(v) < 0 for v in w):
        raise ValueError("sector counts must be nonnegative")
    return dict(zip(SECTOR_LABELS, (int(v) for v in w)))


def parity_feasibility(
    w: Sequence[int] | dict[str, int], dims: Sequence[int] = COSTA_DIMS
) -> list[Inequality]:
    """Inégalités violées par les comptes w (liste vide si tout est satisfait)."""
    counts = _as_sector_map(w)
    return [ineq for ineq in feasibility_inequalities(dims) if not ineq.holds(counts)]


@dataclass
class ReplayReport:
    total: int
    solutions: list[tuple[int, int, int, int]]
    with_nodal_fact: list[tuple[int, int, int, int]]
    violations: dict[str, list[str]]
    contradiction: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "solutions": [list(s) for s in self.solutions],
            "with_nodal_fact": [list(s) for s in self.with_nodal_fact],
            "violations": self.violations,
            "contradiction": self.contradiction,
        }


def replay_index_three(dims: Sequence[int] = COSTA_DIMS, total: int = 3) -> ReplayReport:
    """Rejoue l'argument par l'absurde pour un indice égal à total.

    Énumère les (w++, w+-, w-+, w--) de somme total qui satisfont les quatre
    inégalités, puis impose w-- = 0 (fait nodal) à chaque solution.
    """
    solutions = [
        w
        for w in itertools.product(range(total + 1), repeat=4)
        if sum(w) == total and not parity_feasibility(w, dims)
    ]
    with_nodal = [w for w in solutions if w[3] == 0]
    violations: dict[str, list[str]] = {}
    for w in solutions:
        forced = (w[0], w[1], w[2], 0)
        violations[",".join(map(str, forced))] = [str(i) for i in parity_feasibility(forced, dims)]
    contradiction = not with_nodal and all(violations.values())
    logger.info(f"Index {total} replay: solutions {solutions}, contradiction={contradiction}")
    return ReplayReport(total, solutions, with_nodal, violations, contradiction)


# --- audit complet ---


@dataclass
class CostaAudit:
    t: float
    parity: CostaParityDims
    restricted: dict[str, SpectralReport]
    nodal_domains: int
    measured_violations: list[str]
    replay: ReplayReport

    @property
    def sector_counts(self) -> dict[str, int | None]:
        return {label: self.restricted[label].index_estimate for label in SECTOR_LABELS}

    @property
    def last_counts(self) -> dict[str, int]:
        return {label: self.restricted[label].counts[-1] for label in SECTOR_LABELS}

    @property
    def index_total(self) -> int:
        return sum(self.last_counts.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "parity": self.parity.to_dict(),
            "restricted": {label: r.to_dict() for label, r in self.restricted.items()},
            "sector_counts": self.sector_counts,
            "index_total": self.index_total,
            "index_at_least_4": self.index_total >= 4,
            "nodal_domains": self.nodal_domains,
            "measured_violations": self.measured_violations,
            "replay": self.replay.to_dict(),
        }


def rotational_nodal_count(wd: WeierstrassData, region: MeshRegion) -> int:
    """Nombre de domaines nodaux du champ de Jacobi des rotations sur le tore maillé."""
    mesh = torus_mesh(wd, region, costa_grid(wd, region))
    return nodal_domain_count(mesh, rotational_jacobi_field(wd, mesh))


def costa_audit(
    t: float = 1.0, schedule: Sequence[MeshRegion] | None = None, strict: bool = False
) -> CostaAudit:
    """Chaîne complète : dimensions par parité, indices restreints, domaines nodaux, faisabilité."""
    wd = costa(t)
    schedule = list(schedule or default_schedule(wd))
    parity = costa_parity_dims(t)
    restricted = restricted_indices(wd, schedule, strict=strict)
    nodal = rotational_nodal_count(wd, schedule[-1])
    counts = [restricted[label].counts[-1] for label in SECTOR_LABELS]
    measured = [str(i) for i in parity_feasibility(counts, parity.dims)]
    audit = CostaAudit(
        t=float(t),
        parity=parity,
        restricted=restricted,
        nodal_domains=nodal,
        measured_violations=measured,
        replay=replay_index_three(parity.dims),
    )
    logger.info(
        f"Costa t={t:g} audit: sector counts {audit.last_counts}, nodal domains {nodal}"
    )
    return audit
