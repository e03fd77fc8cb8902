"""Estimation de l'indice de Morse par exhaustion.

Chaque étape maille une région {|X| ≤ R} privée des disques δ, assemble Q
avec Dirichlet homogène sur les deux familles de bord et compte les valeurs
propres négatives par inertie. Les comptes sont des minorants de l'indice ;
on déclare la stabilisation quand les dernières étapes coïncident.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
import pandas as pd
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from joblib import Parallel, delayed
from scipy.sparse.csgraph import connected_components

from indexlab.config import settings
from indexlab.exceptions import ConvergenceFailure, MeshFailure, NotStabilized
from indexlab.logging_conf import get_logger
from indexlab.services.assembly import (
    PotentialRule,
    assemble_Q,
    assemble_weighted_mass,
    assemble_full,
    dirichlet_energy,
)
from indexlab.services.forms import ParityType
from indexlab.services.inertia import inertia
from indexlab.services.mesh import ConformalMesh, MeshRegion, build_mesh, quarter_mesh
from indexlab.services.surface import ChartKind, WeierstrassData, excision_radius, unit_normal
from indexlab.utils.timers import timer

logger = get_logger(__name__)

Mesher = Callable[[MeshRegion], ConformalMesh]

_NODAL_TOL = 1e-8
_ZERO_NUDGE = 1e-14
_CAUCHY_TOL = 0.02


@dataclass(frozen=True)
class Stage:
    """Résultat d'une étape d'exhaustion."""

    R: float
    delta: float
    h: float
    vertices: int
    count: int
    lowest_eigs: tuple[float, ...]
    perturbed: bool

    @property
    def region(self) -> MeshRegion:
        return MeshRegion(R=self.R, delta=self.delta, h=self.h)

    def to_dict(self) -> dict[str, Any]:
        return {
            "R": self.R,
            "delta": self.delta,
            "h": self.h,
            "vertices": self.vertices,
            "count": self.count,
            "lowest_eigs": list(self.lowest_eigs),
            "perturbed": self.perturbed,
        }


@dataclass
class SpectralReport:
    """Comptes par étape, drapeau de stabilisation et estimation de l'indice."""

    name: str
    stages: list[Stage] = field(default_factory=list)
    stabilized: bool = False
    index_estimate: int | None = None
    sector: str | None = None

    @property
    def schedule(self) -> list[tuple[float, float, float]]:
        return [(s.R, s.delta, s.h) for s in self.stages]

    @property
    def counts(self) -> list[int]:
        return [s.count for s in self.stages]

    @property
    def lowest_eigs(self) -> list[list[float]]:
        return [list(s.lowest_eigs) for s in self.stages]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "sector": self.sector,
            "schedule": [list(s) for s in self.schedule],
            "counts": self.counts,
            "lowest_eigs": self.lowest_eigs,
            "stages": [s.to_dict() for s in self.stages],
            "stabilized": self.stabilized,
            "index_estimate": self.index_estimate,
        }


# --- calendrier ---


def default_schedule(
    wd: WeierstrassData, radii: Sequence[float] | None = None, h: float | None = None
) -> list[MeshRegion]:
    """Calendrier R croissant, δ_k = δ0·(R1/R_k)² décroissant.

    δ0 est le plus petit rayon d'excision des punctures finies
    (moins de settings.excision_fraction de ∫|κ| dans chaque disque).
    """
    radii = sorted(float(r) for r in (radii or settings.default_schedule))
    h = settings.default_h if h is None else float(h)
    finite = wd.finite_punctures
    delta0 = min((excision_radius(wd, p) for p in finite), default=0.0)
    return [
        MeshRegion(R=R, delta=delta0 * (radii[0] / R) ** 2, h=h) for R in radii
    ]


def _check_schedule(schedule: Sequence[MeshRegion]) -> None:
    for a, b in zip(schedule, schedule[1:]):
        if b.R < a.R or b.delta > a.delta:
            raise MeshFailure(
                f"Schedule must increase in R and decrease in delta (got {a} then {b})"
            )


# --- valeurs propres ---


def _lowest_generalized(A: sp.spmatrix, B: sp.spmatrix, k: int) -> tuple[np.ndarray, np.ndarray]:
    """k plus petites valeurs propres de A x = μ B x (B SPD), vecteurs B-normés.

    Dense sous settings.dense_threshold ; sinon shift-invert autour d'un σ
    placé sous le spectre (inertie de A - σB nulle), puis vérification des
    comptes par inertie.

    Raises:
        ConvergenceFailure: Si ARPACK échoue ou si l'inertie contredit le résultat
    """
    n = A.shape[0]
    k = min(k, n)
    if k == 0:
        return np.zeros(0), np.zeros((n, 0))
    if n <= settings.dense_threshold:
        values, vectors = la.eigh(A.toarray(), B.toarray(), subset_by_index=[0, k - 1])
        return values, vectors

    if k >= n - 1:
        raise ConvergenceFailure(f"k={k} too large for the iterative solver on n={n}")

    sigma = -1.0
    for _ in range(80):
        if inertia(A - sigma * B).negative == 0:
            break
        sigma *= 2.0
    else:
        raise ConvergenceFailure("No shift found below the spectrum")

    try:
        values, vectors = spla.eigsh(
            A.tocsc(), k=k, M=B.tocsc(), sigma=sigma, which="LM", maxiter=settings.eig_max_iter
        )
    except spla.ArpackNoConvergence as e:
        raise ConvergenceFailure(
            f"Shift-invert Lanczos did not converge ({len(e.eigenvalues)} of {k} eigenvalues)"
        ) from e
    order = np.argsort(values)
    values, vectors = values[order], vectors[:, order]

    # l'inertie de A - μB encadre chaque valeur propre
    eps = 1e-8 * max(1.0, float(np.max(np.abs(values))))
    below_first = inertia(A - (values[0] - eps) * B).negative
    below_last = inertia(A - (values[-1] + eps) * B).negative
    if below_first != 0 or below_last < k:
        raise ConvergenceFailure(
            f"Inertia contradicts the Lanczos eigenvalues (below first: {below_first}, "
            f"below last: {below_last}, k={k})"
        )
    return values, vectors


def _extend(mesh: ConformalMesh, free_values: np.ndarray) -> np.ndarray:
    full = np.zeros(mesh.n_vertices)
    full[mesh.free] = free_values
    return full


def weighted_eigenpairs(
    mesh: ConformalMesh, k: int, rule: PotentialRule | None = None
) -> list[tuple[float, np.ndarray]]:
    """k plus petites valeurs propres de A x = λ W x, W masse de densité w(|X|)·λ².

    Returns:
        Liste de (valeur propre, fonction sur tous les sommets), W-normée,
        nulle sur les sommets de Dirichlet
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    A, _ = assemble_Q(mesh, rule)
    W = assemble_weighted_mass(mesh)
    values, vectors = _lowest_generalized(A, W, k)
    logger.debug(f"Weighted eigenvalues on {mesh.n_vertices} vertices: {values.tolist()}")
    return [(float(values[j]), _extend(mesh, vectors[:, j])) for j in range(len(values))]


def eigenfunctions_frame(mesh: ConformalMesh, pairs: Sequence[tuple[float, np.ndarray]]) -> pd.DataFrame:
    """Fonctions propres aux sommets, pour un export CSV."""
    frame = pd.DataFrame(
        {
            "z.re": mesh.vertices.real,
            "z.im": mesh.vertices.imag,
            "X1": mesh.positions[:, 0],
            "X2": mesh.positions[:, 1],
            "X3": mesh.positions[:, 2],
            "dirichlet": mesh.dirichlet.astype(int),
        }
    )
    for j, (value, vector) in enumerate(pairs):
        frame[f"eig_{j}"] = vector
        frame.attrs[f"eig_{j}"] = value
    return frame


# --- exhaustion ---


def run_stage(
    mesh: ConformalMesh, k_eigs: int = 3, rule: PotentialRule | None = None
) -> Stage:
    """Compte des valeurs propres négatives de Q_h sur un maillage."""
    if mesh.n_vertices > settings.max_vertices:
        raise MeshFailure(
            f"Mesh has {mesh.n_vertices} vertices, above max_vertices={settings.max_vertices}"
        )
    with timer(f"assemble R={mesh.region.R:g}"):
        A, M = assemble_Q(mesh, rule)
    with timer(f"inertia n={A.shape[0]}"):
        result = inertia(A)
    lowest: tuple[float, ...] = ()
    if k_eigs > 0:
        with timer(f"eigsh k={k_eigs}"):
            values, _ = _lowest_generalized(A, M, k_eigs)
        lowest = tuple(float(v) for v in values)
    region = mesh.region
    logger.info(
        f"Stage R={region.R:g} delta={region.delta:.3g} h={region.h:.4g}: "
        f"{mesh.n_vertices} vertices, {result.negative} negative"
    )
    return Stage(
        R=region.R,
        delta=region.delta,
        h=region.h,
        vertices=mesh.n_vertices,
        count=result.negative,
        lowest_eigs=lowest,
        perturbed=result.perturbed,
    )


def _stage_job(mesher: Mesher, region: MeshRegion, k_eigs: int, rule: PotentialRule | None) -> Stage:
    return run_stage(mesher(region), k_eigs, rule)


def _is_stabilized(counts: list[int], window: int) -> bool:
    return len(counts) >= window and len(set(counts[-window:])) == 1


def _default_mesher(wd: WeierstrassData) -> Mesher:
    def mesher(region: MeshRegion) -> ConformalMesh:
        return build_mesh(wd, region.R, region.delta, region.h)

    return mesher


def index_estimate(
    wd: WeierstrassData,
    schedule: Sequence[MeshRegion] | None = None,
    adaptive: bool = True,
    k_eigs: int = 3,
    rule: PotentialRule | None = None,
    strict: bool = True,
    mesher: Mesher | None = None,
    sector: str | None = None,
) -> SpectralReport:
    """Indice par exhaustion : comptes par étape et stabilisation.

    En mode adaptatif, h est divisé par deux pour les étapes suivantes dès
    qu'un compte change, tant que le maillage projeté reste sous
    settings.max_vertices. Sans adaptation, les étapes sont indépendantes et
    tournent en parallèle (joblib).

    Raises:
        NotStabilized: Si strict et que les dernières étapes diffèrent
            (le rapport partiel est attaché à l'exception)
    """
    schedule = list(schedule or default_schedule(wd))
    _check_schedule(schedule)
    mesher = mesher or _default_mesher(wd)
    window = settings.stabilization_window
    report = SpectralReport(name=wd.name, sector=sector)

    if adaptive:
        h = schedule[0].h
        for region in schedule:
            stage = run_stage(mesher(replace(region, h=h)), k_eigs, rule)
            previous = report.stages[-1] if report.stages else None
            report.stages.append(stage)
            if previous is None or stage.count == previous.count:
                continue
            if stage.count < previous.count:
                logger.warning(
                    f"{wd.name}: count decreased from {previous.count} to {stage.count} at R={stage.R:g}"
                )
            if 4 * stage.vertices <= settings.max_vertices:
                h /= 2.0
                logger.info(f"{wd.name}: count changed, refining to h={h:.4g}")
    else:
        stages = Parallel(n_jobs=settings.n_jobs)(
            delayed(_stage_job)(mesher, region, k_eigs, rule) for region in schedule
        )
        report.stages.extend(stages)

    report.stabilized = _is_stabilized(report.counts, window)
    if report.stabilized:
        report.index_estimate = report.counts[-1]
        logger.info(f"{wd.name}{' ' + sector if sector else ''}: index estimate {report.index_estimate}")
    elif strict:
        raise NotStabilized(
            f"{wd.name}: counts {report.counts} did not stabilize over the last {window} stages",
            report=report,
        )
    return report


# --- contrôle L² du gradient ---


@dataclass(frozen=True)
class GradientReport:
    energies: tuple[float, ...]
    relative_changes: tuple[float, ...]
    passes: bool
    normalization: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "energies": list(self.energies),
            "relative_changes": list(self.relative_changes),
            "passes": self.passes,
            "normalization": self.normalization,
        }


def _normalize(mesh: ConformalMesh, f: np.ndarray, normalization: str) -> np.ndarray:
    if normalization == "none":
        return f
    if normalization == "weighted":
        W = assemble_weighted_mass(mesh)
        norm2 = float(f[mesh.free] @ (W @ f[mesh.free]))
    elif normalization == "area":
        _, M = assemble_full(mesh)
        norm2 = float(f @ (M @ f))
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return f / np.sqrt(norm2)


def gradient_l2_check(
    meshes: Sequence[ConformalMesh],
    functions: Sequence[np.ndarray],
    normalization: str = "weighted",
) -> GradientReport:
    """∫|∇f|² le long d'une suite de maillages ; passe si la suite est de Cauchy.

    Le critère porte sur les variations relatives (< 2 %) entre les trois
    dernières étapes.
    """
    if len(meshes) != len(functions):
        raise ValueError("one function per mesh is required")
    energies = tuple(
        dirichlet_energy(mesh, _normalize(mesh, np.asarray(f, dtype=float), normalization))
        for mesh, f in zip(meshes, functions)
    )
    changes = tuple(
        abs(b - a) / max(abs(b), 1e-300) for a, b in zip(energies, energies[1:])
    )
    window = settings.stabilization_window
    passes = len(energies) >= window and all(c < _CAUCHY_TOL for c in changes[-(window - 1):])
    return GradientReport(energies, changes, passes, normalization)


# --- restriction par symétrie (famille de Costa) ---


def parity_dirichlet(mesh: ConformalMesh, parity: ParityType, t: float) -> ConformalMesh:
    """Dirichlet sur les lignes de réflexion où la parité est impaire.

    τ1 fixe x ∈ {0, 1/2}, τ2 fixe y ∈ {0, t/2} ; parité paire ↔ Neumann naturel.
    """
    x, y = mesh.vertices.real, mesh.vertices.imag
    mask = np.zeros(mesh.n_vertices, dtype=bool)
    if parity.s1 < 0:
        mask |= np.isclose(x, 0.0, atol=1e-13) | np.isclose(x, 0.5, atol=1e-13)
    if parity.s2 < 0:
        mask |= np.isclose(y, 0.0, atol=1e-13) | np.isclose(y, 0.5 * t, atol=1e-13)
    return mesh.with_dirichlet(mask)


def sector_mesher(wd: WeierstrassData, parity: ParityType) -> Mesher:
    t = wd.lattice.t

    def mesher(region: MeshRegion) -> ConformalMesh:
        return parity_dirichlet(quarter_mesh(wd, region), parity, t)

    return mesher


def symmetry_restricted_index(
    wd: WeierstrassData,
    parity: ParityType | str,
    schedule: Sequence[MeshRegion] | None = None,
    strict: bool = True,
    adaptive: bool = False,
) -> SpectralReport:
    """w^{±±} : compte négatif sur le quart de tore avec conditions de parité."""
    if wd.chart != ChartKind.TORUS:
        raise MeshFailure(f"{wd.name}: symmetry restriction needs the Costa torus chart")
    parity = ParityType.from_label(parity) if isinstance(parity, str) else parity
    return index_estimate(
        wd,
        schedule,
        adaptive=adaptive,
        k_eigs=0,
        strict=strict,
        mesher=sector_mesher(wd, parity),
        sector=parity.label,
    )


def restricted_indices(
    wd: WeierstrassData, schedule: Sequence[MeshRegion] | None = None, strict: bool = True
) -> dict[str, SpectralReport]:
    """Les quatre secteurs (++, +-, -+, --), en parallèle."""
    schedule = list(schedule or default_schedule(wd))
    reports = Parallel(n_jobs=settings.n_jobs)(
        delayed(symmetry_restricted_index)(wd, parity, schedule, strict)
        for parity in ParityType.sectors()
    )
    return {report.sector: report for report in reports}


# --- domaines nodaux ---


def nodal_domain_count(mesh: ConformalMesh, u: np.ndarray, tol: float = _NODAL_TOL) -> int:
    """Composantes connexes des sous-graphes {u > 0} et {u < 0}, sommées.

    Les zéros exacts sont décalés de +1e-14 ; les sommets où |u| ≤ tol·max|u|
    sont sur l'ensemble nodal.
    """
    values = np.asarray(u, dtype=float).copy()
    values[values == 0.0] = _ZERO_NUDGE
    scale = float(np.max(np.abs(values)))
    sign = np.sign(values)
    sign[np.abs(values) <= tol * scale] = 0.0

    edges = mesh.edges()
    a, b = edges[:, 0], edges[:, 1]
    same = (sign[a] == sign[b]) & (sign[a] != 0.0)
    n = mesh.n_vertices
    graph = sp.coo_matrix((np.ones(int(same.sum())), (a[same], b[same])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    signed = sign != 0.0
    return int(len(np.unique(labels[signed])))


def rotational_jacobi_field(wd: WeierstrassData, mesh: ConformalMesh) -> np.ndarray:
    """Champ de Jacobi des rotations autour de e3 : N·(e3 × X) = N2 X1 - N1 X2."""
    N = unit_normal(wd, mesh.vertices)
    X = mesh.positions
    return N[:, 1] * X[:, 0] - N[:, 0] * X[:, 1]
