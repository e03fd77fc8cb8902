"""Maillages des régions d'exhaustion {z : |X(z)| ≤ R} privées des disques δ.

Trois constructions :

- cartes planes épointées en 0 et/ou ∞ : disque central hexagonal et anneau
  log-polaire, ou anneau seul autour de |z| = 1 ; les rayons sont étirés pour
  que le bord tombe sur |X| = R ;
- quart de tore [0, 1/2] × [0, t/2] (famille de Costa) : grille tensorielle
  raffinée géométriquement vers les coins épointés ;
- tore complet obtenu par réflexion exacte des triangles du quart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from indexlab.exceptions import MeshFailure
from indexlab.logging_conf import get_logger
from indexlab.services.complexfn import is_infinity
from indexlab.services.forms import l2star_weight
from indexlab.services.surface import (
    ChartKind,
    WeierstrassData,
    conformal_factor,
    immerse,
    potential,
    quarter_positions,
    segment_integrals,
    trace_path,
)

logger = get_logger(__name__)


@dataclass(frozen=True)
class MeshRegion:
    """Région d'exhaustion : rayon extrinsèque R, excision δ, pas relatif h."""

    R: float
    delta: float
    h: float

    def to_dict(self) -> dict[str, float]:
        return {"R": self.R, "delta": self.delta, "h": self.h}


@dataclass(frozen=True, eq=False)
class ConformalMesh:
    """Maillage P1 d'une région de la carte conforme.

    Attributes:
        name: Surface d'origine
        chart: "plane", "quarter", "torus" ou "flat"
        vertices: Points de la carte (complexes)
        triangles: Triplets d'indices orientés positivement
        dirichlet: Sommets portant la condition de Dirichlet
        positions: X(z) aux sommets
        lambda2: λ² aux sommets
        potential: V = 2κλ² aux sommets
        weight: w(|X|)·λ² aux sommets
        centroid_potential: V aux barycentres des triangles
        region: Région d'exhaustion
        corners: Coins déroulés des triangles (tore), sinon None
    """

    name: str
    chart: str
    vertices: np.ndarray
    triangles: np.ndarray
    dirichlet: np.ndarray
    positions: np.ndarray
    lambda2: np.ndarray
    potential: np.ndarray
    weight: np.ndarray
    centroid_potential: np.ndarray
    region: MeshRegion
    corners: np.ndarray | None = None

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_triangles(self) -> int:
        return int(self.triangles.shape[0])

    @property
    def boundary_flags(self) -> np.ndarray:
        return np.where(self.dirichlet, "dirichlet", "interior")

    @property
    def free(self) -> np.ndarray:
        """Indices des sommets libres (hors Dirichlet)."""
        return np.flatnonzero(~self.dirichlet)

    def corner_points(self) -> np.ndarray:
        """Coordonnées des coins de chaque triangle, forme (m, 3)."""
        if self.corners is not None:
            return self.corners
        return self.vertices[self.triangles]

    def areas(self) -> np.ndarray:
        """Aires signées dans la carte."""
        c = self.corner_points()
        e1 = c[:, 1] - c[:, 0]
        e2 = c[:, 2] - c[:, 0]
        return 0.5 * (e1.real * e2.imag - e1.imag * e2.real)

    def min_angle(self) -> float:
        """Plus petit angle des triangles, en degrés."""
        c = self.corner_points()
        angles = []
        for k in range(3):
            a = c[:, (k + 1) % 3] - c[:, k]
            b = c[:, (k + 2) % 3] - c[:, k]
            angles.append(np.abs(np.angle(b / a)))
        return float(np.degrees(np.min(angles)))

    def edges(self) -> np.ndarray:
        """Arêtes uniques (i < j), forme (k, 2)."""
        tri = self.triangles
        pairs = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
        pairs.sort(axis=1)
        return np.unique(pairs, axis=0)

    def with_dirichlet(self, mask: np.ndarray) -> ConformalMesh:
        """Copie avec des sommets de Dirichlet supplémentaires."""
        return replace(self, dirichlet=self.dirichlet | np.asarray(mask, dtype=bool))

    def summary(self) -> dict[str, Any]:
        return {
            "chart": self.chart,
            "vertices": self.n_vertices,
            "triangles": self.n_triangles,
            "dirichlet": int(self.dirichlet.sum()),
            "region": self.region.to_dict(),
        }


# --- utilitaires communs ---


def _orient(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    c = points[triangles]
    e1 = c[:, 1] - c[:, 0]
    e2 = c[:, 2] - c[:, 0]
    negative = (e1.real * e2.imag - e1.imag * e2.real) < 0
    fixed = triangles.copy()
    fixed[negative] = fixed[negative][:, [0, 2, 1]]
    return fixed


def _merge_rings(
    inner: np.ndarray, inner_angles: np.ndarray, outer: np.ndarray, outer_angles: np.ndarray
) -> list[tuple[int, int, int]]:
    """Triangule la bande entre deux anneaux en avançant par angle croissant."""
    n1, n2 = len(inner), len(outer)
    tris = []
    i = j = 0
    while i < n1 or j < n2:
        next_inner = inner_angles[(i + 1) % n1] + 2.0 * math.pi * ((i + 1) // n1)
        next_outer = outer_angles[(j + 1) % n2] + 2.0 * math.pi * ((j + 1) // n2)
        if j < n2 and (i >= n1 or next_outer <= next_inner):
            tris.append((inner[i % n1], outer[j % n2], outer[(j + 1) % n2]))
            j += 1
        else:
            tris.append((inner[i % n1], outer[j % n2], inner[(i + 1) % n1]))
            i += 1
    return tris


def _finalize(
    wd: WeierstrassData | None,
    name: str,
    chart: str,
    vertices: np.ndarray,
    triangles: np.ndarray,
    dirichlet: np.ndarray,
    positions: np.ndarray,
    region: MeshRegion,
    corners: np.ndarray | None = None,
    eval_points: np.ndarray | None = None,
    centroid_points: np.ndarray | None = None,
) -> ConformalMesh:
    """Échantillonne λ², V et le poids L²* puis assemble le maillage."""
    if corners is None:
        triangles = _orient(vertices, triangles)
    points = vertices if eval_points is None else eval_points
    if centroid_points is None:
        c = vertices[triangles] if corners is None else corners
        centroid_points = c.mean(axis=1)
    if wd is None:
        lam2 = np.ones(len(vertices))
        pot = np.zeros(len(vertices))
        centroid_pot = np.zeros(len(triangles))
    else:
        lam2 = np.asarray(conformal_factor(wd, points, strict=False)) ** 2
        pot = np.asarray(potential(wd, points))
        centroid_pot = np.asarray(potential(wd, centroid_points))
    norms = np.linalg.norm(positions, axis=-1)
    mesh = ConformalMesh(
        name=name,
        chart=chart,
        vertices=vertices,
        triangles=np.asarray(triangles, dtype=np.int64),
        dirichlet=np.asarray(dirichlet, dtype=bool),
        positions=positions,
        lambda2=lam2,
        potential=np.minimum(pot, 0.0),
        weight=l2star_weight(norms) * lam2,
        centroid_potential=np.minimum(centroid_pot, 0.0),
        region=region,
        corners=corners,
    )
    logger.debug(f"Mesh {name}/{chart}: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles")
    return mesh


# --- cartes planes ---


def flat_disk(radius: float = 1.0, h: float = 0.05) -> ConformalMesh:
    """Disque plat (λ = 1, V = 0) à anneaux hexagonaux, bord en Dirichlet."""
    rings = max(1, int(math.ceil(radius / h)))
    vertices, triangles, _ = _hex_core(radius, rings)
    dirichlet = np.zeros(len(vertices), dtype=bool)
    dirichlet[-6 * rings :] = True
    positions = np.stack([vertices.real, vertices.imag, np.zeros(len(vertices))], axis=-1)
    return _finalize(
        None, "flat_disk", "flat", vertices, np.array(triangles), dirichlet, positions,
        MeshRegion(radius, 0.0, h),
    )


def _hex_core(radius: float, rings: int) -> tuple[np.ndarray, list[tuple[int, int, int]], np.ndarray]:
    """Disque à anneaux concentriques de 6k points ; renvoie aussi les angles du dernier anneau."""
    points = [0j]
    tris: list[tuple[int, int, int]] = []
    previous = np.array([0])
    previous_angles = np.array([0.0])
    angles = previous_angles
    for k in range(1, rings + 1):
        angles = 2.0 * math.pi * np.arange(6 * k) / (6 * k)
        start = len(points)
        points.extend(radius * k / rings * np.exp(1j * angles))
        current = np.arange(start, start + 6 * k)
        if k == 1:
            tris.extend((0, int(current[m]), int(current[(m + 1) % 6])) for m in range(6))
        else:
            tris.extend(_merge_rings(previous, previous_angles, current, angles))
        previous, previous_angles = current, angles
    return np.array(points, dtype=complex), tris, angles


def _plane_mode(wd: WeierstrassData) -> str:
    finite = wd.finite_punctures
    has_infinity = any(is_infinity(p) for p in wd.punctures)
    if any(abs(p) > 1e-14 for p in finite) or not has_infinity:
        raise MeshFailure(
            f"{wd.name}: plane meshes need punctures within {{0, ∞}} including ∞ (got {wd.punctures})"
        )
    return "annulus" if finite else "disk"


def _disk_positions(wd: WeierstrassData, origin: np.ndarray, z: Any) -> np.ndarray:
    """X(z) = X(0) + Re∫_0^z φ (données sans pôle fini : intégrande polynomiale)."""
    zz = np.asarray(z, dtype=complex)
    return origin + segment_integrals(wd, np.zeros_like(zz), zz, order=32)


def _disk_crossings(wd: WeierstrassData, origin: np.ndarray, angles: np.ndarray, R: float, s_max: float) -> np.ndarray:
    """log r du premier passage |X| = R le long de chaque rayon (bissection)."""
    lo = np.full(len(angles), -8.0)
    hi = np.full(len(angles), s_max)
    inside = np.linalg.norm(_disk_positions(wd, origin, np.exp(hi + 1j * angles)), axis=-1) <= R
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = np.linalg.norm(_disk_positions(wd, origin, np.exp(mid + 1j * angles)), axis=-1) <= R
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.where(inside, s_max, lo)


def _march_rays(
    wd: WeierstrassData,
    hub: np.ndarray,
    angles: np.ndarray,
    R: float,
    step: float,
    limit: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Marche le long des rayons depuis |z| = 1 jusqu'à |X| = R ou |s| = limit.

    Returns:
        (s_samples (n, K), X_samples (n, K, 3)) ; step porte le signe du sens
    """
    s_chunks = [np.zeros((len(angles), 1))]
    x_chunks = [hub[:, None, :]]
    s = 0.0
    while abs(s) < limit:
        grid = s + step * np.arange(0, 65)
        grid = np.clip(grid, -limit, limit)
        z = np.exp(grid[None, :] + 1j * angles[:, None])
        X = trace_path(wd, z, x_chunks[-1][:, -1, :])
        s_chunks.append(np.broadcast_to(grid[1:], (len(angles), 64)))
        x_chunks.append(X[:, 1:, :])
        s = float(grid[-1])
        if np.all(np.linalg.norm(X[:, -1, :], axis=-1) > R):
            break
    return np.concatenate(s_chunks, axis=1), np.concatenate(x_chunks, axis=1)


def _ray_boundary(s: np.ndarray, X: np.ndarray, R: float) -> np.ndarray:
    """Abscisse s interpolée du premier passage |X| = R (ou fin d'échantillon)."""
    norms = np.linalg.norm(X, axis=-1)
    out = np.empty(len(s))
    for j in range(len(s)):
        beyond = np.flatnonzero(~(norms[j] <= R))
        if len(beyond) == 0:
            out[j] = s[j, -1]
            continue
        k = beyond[0]
        if k == 0:
            raise MeshFailure(f"|X| > R at the hub ring (R={R})")
        n0, n1 = norms[j, k - 1], norms[j, k]
        frac = (R - n0) / (n1 - n0) if np.isfinite(n1) else 0.0
        out[j] = s[j, k - 1] + frac * (s[j, k] - s[j, k - 1])
    return out


def _interp_ray(s_samples: np.ndarray, X_samples: np.ndarray, s_nodes: np.ndarray) -> np.ndarray:
    order = np.argsort(s_samples)
    return np.stack(
        [np.interp(s_nodes, s_samples[order], X_samples[order, c]) for c in range(3)], axis=-1
    )


def _plane_mesh(wd: WeierstrassData, region: MeshRegion) -> ConformalMesh:
    mode = _plane_mode(wd)
    h = region.h
    delta = region.delta if region.delta > 0 else 1e-12
    s_limit = -math.log(delta)

    if mode == "disk":
        rings_core = max(2, int(math.ceil(2.0 * math.pi / (6.0 * h))))
        n_theta = 6 * rings_core
        angles = 2.0 * math.pi * np.arange(n_theta) / n_theta
        origin = np.asarray(immerse(wd, 0j), dtype=float)
        s_out = _disk_crossings(wd, origin, angles, region.R, s_limit)
        rho0 = 0.5 * float(np.exp(np.min(s_out)))
        core_pts, tris, _ = _hex_core(rho0, rings_core)
        s_in = np.full(n_theta, math.log(rho0))
    else:
        n_theta = 4 * int(math.ceil(2.0 * math.pi / (4.0 * h)))
        angles = 2.0 * math.pi * np.arange(n_theta) / n_theta
        ring = np.exp(1j * np.append(angles, 2.0 * math.pi))
        hub = trace_path(wd, ring, immerse(wd, 1 + 0j))[:-1]
        fine = h / 8.0
        s_up, x_up = _march_rays(wd, hub, angles, region.R, fine, s_limit)
        s_dn, x_dn = _march_rays(wd, hub, angles, region.R, -fine, s_limit)
        s_out = _ray_boundary(s_up, x_up, region.R)
        s_in = -_ray_boundary(-s_dn, x_dn, region.R)
        core_pts, tris = np.zeros(0, dtype=complex), []

    n_s = max(1, int(math.ceil(np.max(s_out - s_in) / h)))
    frac = np.arange(n_s + 1) / n_s
    s_nodes = s_in[None, :] + (s_out - s_in)[None, :] * frac[:, None]
    ring_pts = np.exp(s_nodes + 1j * angles[None, :])

    offset = len(core_pts)
    first_ring = 1 if mode == "disk" else 0
    if mode == "disk":
        # l'anneau 0 coïncide avec le dernier anneau du disque central
        ring_index = np.empty((n_s + 1, n_theta), dtype=np.int64)
        ring_index[0] = np.arange(offset - n_theta, offset)
        ring_index[1:] = offset + np.arange(n_s * n_theta).reshape(n_s, n_theta)
        vertices = np.concatenate([core_pts, ring_pts[1:].ravel()])
    else:
        ring_index = np.arange((n_s + 1) * n_theta).reshape(n_s + 1, n_theta)
        vertices = ring_pts.ravel()
    for i in range(n_s):
        tris.extend(_merge_rings(ring_index[i], angles, ring_index[i + 1], angles))
    triangles = np.array(tris, dtype=np.int64)

    dirichlet = np.zeros(len(vertices), dtype=bool)
    dirichlet[ring_index[-1]] = True
    if mode == "annulus":
        dirichlet[ring_index[0]] = True

    if mode == "disk":
        positions = _disk_positions(wd, origin, vertices)
    else:
        positions = np.empty((len(vertices), 3))
        for j in range(n_theta):
            s_samples = np.concatenate([s_dn[j, ::-1], s_up[j, 1:]])
            x_samples = np.concatenate([x_dn[j, ::-1], x_up[j, 1:]])
            positions[ring_index[first_ring:, j]] = _interp_ray(
                s_samples, x_samples, s_nodes[first_ring:, j]
            )
    return _finalize(wd, wd.name, "plane", vertices, triangles, dirichlet, positions, region)


# --- tore de Costa ---


def _graded_nodes(length: float, first: float, h: float, h_max: float) -> np.ndarray:
    """Nœuds de [0, length] à pas géométrique (raison 1 + h) depuis chaque extrémité."""
    half = [0.0]
    step = first
    while half[-1] + step < 0.5 * length:
        half.append(half[-1] + step)
        step = min(max(h * half[-1], first), h_max)
    left = np.array(half)
    if 0.5 * length - left[-1] < 0.3 * step:
        left = left[:-1]
    nodes = np.concatenate([left, [0.5 * length], length - left[::-1]])
    nodes[0], nodes[-1] = 0.0, length
    return nodes


def _costa_grid(wd: WeierstrassData, region: MeshRegion) -> tuple[np.ndarray, np.ndarray]:
    t = wd.lattice.t
    scale = wd.scale
    probe = 0.05 * scale * np.exp(0.25j * math.pi)
    radii = []
    for p in wd.finite_punctures:
        lam = float(conformal_factor(wd, p + probe, strict=False))
        radii.append(lam * abs(probe) ** 2 / region.R)
    crossing = min(radii + [region.delta] if region.delta > 0 else radii)
    first = 0.5 * region.h * crossing
    h_max = 0.25 * region.h * scale
    return _graded_nodes(0.5, first, region.h, h_max), _graded_nodes(0.5 * t, first, region.h, h_max)


def _costa_positions(wd: WeierstrassData, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    X = quarter_positions(wd, xs, ys)
    # lignes de réflexion : X1 = 0 sur x ∈ {0, 1/2}, X2 = 0 sur y ∈ {0, t/2}
    X[[0, -1], :, 0] = 0.0
    X[:, [0, -1], 1] = 0.0
    return X


def _cell_triangles(v00: np.ndarray, v10: np.ndarray, v11: np.ndarray, v01: np.ndarray, anti: np.ndarray) -> np.ndarray:
    diag = np.stack([np.stack([v00, v10, v11], -1), np.stack([v00, v11, v01], -1)], axis=1)
    other = np.stack([np.stack([v00, v10, v01], -1), np.stack([v10, v11, v01], -1)], axis=1)
    return np.where(anti[:, None, None], other, diag).reshape(-1, 3)


def _quarter_keep(
    wd: WeierstrassData, xs: np.ndarray, ys: np.ndarray, X: np.ndarray, region: MeshRegion
) -> np.ndarray:
    """Cellules gardées : tous les sommets dans |X| ≤ R et hors des disques δ."""
    zz = xs[:, None] + 1j * ys[None, :]
    ok = np.linalg.norm(X, axis=-1) <= region.R
    for p in wd.finite_punctures:
        ok &= np.abs(zz - p) > max(region.delta, 1e-14)
    return ok[:-1, :-1] & ok[1:, :-1] & ok[1:, 1:] & ok[:-1, 1:]


def _dirichlet_from_cells(n_vertices: int, kept: np.ndarray, removed: np.ndarray) -> np.ndarray:
    used = np.zeros(n_vertices, dtype=bool)
    used[kept.ravel()] = True
    touching = np.zeros(n_vertices, dtype=bool)
    touching[removed.ravel()] = True
    return used & touching


def _compact(
    n_vertices: int, triangles: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    used = np.unique(triangles)
    remap = np.full(n_vertices, -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return used, remap[triangles]


@dataclass(frozen=True)
class CostaGrid:
    """Grille du quart de tore et données échantillonnées partagées par les maillages."""

    xs: np.ndarray
    ys: np.ndarray
    positions: np.ndarray
    keep: np.ndarray
    region: MeshRegion


def costa_grid(wd: WeierstrassData, region: MeshRegion) -> CostaGrid:
    if wd.chart != ChartKind.TORUS:
        raise MeshFailure(f"{wd.name} is not a torus chart")
    xs, ys = _costa_grid(wd, region)
    positions = _costa_positions(wd, xs, ys)
    keep = _quarter_keep(wd, xs, ys, positions, region)
    if not keep.any():
        raise MeshFailure(f"Empty Costa region for R={region.R}, delta={region.delta}")
    return CostaGrid(xs=xs, ys=ys, positions=positions, keep=keep, region=region)


def quarter_mesh(wd: WeierstrassData, region: MeshRegion, grid: CostaGrid | None = None) -> ConformalMesh:
    """Maillage du domaine fondamental [0, 1/2] × [0, t/2] (conditions naturelles sur les bords de symétrie)."""
    grid = grid or costa_grid(wd, region)
    nx, ny = len(grid.xs), len(grid.ys)
    idx = np.arange(nx * ny).reshape(nx, ny)
    v00, v10 = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    v11, v01 = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    all_tris = _cell_triangles(v00, v10, v11, v01, np.zeros(len(v00), dtype=bool))
    keep = np.repeat(grid.keep.ravel(), 2)
    kept, removed = all_tris[keep], all_tris[~keep]
    dirichlet = _dirichlet_from_cells(nx * ny, kept, removed)
    used, triangles = _compact(nx * ny, kept)
    zz = (grid.xs[:, None] + 1j * grid.ys[None, :]).ravel()
    return _finalize(
        wd, wd.name, "quarter", zz[used], triangles, dirichlet[used],
        grid.positions.reshape(-1, 3)[used], region,
    )


def torus_mesh(wd: WeierstrassData, region: MeshRegion, grid: CostaGrid | None = None) -> ConformalMesh:
    """Tore complet par réflexion exacte du quart (indices périodiques)."""
    grid = grid or costa_grid(wd, region)
    t = wd.lattice.t
    xs, ys = grid.xs, grid.ys
    nx, ny = len(xs), len(ys)
    Nx, Ny = 2 * (nx - 1), 2 * (ny - 1)
    fx = np.concatenate([xs, 1.0 - xs[-2:0:-1]])
    fy = np.concatenate([ys, t - ys[-2:0:-1]])
    fx_ext = np.append(fx, 1.0)
    fy_ext = np.append(fy, t)
    qi = np.where(np.arange(Nx) <= nx - 1, np.arange(Nx), Nx - np.arange(Nx))
    qj = np.where(np.arange(Ny) <= ny - 1, np.arange(Ny), Ny - np.arange(Ny))
    sx = np.where(np.arange(Nx) <= nx - 1, 1.0, -1.0)
    sy = np.where(np.arange(Ny) <= ny - 1, 1.0, -1.0)

    a, b = np.meshgrid(np.arange(Nx), np.arange(Ny), indexing="ij")
    a, b = a.ravel(), b.ravel()
    a1, b1 = (a + 1) % Nx, (b + 1) % Ny
    node = lambda i, j: i * Ny + j  # noqa: E731
    anti = (a >= nx - 1) ^ (b >= ny - 1)
    tris = _cell_triangles(node(a, b), node(a1, b), node(a1, b1), node(a, b1), anti)
    ext = lambda i, j: fx_ext[i] + 1j * fy_ext[j]  # noqa: E731
    corner_cells = _cell_triangles(
        ext(a, b), ext(a + 1, b), ext(a + 1, b + 1), ext(a, b + 1), anti
    )
    cell_i = np.where(a <= nx - 2, a, Nx - 1 - a)
    cell_j = np.where(b <= ny - 2, b, Ny - 1 - b)
    keep = np.repeat(grid.keep[cell_i, cell_j], 2)

    kept, removed = tris[keep], tris[~keep]
    corners = corner_cells[keep]
    dirichlet = _dirichlet_from_cells(Nx * Ny, kept, removed)
    used, triangles = _compact(Nx * Ny, kept)

    ai, bj = np.divmod(np.arange(Nx * Ny), Ny)
    vertices = (fx[ai] + 1j * fy[bj])[used]
    quarter_pts = (xs[qi[ai]] + 1j * ys[qj[bj]])[used]
    X = grid.positions[qi[ai], qj[bj]].copy()
    X[:, 0] *= sx[ai]
    X[:, 1] *= sy[bj]
    # barycentres ramenés dans le quart (la réflexion est affine sur chaque cellule)
    quarter_all = xs[qi[ai]] + 1j * ys[qj[bj]]
    centroid_points = quarter_all[kept].mean(axis=1)
    return _finalize(
        wd, wd.name, "torus", vertices, triangles, dirichlet[used], X[used], region,
        corners=corners, eval_points=quarter_pts, centroid_points=centroid_points,
    )


# --- point d'entrée ---


def build_mesh(wd: WeierstrassData, R: float, delta: float, h: float) -> ConformalMesh:
    """Maillage de {z : |X(z)| ≤ R} privé des disques de rayon delta autour des punctures.

    Raises:
        MeshFailure: Carte non supportée ou région vide
    """
    region = MeshRegion(R=float(R), delta=float(delta), h=float(h))
    if R <= 0 or h <= 0:
        raise MeshFailure(f"Invalid region {region}")
    if wd.chart == ChartKind.TORUS:
        return torus_mesh(wd, region)
    return _plane_mesh(wd, region)


def dump_mesh(mesh: ConformalMesh, path: Path) -> Path:
    """Écrit le maillage au format texte documenté.

    Format : en-tête ``# indexlab mesh v1``, ligne ``vertices N`` puis N lignes
    ``re im dirichlet lambda2 potential weight X1 X2 X3``, ligne
    ``triangles M`` puis M lignes ``a b c`` (indices à partir de 0).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"# indexlab mesh v1 {mesh.name} {mesh.chart} R={mesh.region.R} delta={mesh.region.delta} h={mesh.region.h}\n")
        fh.write(f"vertices {mesh.n_vertices}\n")
        for k in range(mesh.n_vertices):
            z = mesh.vertices[k]
            X = mesh.positions[k]
            fh.write(
                f"{z.real:.17g} {z.imag:.17g} {int(mesh.dirichlet[k])} {mesh.lambda2[k]:.17g} "
                f"{mesh.potential[k]:.17g} {mesh.weight[k]:.17g} {X[0]:.17g} {X[1]:.17g} {X[2]:.17g}\n"
            )
        fh.write(f"triangles {mesh.n_triangles}\n")
        for a, b, c in mesh.triangles:
            fh.write(f"{a} {b} {c}\n")
    logger.info(f"Mesh written to {path}")
    return path
