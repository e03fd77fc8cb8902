"""Moteur de Weierstrass : immersion, métrique conforme, normale, courbure et bouts.

Les densités φ = (½(g⁻¹ - g)dh, (i/2)(g⁻¹ + g)dh, dh) sont construites une
fois comme poignées réduites, ce qui donne les bonnes limites aux zéros et
pôles de g. Les quantités qui ne dépendent que de g (normale, densité
sphérique) basculent sur 1/g là où |g| > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any

import numpy as np
import pandas as pd
from scipy.integrate import quad_vec

from indexlab.config import settings
from indexlab.exceptions import (
    InconsistentMultiplicity,
    NonConvergent,
    PeriodViolation,
    PoleHit,
)
from indexlab.logging_conf import get_logger
from indexlab.services.complexfn import (
    Meromorphic,
    RationalMap,
    is_infinity,
    laurent_leading,
)
from indexlab.services.elliptic import RectLattice, wp_eval, wp_prime
from indexlab.services.topology import SurfaceTopology
from indexlab.utils.quadrature import gauss_legendre, log_slope, midpoints, richardson

logger = get_logger(__name__)


class ChartKind(str, Enum):
    """Type de carte conforme."""

    PLANE = "plane"
    TORUS = "torus"


@dataclass(frozen=True, eq=False)
class WeierstrassData:
    """Données de Weierstrass (g, dh = dh_density·dz) sur une carte épointée.

    Attributes:
        name: Nom de catalogue ou "rational"
        gauss_map: Application de Gauss g
        dh_density: Densité de la différentielle de hauteur
        chart: Plan (éventuellement épointé) ou tore rectangulaire C/L(it)
        punctures: Points retirés (INFINITY pour le point à l'infini)
        basepoint: Point de base des intégrales de chemin
        base_value: Valeur de X au point de base
        lattice: Réseau du tore (carte TORUS uniquement)
        parameters: Paramètres du catalogue (k, t, A, ...)
        period_defect: Période verticale résiduelle de φ2 (famille de Costa)
    """

    name: str
    gauss_map: Meromorphic
    dh_density: Meromorphic
    chart: ChartKind
    punctures: tuple[complex, ...]
    basepoint: complex
    base_value: tuple[float, float, float] = (0.0, 0.0, 0.0)
    lattice: RectLattice | None = None
    parameters: tuple[tuple[str, float], ...] = field(default_factory=tuple)
    period_defect: float = 0.0

    def __post_init__(self) -> None:
        if self.chart == ChartKind.TORUS and self.lattice is None:
            raise ValueError("une carte torique exige un réseau")
        if any(is_infinity(p) for p in self.punctures) and self.chart == ChartKind.TORUS:
            raise ValueError("le tore n'a pas de point à l'infini")

    @cached_property
    def phi(self) -> tuple[Meromorphic, Meromorphic, Meromorphic]:
        g, h = self.gauss_map, self.dh_density
        q_minus = h / g
        q_plus = g * h
        return (0.5 * (q_minus - q_plus), 0.5j * (q_minus + q_plus), h)

    @cached_property
    def gauss_derivative(self) -> Meromorphic:
        return self.gauss_map.derivative()

    @cached_property
    def inverse_gauss(self) -> Meromorphic:
        return self.gauss_map.reciprocal()

    @cached_property
    def inverse_gauss_derivative(self) -> Meromorphic:
        return self.inverse_gauss.derivative()

    @property
    def finite_punctures(self) -> tuple[complex, ...]:
        return tuple(p for p in self.punctures if not is_infinity(p))

    @property
    def scale(self) -> float:
        """Échelle de la carte (côté court du tore, 1 sur le plan)."""
        if self.chart == ChartKind.TORUS:
            return min(1.0, self.lattice.t)
        return 1.0

    def parameter(self, key: str, default: float | None = None) -> float | None:
        return dict(self.parameters).get(key, default)


# --- évaluation vectorisée ---


def _evaluate_handles(
    wd: WeierstrassData, handles: tuple[Meromorphic, ...], z: Any, strict: bool
) -> list[np.ndarray]:
    zz = np.asarray(z, dtype=complex)
    if wd.chart == ChartKind.TORUS:
        w = np.asarray(wp_eval(wd.lattice, zz, strict=strict))
        wp = np.asarray(wp_prime(wd.lattice, np.where(np.isinf(w.real), 0.25 + 0.25j, zz)))
        return [np.asarray(h.evaluate_at(w, wp, strict=strict)) for h in handles]
    return [np.asarray(h.evaluate(zz, strict=strict)) * np.ones(zz.shape) for h in handles]


def _require_regular(wd: WeierstrassData, z: complex) -> None:
    if is_infinity(z):
        raise PoleHit("z est le point à l'infini", point=z)
    for p in wd.finite_punctures:
        gap = z - p
        if wd.chart == ChartKind.TORUS:
            gap = complex(wd.lattice.reduce(gap))
        if abs(gap) < 1e-12:
            raise PoleHit(f"Puncture hit at z={z}", point=z)


def phi_array(wd: WeierstrassData, z: Any, strict: bool = True) -> np.ndarray:
    """Densités φ1, φ2, φ3 empilées sur le dernier axe (forme z.shape + (3,))."""
    return np.stack(_evaluate_handles(wd, wd.phi, z, strict), axis=-1)


def phi_components(wd: WeierstrassData, z: complex) -> tuple[complex, complex, complex]:
    """Les trois densités φ en un point régulier de la carte.

    Args:
        wd: Données de Weierstrass
        z: Point de la carte (pas une puncture)

    Returns:
        (φ1, φ2, φ3) en z

    Raises:
        PoleHit: Si z est une puncture
    """
    _require_regular(wd, complex(z))
    values = phi_array(wd, complex(z))
    return complex(values[0]), complex(values[1]), complex(values[2])


def conformal_factor(wd: WeierstrassData, z: Any, strict: bool = True) -> Any:
    """λ = ½(|g| + |g|⁻¹)|dh| = |φ|/√2 (métrique λ²|dz|²)."""
    if strict and np.ndim(z) == 0:
        _require_regular(wd, complex(z))
    phi = phi_array(wd, z, strict=strict)
    lam = np.sqrt(np.sum(np.abs(phi) ** 2, axis=-1) / 2.0)
    return float(lam) if np.ndim(lam) == 0 else lam


def _gauss_split(wd: WeierstrassData, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(valeur, dérivée, masque) avec bascule sur u = 1/g là où |g| > 1."""
    g, dg = _evaluate_handles(wd, (wd.gauss_map, wd.gauss_derivative), z, strict=False)
    flip = ~(np.abs(g) <= 1.0)
    if np.any(flip):
        u, du = _evaluate_handles(
            wd, (wd.inverse_gauss, wd.inverse_gauss_derivative), z[flip], strict=False
        )
        g = g.copy()
        dg = dg.copy()
        g[flip] = u
        dg[flip] = du
    return g, dg, flip


def spherical_density(wd: WeierstrassData, z: Any) -> Any:
    """4|g′|²/(1 + |g|²)², densité d'aire sphérique de g ; κλ² = -spherical_density."""
    zz = np.asarray(z, dtype=complex)
    g, dg, _ = _gauss_split(wd, zz.ravel())
    out = (4.0 * np.abs(dg) ** 2 / (1.0 + np.abs(g) ** 2) ** 2).reshape(zz.shape)
    return float(out) if out.ndim == 0 else out


def potential(wd: WeierstrassData, z: Any) -> Any:
    """Potentiel de l'opérateur réduit à la carte : V = 2κλ²."""
    return -2.0 * np.asarray(spherical_density(wd, z))


def gauss_curvature(wd: WeierstrassData, z: Any) -> Any:
    """κ = -4|g′|²/((1 + |g|²)² λ²) ≤ 0."""
    if np.ndim(z) == 0:
        _require_regular(wd, complex(z))
    kappa = -np.asarray(spherical_density(wd, z)) / np.asarray(conformal_factor(wd, z, False)) ** 2
    return float(kappa) if np.ndim(kappa) == 0 else kappa


def curvature_closed_form(wd: WeierstrassData, z: Any) -> Any:
    """κ = -16/(|g| + |g|⁻¹)⁴ · |(dg/g)/dh|², forme directe (points génériques)."""
    g, dg, h = _evaluate_handles(
        wd, (wd.gauss_map, wd.gauss_derivative, wd.dh_density), z, strict=True
    )
    mod = np.abs(g)
    kappa = -16.0 / (mod + 1.0 / mod) ** 4 * np.abs(dg / (g * h)) ** 2
    return float(kappa) if np.ndim(kappa) == 0 else kappa


def curvature_density_identity(wd: WeierstrassData, z: Any) -> float:
    """Écart relatif maximal entre κλ² (densité sphérique) et la forme directe de κ."""
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    lam2 = np.asarray(conformal_factor(wd, zz, strict=False)) ** 2
    via_density = -np.asarray(spherical_density(wd, zz))
    direct = np.asarray(curvature_closed_form(wd, zz)) * lam2
    scale = np.maximum(np.abs(via_density), 1e-300)
    return float(np.max(np.abs(direct - via_density) / scale))


def unit_normal(wd: WeierstrassData, z: Any) -> np.ndarray:
    """N = (2Re g, 2Im g, |g|² - 1)/(|g|² + 1), forme z.shape + (3,)."""
    zz = np.asarray(z, dtype=complex)
    if zz.ndim == 0:
        _require_regular(wd, complex(zz))
    g, _, flip = _gauss_split(wd, zz.ravel())
    denom = 1.0 + np.abs(g) ** 2
    sign = np.where(flip, -1.0, 1.0)
    normal = np.stack(
        [2.0 * g.real / denom, sign * 2.0 * g.imag / denom, sign * (np.abs(g) ** 2 - 1.0) / denom],
        axis=-1,
    )
    return normal.reshape(zz.shape + (3,))


# --- intégration de chemin ---


def segment_integrals(wd: WeierstrassData, a: Any, b: Any, order: int = 16) -> np.ndarray:
    """Re∫_a^b φ dz le long de segments droits (Gauss-Legendre, vectorisé)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a, b = np.broadcast_arrays(a, b)
    nodes, weights = gauss_legendre(order)
    step = b - a
    points = a[..., None] + nodes * step[..., None]
    values = phi_array(wd, points, strict=False)
    summed = np.einsum("...kc,k->...c", values, weights)
    return np.real(summed * step[..., None])


def trace_path(wd: WeierstrassData, points: Any, start: Any, order: int = 16) -> np.ndarray:
    """X le long de polylignes : points (..., K), start (..., 3) → (..., K, 3)."""
    pts = np.asarray(points, dtype=complex)
    increments = segment_integrals(wd, pts[..., :-1], pts[..., 1:], order=order)
    zeros = np.zeros(pts.shape[:-1] + (1, 3))
    cumulative = np.concatenate([zeros, np.cumsum(increments, axis=-2)], axis=-2)
    return cumulative + np.asarray(start, dtype=float)[..., None, :]


def polar_positions(
    wd: WeierstrassData, center: complex, radius: float, s: Any, thetas: Any
) -> np.ndarray:
    """X aux points center + radius·e^(s + iθ), forme (len(thetas), len(s), 3).

    L'anneau |z - center| = radius est parcouru depuis immerse(center + radius),
    puis chaque rayon est intégré vers l'extérieur (s > 0) et vers l'intérieur (s < 0).
    """
    s = np.asarray(s, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    ring = center + radius * np.exp(1j * np.concatenate([[0.0], thetas]))
    hub = trace_path(wd, ring, immerse(wd, center + radius))[1:]
    out = np.empty((len(thetas), len(s), 3))
    rays = np.exp(1j * thetas)[:, None]
    for mask, order in ((s >= 0, np.argsort(s)), (s < 0, np.argsort(-s))):
        picked = order[mask[order]]
        if len(picked) == 0:
            continue
        steps = np.concatenate([[0.0], s[picked]])
        pts = center + radius * np.exp(steps)[None, :] * rays
        with np.errstate(all="ignore"):
            out[:, picked] = trace_path(wd, pts, hub)[:, 1:]
    return out


def quarter_positions(wd: WeierstrassData, xs: Any, ys: Any) -> np.ndarray:
    """X sur une grille de [0, 1/2] × [0, t/2], forme (len(xs), len(ys), 3).

    Chemins : du centre (1+it)/2 vers (1/2, t/4), épine horizontale y = t/4,
    puis une verticale par colonne. Les nœuds sur un coin épointé valent inf.
    """
    if wd.lattice is None:
        raise ValueError(f"{wd.name} has no torus chart")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    spine_y = 0.25 * wd.lattice.t
    start = np.asarray(wd.base_value, dtype=float) + segment_integrals(
        wd, wd.basepoint, complex(0.5, spine_y)
    )
    spine_pts = np.concatenate([[0.5], xs[::-1]]) + 1j * spine_y
    spine = trace_path(wd, spine_pts, start)[1:][::-1]

    X = np.empty((len(xs), len(ys), 3))
    for mask, order in ((ys >= spine_y, np.argsort(ys)), (ys < spine_y, np.argsort(-ys))):
        picked = order[mask[order]]
        if len(picked) == 0:
            continue
        column = np.concatenate([[spine_y], ys[picked]])
        pts = xs[:, None] + 1j * np.broadcast_to(column, (len(xs), len(column)))
        with np.errstate(all="ignore"):
            X[:, picked] = trace_path(wd, pts, spine)[:, 1:]
    return X


def _obstacles(wd: WeierstrassData) -> list[complex]:
    finite = list(wd.finite_punctures)
    if wd.chart != ChartKind.TORUS:
        return finite
    tau = wd.lattice.tau
    return [p + m + n * tau for p in finite for m in range(-1, 3) for n in range(-1, 3)]


def _detour_polyline(
    start: complex, end: complex, obstacles: list[complex], side: float, force: bool = False
) -> list[complex]:
    """Polyligne de start à end contournant les punctures proches.

    Avec force=True, contourne aussi la puncture la plus proche du segment
    du côté opposé (chemin non homotope au chemin direct).
    """
    points = [start, end]
    if force and obstacles:
        chord = end - start

        def gap(p: complex) -> float:
            tau = float(np.clip(((p - start) * np.conj(chord)).real / abs(chord) ** 2, 0.0, 1.0))
            return abs(start + tau * chord - p)

        p = min(obstacles, key=gap)
        tau = float(np.clip(((p - start) * np.conj(chord)).real / abs(chord) ** 2, 0.0, 1.0))
        closest = start + tau * chord
        direction = (closest - p) / abs(closest - p) if abs(closest - p) > 0 else 1j * chord / abs(chord)
        radius = 0.5 * min(abs(start - p), abs(end - p))
        points = [start, p - direction * radius, end]
    for _ in range(8):
        inserted = False
        for i in range(len(points) - 1):
            a, b = points[i], points[i + 1]
            chord = b - a
            length = abs(chord)
            if length == 0:
                continue
            for p in obstacles:
                tau = ((p - a) * np.conj(chord)).real / length**2
                if not 0.0 < tau < 1.0:
                    continue
                closest = a + tau * chord
                dist = abs(closest - p)
                radius = 0.5 * min(abs(a - p), abs(b - p))
                if dist < 0.99 * radius:
                    direction = (closest - p) / dist if dist > 0 else 1j * chord / length
                    points.insert(i + 1, p + side * direction * radius)
                    inserted = True
                    break
            if inserted:
                break
        if not inserted:
            break
    return points


def _quad_segment(wd: WeierstrassData, a: complex, b: complex) -> np.ndarray:
    step = b - a

    def integrand(s: float) -> np.ndarray:
        return np.real(phi_array(wd, a + s * step) * step)

    value, _ = quad_vec(integrand, 0.0, 1.0, epsabs=settings.quad_abs_tol, epsrel=1e-10)
    return np.asarray(value)


def _integrate_polyline(wd: WeierstrassData, points: list[complex]) -> np.ndarray:
    total = np.array(wd.base_value, dtype=float)
    for a, b in zip(points[:-1], points[1:], strict=True):
        total = total + _quad_segment(wd, a, b)
    return total


def _representative(wd: WeierstrassData, z: complex) -> complex:
    if wd.chart == ChartKind.TORUS:
        return wd.basepoint + complex(wd.lattice.reduce(z - wd.basepoint))
    return z


def immerse(wd: WeierstrassData, z: complex, verify: bool = False) -> np.ndarray:
    """X(z) = Re∫ φ depuis le point de base (quadrature adaptative).

    Args:
        wd: Données de Weierstrass
        z: Point régulier de la carte
        verify: Compare avec un chemin contournant la puncture la plus proche

    Returns:
        Vecteur X(z) de R³

    Raises:
        PoleHit: Si z est une puncture
        PeriodViolation: Si les deux chemins diffèrent de plus de 1e-6
    """
    z = complex(z)
    _require_regular(wd, z)
    target = _representative(wd, z)
    obstacles = _obstacles(wd)
    value = _integrate_polyline(wd, _detour_polyline(wd.basepoint, target, obstacles, 1.0))
    if verify and obstacles and target != wd.basepoint:
        other = _integrate_polyline(
            wd, _detour_polyline(wd.basepoint, target, obstacles, -1.0, force=True)
        )
        gap = float(np.max(np.abs(other - value)))
        if gap > 1e-6:
            raise PeriodViolation(f"Path dependence {gap:.3e} at z={z}")
    return value


# --- bouts ---


@dataclass(frozen=True)
class EndData:
    """Données d'un bout : multiplicité d, coefficient A, normale limite."""

    puncture: complex
    multiplicity: int
    spin_coefficient: complex
    normal_limit: tuple[float, float, float]
    pole_orders: tuple[int, int, int]
    winding: int
    branching_order: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "puncture": "infinity" if is_infinity(self.puncture) else [self.puncture.real, self.puncture.imag],
            "multiplicity": self.multiplicity,
            "spin_coefficient": [self.spin_coefficient.real, self.spin_coefficient.imag],
            "normal_limit": list(self.normal_limit),
            "pole_orders": list(self.pole_orders),
            "winding": self.winding,
            "branching_order": self.branching_order,
        }


def _local_scale(wd: WeierstrassData, puncture: complex) -> float:
    """Rayon de référence autour d'une puncture, dans la coordonnée locale."""
    others = [p for p in wd.finite_punctures if p != puncture]
    if is_infinity(puncture):
        far = max([abs(p) for p in others], default=0.0)
        return 1.0 / max(1.0, 4.0 * far)
    if wd.chart == ChartKind.TORUS:
        return 0.25 * wd.scale
    gaps = [abs(p - puncture) for p in others]
    return 0.25 * min(gaps) if gaps else 0.25


def _local_point(puncture: complex, u: Any) -> Any:
    """Point de la carte de coordonnée locale u (w = 1/z à l'infini)."""
    if is_infinity(puncture):
        return 1.0 / np.asarray(u)
    return puncture + np.asarray(u)


def _local_handles(wd: WeierstrassData, puncture: complex) -> tuple[tuple[Meromorphic, ...], complex]:
    if not is_infinity(puncture):
        return wd.phi, puncture
    pullback = RationalMap([-1.0], [0.0, 0.0, 1.0])
    return tuple(phi.invert_chart() * pullback for phi in wd.phi), 0j


def _is_zero(handle: Meromorphic) -> bool:
    return bool(getattr(handle, "is_zero", False))


def branching_order(wd: WeierstrassData, puncture: complex) -> int:
    """n tel que g - g(p) (ou 1/g) s'annule à l'ordre n + 1 en p."""
    g = wd.gauss_map
    if is_infinity(puncture):
        g, center = g.invert_chart(), 0j
    else:
        center = puncture
    if _is_zero(g.derivative()):
        return 0
    order = g.order_at(center)
    if order != 0:
        return abs(order) - 1
    return (g - complex(g.evaluate(center))).order_at(center) - 1


def _ring_positions(wd: WeierstrassData, puncture: complex, radius: float, samples: int) -> np.ndarray:
    theta = np.linspace(0.0, 2.0 * np.pi, samples + 1)
    return _local_point(puncture, radius * np.exp(1j * theta))


def end_analysis(wd: WeierstrassData, puncture: complex) -> EndData:
    """Multiplicité, coefficient dominant et normale limite d'un bout.

    La multiplicité algébrique (ordre de pôle maximal des φ moins un) est
    recoupée par l'enroulement de X/|X| sur un petit cercle autour de p.

    Raises:
        InconsistentMultiplicity: Si les deux déterminations diffèrent
    """
    if puncture not in wd.punctures:
        raise ValueError(f"{puncture} n'est pas une puncture de {wd.name}")
    handles, center = _local_handles(wd, puncture)
    orders = tuple(0 if _is_zero(h) else max(0, -h.order_at(center)) for h in handles)
    d = max(orders) - 1
    if d < 1:
        raise InconsistentMultiplicity(f"Puncture {puncture} carries no end (pole orders {orders})")
    dominant = orders.index(max(orders))
    scale = _local_scale(wd, puncture)
    spin = laurent_leading(handles[dominant], center, -(d + 1), radius=0.2 * scale)

    ring = _ring_positions(wd, puncture, 1e-6 * scale, 64)[:-1]
    normal = unit_normal(wd, ring).mean(axis=0)
    normal = normal / np.linalg.norm(normal)

    winding = _end_winding(wd, puncture, normal, 1e-3 * scale)
    if abs(winding) != d:
        raise InconsistentMultiplicity(
            f"End at {puncture}: pole-order multiplicity {d} but winding {winding}"
        )
    end = EndData(
        puncture=puncture,
        multiplicity=d,
        spin_coefficient=spin,
        normal_limit=tuple(float(c) for c in normal),
        pole_orders=orders,
        winding=abs(winding),
        branching_order=branching_order(wd, puncture),
    )
    logger.info(f"End analysis {wd.name} at {puncture}: d={d}, pole orders={orders}")
    return end


def pole_multiplicity(wd: WeierstrassData, puncture: complex) -> int:
    """Multiplicité algébrique d = (ordre de pôle maximal des φ) - 1, sans recoupement."""
    handles, center = _local_handles(wd, puncture)
    return max(0 if _is_zero(h) else -h.order_at(center) for h in handles) - 1


def surface_topology(wd: WeierstrassData) -> SurfaceTopology:
    """Topologie (g, r, d) lue sur la carte : genre 0 pour le plan, 1 pour le tore."""
    genus = 1 if wd.chart == ChartKind.TORUS else 0
    return SurfaceTopology.of(genus, [pole_multiplicity(wd, p) for p in wd.punctures])


def _end_winding(wd: WeierstrassData, puncture: complex, normal: np.ndarray, radius: float) -> int:
    ring = _ring_positions(wd, puncture, radius, 512)
    start = immerse(wd, complex(ring[0]))
    values = trace_path(wd, ring, start)
    unit = values / np.linalg.norm(values, axis=-1, keepdims=True)
    helper = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - np.dot(helper, normal) * normal
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    angle = np.unwrap(np.arctan2(unit @ e2, unit @ e1))
    return int(round((angle[-1] - angle[0]) / (2.0 * np.pi)))


@dataclass(frozen=True)
class DecayReport:
    """Ajustement log-log d'une décroissance le long d'un rayon vers un bout."""

    quantity: str
    puncture: complex
    exponent: float
    expected: float
    passed: bool
    identically_zero: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "quantity": self.quantity,
            "puncture": "infinity" if is_infinity(self.puncture) else [self.puncture.real, self.puncture.imag],
            "exponent": self.exponent,
            "expected": self.expected,
            "passed": self.passed,
            "identically_zero": self.identically_zero,
        }


def _end_ray(
    wd: WeierstrassData, puncture: complex, r_min: float, r_start: float | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rayon vers le bout : (rayons locaux, points z, X(z)) par intégration cumulée."""
    scale = _local_scale(wd, puncture)
    r_start = r_start or scale
    count = int(math.ceil(math.log(r_start / r_min) / math.log(1.25))) + 1
    radii = np.geomspace(r_start, r_min, count)
    z = _local_point(puncture, radii * np.exp(0.3j))
    X = trace_path(wd, z, immerse(wd, complex(z[0])))
    return radii, z, X


def normal_gradient_bound_check(wd: WeierstrassData, end: EndData) -> DecayReport:
    """Décroissance de |N·X/|X|| ≲ |X|^(-1/d) le long d'un rayon vers le bout."""
    radii, z, X = _end_ray(wd, end.puncture, 1e-10 * _local_scale(wd, end.puncture))
    keep = radii <= 1e-6 * _local_scale(wd, end.puncture)
    norm_x = np.linalg.norm(X[keep], axis=-1)
    support = np.abs(np.sum(unit_normal(wd, z[keep]) * X[keep], axis=-1)) / norm_x
    threshold = 1.0 / end.multiplicity - 0.1
    if np.max(support) < 1e-12:
        return DecayReport("normal_gradient", end.puncture, math.inf, threshold, True, True)
    exponent = -log_slope(norm_x, support)
    return DecayReport("normal_gradient", end.puncture, exponent, threshold, exponent >= threshold)


def curvature_decay_fit(wd: WeierstrassData, end: EndData) -> DecayReport:
    """Pente de log|κ| contre log|X| comparée à -2 - 2(n+1)/d."""
    scale = _local_scale(wd, end.puncture)
    radii, z, X = _end_ray(wd, end.puncture, 1e-6 * scale)
    keep = radii <= 1e-3 * scale
    kappa = np.abs(gauss_curvature(wd, z[keep]))
    expected = -2.0 - 2.0 * (end.branching_order + 1) / end.multiplicity
    if np.max(kappa) == 0.0:
        return DecayReport("curvature", end.puncture, -math.inf, expected, True, True)
    slope = log_slope(np.linalg.norm(X[keep], axis=-1), kappa)
    return DecayReport("curvature", end.puncture, slope, expected, abs(slope - expected) <= 0.05 * abs(expected))


# --- courbure totale ---


@dataclass(frozen=True)
class CurvatureQuadrature:
    """Paramètres de quadrature de ∫κ dA."""

    deltas: tuple[float, float, float] = (1e-2, 5e-3, 2.5e-3)
    ds: float = 0.02
    n_theta: int = 256
    torus_resolution: int = 128


@dataclass(frozen=True)
class CurvatureIntegral:
    """Courbure totale extrapolée et estimation d'erreur."""

    value: float
    error: float
    degree: float

    def to_dict(self) -> dict[str, float]:
        return {"value": self.value, "error": self.error, "degree": self.degree}


def _log_polar_integral(wd: WeierstrassData, delta: float, spec: CurvatureQuadrature) -> float:
    span = -math.log(delta)
    n_s = int(math.ceil(2.0 * span / spec.ds))
    s, ds = midpoints(-span, span, n_s)
    theta, dtheta = midpoints(0.0, 2.0 * math.pi, spec.n_theta)
    total = 0.0
    for chunk in np.array_split(s, max(1, n_s // 200)):
        z = np.exp(chunk[:, None] + 1j * theta[None, :])
        total += float(np.sum(np.asarray(spherical_density(wd, z)) * np.exp(2.0 * chunk)[:, None]))
    return -total * ds * dtheta


def _torus_integral(wd: WeierstrassData, resolution: int) -> float:
    t = wd.lattice.t
    nx = 2 * (resolution // 2)
    ny = max(2, 2 * int(round(resolution * t / 2)))
    x, dx = midpoints(0.0, 1.0, nx)
    y, dy = midpoints(0.0, t, ny)
    z = x[:, None] + 1j * y[None, :]
    return -float(np.sum(np.asarray(spherical_density(wd, z)))) * dx * dy


def total_curvature(wd: WeierstrassData, spec: CurvatureQuadrature | None = None) -> CurvatureIntegral:
    """∫κ dA = -∫ 4|g′|²/(1+|g|²)² dx dy avec extrapolation.

    Plan : règle du point milieu log-polaire sur δ ≤ |z| ≤ 1/δ puis
    Richardson en δ. Tore : point milieu périodique puis comparaison à
    résolution double.

    Raises:
        NonConvergent: Si le résidu d'extrapolation dépasse 1e-2·|valeur|
    """
    spec = spec or CurvatureQuadrature()
    if wd.chart == ChartKind.TORUS:
        coarse = _torus_integral(wd, spec.torus_resolution)
        value = _torus_integral(wd, 2 * spec.torus_resolution)
        residual = abs(value - coarse)
    else:
        raw = [_log_polar_integral(wd, delta, spec) for delta in spec.deltas]
        first = richardson(raw[0], raw[1], spec.deltas[0] / spec.deltas[1], 2)
        value = richardson(raw[1], raw[2], spec.deltas[1] / spec.deltas[2], 2)
        residual = abs(value - first)
    if residual > 1e-2 * abs(value) + 1e-12:
        raise NonConvergent(f"Total curvature of {wd.name} not converged", value, residual)
    logger.info(f"Total curvature {wd.name}: {value:.6f} ± {residual:.2e}")
    return CurvatureIntegral(value=value, error=residual, degree=-value / (4.0 * math.pi))


def gauss_map_degree(wd: WeierstrassData) -> int:
    """Degré de g (exact pour une fraction rationnelle, par quadrature sur le tore)."""
    g = wd.gauss_map
    if isinstance(g, RationalMap):
        return 0 if g.is_constant() else max(g.degrees)
    coarse = CurvatureQuadrature(torus_resolution=64)
    return int(round(total_curvature(wd, coarse).degree))


def excision_radius(wd: WeierstrassData, puncture: complex, fraction: float | None = None) -> float:
    """Rayon δ du disque excisé portant moins de fraction·∫|κ| (décroissance en |z|^(2n))."""
    fraction = settings.excision_fraction if fraction is None else fraction
    scale = _local_scale(wd, puncture)
    total = 4.0 * math.pi * gauss_map_degree(wd)
    if total == 0.0:
        return 1e-3 * scale
    n = branching_order(wd, puncture)
    r0 = 1e-2 * scale
    ring = _ring_positions(wd, puncture, r0, 64)[:-1]
    density = np.asarray(spherical_density(wd, ring))
    if is_infinity(puncture):
        density = density * np.abs(ring) ** 4
    c = float(np.mean(density)) / r0 ** (2 * n)
    if c == 0.0:
        return 0.5 * scale
    delta = ((2 * n + 2) * fraction * total / (2.0 * math.pi * c)) ** (1.0 / (2 * n + 2))
    return float(min(delta, 0.5 * scale))


def residues(wd: WeierstrassData, puncture: complex) -> np.ndarray:
    """Résidus des trois φ en une puncture (dans la coordonnée locale)."""
    handles, center = _local_handles(wd, puncture)
    radius = 0.2 * _local_scale(wd, puncture)
    return np.array(
        [0j if _is_zero(h) else laurent_leading(h, center, -1, radius=radius) for h in handles]
    )


def check_periods(wd: WeierstrassData, tol: float = 1e-8) -> dict[str, list[float]]:
    """Vérifie que les résidus des φ sont réels en chaque puncture.

    Raises:
        PeriodViolation: Si une partie imaginaire dépasse tol
    """
    report = {}
    for p in wd.punctures:
        res = residues(wd, p)
        if np.max(np.abs(res.imag)) > tol:
            raise PeriodViolation(f"Non-real residue at {p}: {res}")
        report["infinity" if is_infinity(p) else f"{p.real:g}{p.imag:+g}i"] = res.real.tolist()
    return report


def sample_surface(
    wd: WeierstrassData, z: Any, X: np.ndarray | None = None
) -> pd.DataFrame:
    """Tableau (z.re, z.im, X1, X2, X3, lambda, kappa) pour export CSV."""
    zz = np.asarray(z, dtype=complex).ravel()
    if X is None:
        X = np.array([immerse(wd, complex(p)) for p in zz])
    lam = np.asarray(conformal_factor(wd, zz, strict=False))
    kappa = -np.asarray(spherical_density(wd, zz)) / lam**2
    return pd.DataFrame(
        {
            "z.re": zz.real,
            "z.im": zz.imag,
            "X1": X[:, 0],
            "X2": X[:, 1],
            "X3": X[:, 2],
            "lambda": lam,
            "kappa": kappa,
        }
    )
