"""Espace pondéré L²* et formes harmoniques de carré intégrable.

Le poids w(x) = (1 + |x|²)⁻¹ (log(2 + |x|))⁻² admet aux bouts les formes à pôle
d'ordre dⱼ + 1. Ce module fournit les dimensions, la quadrature des normes de
bout, les bases holomorphes et leurs matrices de Gram, le champ X_ω, la
famille de coupures logarithmiques et le calcul des parités sous τ1, τ2.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from scipy.integrate import quad

from indexlab.exceptions import DegenerateBasis, InconsistentMultiplicity, MeshFailure, NotEigenform
from indexlab.logging_conf import get_logger
from indexlab.services.complexfn import INFINITY, Meromorphic, RationalMap, is_infinity, laurent_leading
from indexlab.services.elliptic import EllipticFunction
from indexlab.services.surface import (
    ChartKind,
    WeierstrassData,
    conformal_factor,
    phi_array,
    pole_multiplicity,
    polar_positions,
    quarter_positions,
)
from indexlab.services.topology import Sidedness, SurfaceTopology
from indexlab.utils.quadrature import gauss_legendre
from indexlab.utils.seed import make_rng

logger = get_logger(__name__)


# --- poids ---


class L2StarWeight:
    """w(x) = (1 + |x|²)⁻¹ (log(2 + |x|))⁻², strictement décroissant en |x|."""

    sup = 1.0 / math.log(2.0) ** 2

    def __call__(self, x_norm: Any) -> Any:
        r = np.abs(np.asarray(x_norm, dtype=float))
        with np.errstate(over="ignore"):
            out = 1.0 / ((1.0 + r * r) * np.log(2.0 + r) ** 2)
        return float(out) if out.ndim == 0 else out


L2STAR = L2StarWeight()


def l2star_weight(x_norm: Any) -> Any:
    """Poids L²* en la norme extrinsèque |x| (nul pour |x| infini)."""
    return L2STAR(x_norm)


# --- parités ---


@dataclass(frozen=True, order=True)
class ParityType:
    """Signes sous τ1 : x1 ↦ -x1 (z ↦ -z̄) et τ2 : x2 ↦ -x2 (z ↦ z̄)."""

    s1: int
    s2: int

    def __post_init__(self) -> None:
        if self.s1 not in (1, -1) or self.s2 not in (1, -1):
            raise ValueError(f"parity signs must be ±1 (got {self.s1}, {self.s2})")

    @property
    def label(self) -> str:
        return ("+" if self.s1 > 0 else "-") + ("+" if self.s2 > 0 else "-")

    @classmethod
    def from_label(cls, label: str) -> ParityType:
        if len(label) != 2 or any(c not in "+-" for c in label):
            raise ValueError(f"invalid parity label {label!r}")
        return cls(1 if label[0] == "+" else -1, 1 if label[1] == "+" else -1)

    @classmethod
    def sectors(cls) -> tuple[ParityType, ...]:
        """Les quatre secteurs dans l'ordre (++, +-, -+, --)."""
        return (cls(1, 1), cls(1, -1), cls(-1, 1), cls(-1, -1))

    def __mul__(self, other: ParityType) -> ParityType:
        return ParityType(self.s1 * other.s1, self.s2 * other.s2)

    def __str__(self) -> str:
        return self.label


class ModelEndForm(str, Enum):
    """Formes modèles réelles au voisinage d'un bout (parties de dz/z, dz/z²) et dx, dy."""

    RADIAL = "(x dx + y dy)/(x²+y²)"
    ANGULAR = "(x dy - y dx)/(x²+y²)"
    QUADRUPOLE_REAL = "((x²-y²) dx + 2xy dy)/((x²-y²)²+4x²y²)"
    QUADRUPOLE_IMAG = "((x²-y²) dy - 2xy dx)/((x²-y²)²+4x²y²)"
    DX = "dx"
    DY = "dy"


def _model_coefficients(form: ModelEndForm) -> Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    def radial(x, y):
        r2 = x * x + y * y
        return x / r2, y / r2

    def angular(x, y):
        r2 = x * x + y * y
        return -y / r2, x / r2

    def quad_real(x, y):
        den = (x * x - y * y) ** 2 + 4 * x * x * y * y
        return (x * x - y * y) / den, 2 * x * y / den

    def quad_imag(x, y):
        den = (x * x - y * y) ** 2 + 4 * x * x * y * y
        return -2 * x * y / den, (x * x - y * y) / den

    table = {
        ModelEndForm.RADIAL: radial,
        ModelEndForm.ANGULAR: angular,
        ModelEndForm.QUADRUPOLE_REAL: quad_real,
        ModelEndForm.QUADRUPOLE_IMAG: quad_imag,
        ModelEndForm.DX: lambda x, y: (np.ones_like(x), np.zeros_like(x)),
        ModelEndForm.DY: lambda x, y: (np.zeros_like(x), np.ones_like(x)),
    }
    return table[form]


def _sign_of_ratio(pulled: np.ndarray, original: np.ndarray, what: str) -> int:
    scale = np.max(np.abs(original))
    keep = np.abs(original) > 1e-6 * scale
    if not np.any(keep):
        raise NotEigenform(f"{what}: form vanishes on every sample")
    ratio = pulled[keep] / original[keep]
    for sign in (1, -1):
        if np.allclose(ratio, sign, rtol=1e-6, atol=1e-8):
            return sign
    raise NotEigenform(f"{what}: pullback ratios {ratio[:4]} are not a common ±1")


def parity_type_of(
    form: ModelEndForm | tuple[Callable[..., Any], Callable[..., Any]], samples: int = 16
) -> ParityType:
    """Parité d'une 1-forme réelle P dx + Q dy par tiré en arrière sous les deux réflexions.

    Sous (x, y) ↦ (-x, y), P dx + Q dy devient -P(-x, y) dx + Q(-x, y) dy ;
    sous (x, y) ↦ (x, -y), P(x, -y) dx - Q(x, -y) dy.

    Raises:
        NotEigenform: Si les échantillons ne donnent pas un signe commun
    """
    if isinstance(form, ModelEndForm):
        coefficients = _model_coefficients(form)
        name = form.value
    else:
        P, Q = form
        coefficients = lambda x, y: (np.asarray(P(x, y), float), np.asarray(Q(x, y), float))  # noqa: E731
        name = "custom form"
    rng = make_rng(offset=17)
    radius = rng.uniform(0.2, 1.0, samples)
    theta = rng.uniform(0.0, 2.0 * math.pi, samples)
    x, y = radius * np.cos(theta), radius * np.sin(theta)
    P0, Q0 = coefficients(x, y)
    original = np.concatenate([P0, Q0])

    P1, Q1 = coefficients(-x, y)
    s1 = _sign_of_ratio(np.concatenate([-P1, Q1]), original, name)
    P2, Q2 = coefficients(x, -y)
    s2 = _sign_of_ratio(np.concatenate([P2, -Q2]), original, name)
    return ParityType(s1, s2)


# --- formes méromorphes ---


def _form_pole_order(density: Meromorphic, puncture: complex) -> int:
    """Ordre de pôle de density·dz (à l'infini, dz = -dw/w²)."""
    if getattr(density, "is_zero", False):
        return 0
    if is_infinity(puncture):
        return max(0, 2 - density.invert_chart().order_at(0j))
    return max(0, -density.order_at(puncture))


@dataclass(frozen=True, eq=False)
class MeromorphicForm:
    """Forme ω = density·dz ; la forme harmonique réelle associée est Re ω.

    Attributes:
        density: Poignée méromorphe de la densité
        pole_orders: Ordre de pôle en chaque puncture
        label: Nom lisible (export)
    """

    density: Meromorphic
    pole_orders: tuple[tuple[complex, int], ...] = field(default_factory=tuple)
    label: str = ""

    @classmethod
    def from_density(cls, wd: WeierstrassData, density: Meromorphic, label: str = "") -> MeromorphicForm:
        orders = tuple((p, _form_pole_order(density, p)) for p in wd.punctures)
        return cls(density=density, pole_orders=orders, label=label)

    def order_at(self, puncture: complex) -> int:
        for p, order in self.pole_orders:
            if (is_infinity(p) and is_infinity(puncture)) or p == puncture:
                return order
        return 0

    def evaluate(self, z: Any, strict: bool = True) -> Any:
        return self.density.evaluate(z, strict=strict)

    def __add__(self, other: MeromorphicForm) -> MeromorphicForm:
        merged = {p: max(o, other.order_at(p)) for p, o in self.pole_orders}
        return MeromorphicForm(
            self.density + other.density, tuple(merged.items()), f"{self.label}+{other.label}"
        )

    def __rmul__(self, scalar: complex) -> MeromorphicForm:
        return MeromorphicForm(scalar * self.density, self.pole_orders, f"{scalar}·{self.label}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "pole_orders": {
                ("infinity" if is_infinity(p) else f"{p.real:g}{p.imag:+g}i"): order
                for p, order in self.pole_orders
            },
        }


def hodge_star_dx(wd: WeierstrassData, i: int) -> MeromorphicForm:
    """*dxⁱ = Re(-i φᵢ dz), i ∈ {1, 2, 3}."""
    if i not in (1, 2, 3):
        raise ValueError(f"coordinate index must be 1, 2 or 3 (got {i})")
    return MeromorphicForm.from_density(wd, -1j * wd.phi[i - 1], label=f"*dx{i}")


def _residue_radius(wd: WeierstrassData, puncture: complex) -> float:
    finite = [p for p in wd.finite_punctures if p != puncture]
    if wd.chart == ChartKind.TORUS:
        return 0.1 * wd.scale
    if is_infinity(puncture):
        return 2.0 * max([abs(p) for p in finite], default=0.0) + 1.0
    gaps = [abs(p - puncture) for p in finite]
    return 0.25 * min(gaps + [1.0])


def form_residue(wd: WeierstrassData, form: MeromorphicForm, puncture: complex) -> complex:
    """Résidu de ω en une puncture (à l'infini : -(1/2πi)∮ ω sur un grand cercle)."""
    radius = _residue_radius(wd, puncture)
    if is_infinity(puncture):
        return -laurent_leading(form.density, 0j, -1, radius=radius)
    return laurent_leading(form.density, puncture, -1, radius=radius)


def residue_sum(wd: WeierstrassData, form: MeromorphicForm) -> complex:
    return complex(sum(form_residue(wd, form, p) for p in wd.punctures))


def form_parity(wd: WeierstrassData, form: MeromorphicForm, samples: int = 12) -> ParityType:
    """Parité de Re ω sous τ1 : z ↦ -z̄ et τ2 : z ↦ z̄.

    τ1* Re(F dz) = Re(-conj F(-z̄) dz) et τ2* Re(F dz) = Re(conj F(z̄) dz).

    Raises:
        NotEigenform: Si Re ω n'est pas propre pour les deux réflexions
    """
    rng = make_rng(offset=29)
    if wd.chart == ChartKind.TORUS:
        t = wd.lattice.t
        z = rng.uniform(0.1, 0.4, samples) + 1j * t * rng.uniform(0.1, 0.4, samples)
    else:
        z = rng.uniform(0.3, 1.5, samples) * np.exp(1j * rng.uniform(0.2, 1.3, samples))
    F = np.asarray(form.evaluate(z))
    original = np.concatenate([F.real, F.imag])
    pulled1 = -np.conj(np.asarray(form.evaluate(-np.conj(z))))
    pulled2 = np.conj(np.asarray(form.evaluate(np.conj(z))))
    s1 = _sign_of_ratio(np.concatenate([pulled1.real, pulled1.imag]), original, form.label)
    s2 = _sign_of_ratio(np.concatenate([pulled2.real, pulled2.imag]), original, form.label)
    return ParityType(s1, s2)


# --- dimensions ---


def dim_harmonic_l2star(t: SurfaceTopology) -> int:
    """Dimension de H¹ ∩ L²*.

    Deux faces : 2g + 2Σ(dⱼ+1) - 2. Une face : dimension anti-invariante
    g + 2Σ(dⱼ+1) - 1 sur le revêtement double (voir dimension_note).
    """
    if t.sided == Sidedness.ONE:
        return t.genus + 2 * t.end_weight - 1
    return 2 * t.genus + 2 * t.end_weight - 2


def dimension_note(t: SurfaceTopology) -> str:
    """Dérivation de la dimension renvoyée (exportée avec le rapport)."""
    S = t.end_weight
    if t.sided == Sidedness.ONE:
        return (
            f"anti-invariant part on the double cover: g + 2Σ(dⱼ+1) - 1 = {t.genus} + 2·{S} - 1; "
            "this grouping is the one for which (dim - 3)/3 equals the one-sided lower bound"
        )
    holo = t.genus + S - 1
    return (
        f"holomorphic forms with poles of order ≤ dⱼ+1: g + Σ(dⱼ+1) - 1 = {holo}; "
        f"real and imaginary parts give 2·{holo} = {2 * holo}"
    )


# --- normes de bout ---


@dataclass(frozen=True)
class EndNormReport:
    """‖dz/zˡ‖² L²* sur un bout de multiplicité d, tronqué à r ≥ epsilon."""

    l: int  # noqa: E741
    d: int
    epsilon: float
    value: float
    growth_rate: float
    converges: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "l": self.l,
            "d": self.d,
            "epsilon": self.epsilon,
            "value": self.value,
            "growth_rate": self.growth_rate,
            "converges": self.converges,
        }


def _end_integral(exponent: float, upper: float) -> float:
    """∫_{log 2}^{upper} e^(exponent·u) u⁻² du (u = log(1/r))."""
    value, _ = quad(lambda u: math.exp(exponent * u) / (u * u), math.log(2.0), upper, limit=400)
    return float(value)


def l2star_end_norm(l: int, d: int, epsilon: float) -> EndNormReport:  # noqa: E741
    """∫_ε^(1/2) r^(2(d-l)+1) (log r)⁻² dr et son taux de croissance en log(1/ε).

    La convergence se lit sur l'exposant : l'intégrale est finie ssi
    2(l-d-1) ≤ 0. Le taux, pente de log(valeur) contre log(1/ε) sur la
    dernière décade, n'est qu'un diagnostic ; il tend vers 2(l-d-1) quand
    l'intégrale diverge et vers 0 sinon.
    """
    if l < 1 or d < 1:
        raise ValueError("l et d doivent être ≥ 1")
    if not 0.0 < epsilon < 0.5:
        raise ValueError("epsilon doit être dans ]0, 1/2[")
    exponent = 2.0 * (l - d - 1)
    top = math.log(1.0 / epsilon)
    start = max(math.log(2.0), top - math.log(10.0))
    cuts = np.linspace(start, top, 4)[1:]
    values = np.array([_end_integral(exponent, u) for u in cuts])
    rate = float(np.polyfit(cuts, np.log(values), 1)[0])
    return EndNormReport(
        l=l,
        d=d,
        epsilon=epsilon,
        value=float(values[-1]),
        growth_rate=rate,
        converges=exponent <= 0.0,
    )


# --- bases holomorphes ---


@dataclass
class HolomorphicBasis:
    """Base des formes holomorphes à pôles d'ordre ≤ dⱼ + 1 et leur Gram L²*.

    Attributes:
        forms: Formes ω_k
        gram: Gram hermitien ∫ w(|X|) ω_k·conj(ω_l)
        real_gram: Gram réel des 2n formes Re ω_k, Re(iω_k)
        condition_number: Conditionnement du Gram réel normalisé
        residue_sums: Somme des résidus de chaque forme
    """

    forms: list[MeromorphicForm]
    gram: np.ndarray
    real_gram: np.ndarray
    condition_number: float
    residue_sums: list[complex]

    @property
    def harmonic_dimension(self) -> int:
        return 2 * len(self.forms)

    def to_dict(self) -> dict[str, Any]:
        return {
            "forms": [f.to_dict() for f in self.forms],
            "holomorphic_dimension": len(self.forms),
            "harmonic_dimension": self.harmonic_dimension,
            "condition_number": self.condition_number,
            "max_residue_sum": max((abs(r) for r in self.residue_sums), default=0.0),
        }


def _fmt(p: complex) -> str:
    return f"{p.real:g}" if p.imag == 0 else f"{p.real:g}{p.imag:+g}i"


def _values(forms: list[MeromorphicForm], z: np.ndarray) -> np.ndarray:
    """Densités des formes aux points z, forme (n, *z.shape)."""
    with np.errstate(all="ignore"):
        return np.stack([np.broadcast_to(np.asarray(f.evaluate(z, strict=False)), z.shape) for f in forms])


def _rational_forms(wd: WeierstrassData, mults: dict[complex, int]) -> list[MeromorphicForm]:
    finite = list(wd.finite_punctures)
    infinity_end = any(is_infinity(p) for p in wd.punctures)
    forms: list[MeromorphicForm] = []
    for p in finite:
        for order in range(2, mults[p] + 2):
            density = RationalMap([1.0], [-p, 1.0]) ** order
            forms.append(MeromorphicForm.from_density(wd, density, f"dz/(z-{_fmt(p)})^{order}"))
    simple = [RationalMap([1.0], [-p, 1.0]) for p in finite]
    if infinity_end:
        for p, density in zip(finite, simple):
            forms.append(MeromorphicForm.from_density(wd, density, f"dz/(z-{_fmt(p)})"))
        for m in range(mults[INFINITY]):
            forms.append(MeromorphicForm.from_density(wd, RationalMap.monomial(m), f"z^{m} dz"))
    else:
        # sans bout à l'infini, seules les différences de pôles simples sont permises
        for p, density in zip(finite[1:], simple[1:]):
            forms.append(
                MeromorphicForm.from_density(wd, density - simple[0], f"dz/(z-{_fmt(p)}) - dz/(z-{_fmt(finite[0])})")
            )
    return forms


def _costa_forms(wd: WeierstrassData) -> list[MeromorphicForm]:
    L = wd.lattice
    e1, _, e3 = L.roots
    wp = EllipticFunction.wp(L)
    wp_prime = EllipticFunction.wp_prime(L)
    densities = [
        (EllipticFunction.constant(L, 1.0), "dz"),
        (wp, "℘ dz"),
        (EllipticFunction.wp_shifted(L, 1), "℘(z-1/2) dz"),
        (EllipticFunction.wp_shifted(L, 3), "℘(z-it/2) dz"),
        (wp_prime / (wp - e1), "℘′/(℘-e1) dz"),
        (wp_prime / (wp - e3), "℘′/(℘-e3) dz"),
    ]
    return [MeromorphicForm.from_density(wd, f, label) for f, label in densities]


def _smoothstep(s: Any) -> Any:
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    return s**3 * (10.0 - 15.0 * s + 6.0 * s * s)


def _panel_nodes(lo: float, hi: float, width: float, order: int = 8) -> tuple[np.ndarray, np.ndarray]:
    panels = max(1, int(math.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, panels + 1)
    x, w = gauss_legendre(order)
    step = np.diff(edges)
    nodes = (edges[:-1, None] + step[:, None] * x[None, :]).ravel()
    weights = (step[:, None] * w[None, :]).ravel()
    return nodes, weights


def _gram_block(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Σ weights · v_k conj(v_l) pour values de forme (n, N)."""
    return (values * weights[None, :]) @ values.conj().T


def _plane_gram(wd: WeierstrassData, forms: list[MeromorphicForm], mults: dict[complex, int]) -> np.ndarray:
    finite = wd.finite_punctures
    if any(abs(p) > 1e-14 for p in finite) or not any(is_infinity(p) for p in wd.punctures):
        raise MeshFailure(f"{wd.name}: L²* quadrature needs punctures within {{0, ∞}} including ∞")
    d_inf = max(mults[INFINITY], 1)
    s_max = min(30.0, 300.0 / d_inf)
    s_min = -s_max if finite else -20.0
    s, ws = _panel_nodes(s_min, s_max, 0.5)
    n_theta = 128
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    X = polar_positions(wd, 0j, 1.0, s, theta)
    weight = l2star_weight(np.linalg.norm(X, axis=-1))  # (n_theta, n_s)
    z = np.exp(s[None, :] + 1j * theta[:, None])
    jac = np.exp(2.0 * s)[None, :] * (2.0 * math.pi / n_theta)
    values = _values(forms, z).reshape(len(forms), -1)
    dens = (weight * jac).ravel()
    gram = _gram_block(values, dens * np.broadcast_to(ws, z.shape).ravel())

    # queue en 1/u² : ∫_S^∞ C u⁻² du = C/S, C lu sur le dernier anneau
    for index, extent in ((-1, s_max), (0, abs(s_min))):
        if index == 0 and not finite:
            continue
        ring = (dens.reshape(z.shape))[:, index]
        ring_values = values.reshape(len(forms), *z.shape)[:, :, index]
        gram += extent * _gram_block(ring_values, ring)
    return gram


def _periodic_gap(z: np.ndarray, p: complex, t: float) -> np.ndarray:
    gap = z - p
    return (np.mod(gap.real + 0.5, 1.0) - 0.5) + 1j * (np.mod(gap.imag + 0.5 * t, t) - 0.5 * t)


def _torus_gram(wd: WeierstrassData, forms: list[MeromorphicForm], resolution: int = 128) -> np.ndarray:
    t = wd.lattice.t
    rho = 0.2 * min(0.5, 0.5 * t)
    nx = 2 * (resolution // 2)
    ny = 2 * max(2, int(round(resolution * t)) // 2)
    xs = (np.arange(nx) + 0.5) / nx
    ys = t * (np.arange(ny) + 0.5) / ny
    fold_x = np.where(np.arange(nx) < nx // 2, np.arange(nx), nx - 1 - np.arange(nx))
    fold_y = np.where(np.arange(ny) < ny // 2, np.arange(ny), ny - 1 - np.arange(ny))
    X_quarter = quarter_positions(wd, xs[: nx // 2], ys[: ny // 2])
    weight = l2star_weight(np.linalg.norm(X_quarter, axis=-1))[fold_x][:, fold_y]

    z = xs[:, None] + 1j * ys[None, :]
    cut = np.zeros(z.shape)
    for p in wd.finite_punctures:
        cut += _smoothstep(2.0 - 2.0 * np.abs(_periodic_gap(z, p, t)) / rho)
    outer = np.clip(1.0 - cut, 0.0, 1.0)
    live = outer > 0
    values = _values(forms, z[live])
    dens = (weight * outer)[live] * (t / (nx * ny))
    gram = _gram_block(values, dens)

    s, ws = _panel_nodes(-25.0, 0.0, 0.5)
    n_theta = 64
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    r = rho * np.exp(s)
    chi = _smoothstep(2.0 - 2.0 * r / rho)
    for p in wd.finite_punctures:
        X = polar_positions(wd, p, rho, s, theta)
        w_polar = l2star_weight(np.linalg.norm(X, axis=-1))
        zp = p + r[None, :] * np.exp(1j * theta[:, None])
        vals = _values(forms, zp)
        jac = (r * r * chi * ws)[None, :] * (2.0 * math.pi / n_theta)
        gram += _gram_block(vals.reshape(len(forms), -1), (w_polar * jac).ravel())
        ring = (w_polar * (r * r * chi)[None, :] * (2.0 * math.pi / n_theta))[:, 0]
        gram += (25.0 - math.log(rho)) * _gram_block(vals[:, :, 0], ring)
    return gram


def _real_gram(gram: np.ndarray) -> np.ndarray:
    """Gram des formes Re(c·ω_k), c ∈ {1, i} : ⟨Re(aω), Re(bη)⟩ = Re(a b̄ ⟨ω, η⟩)."""
    n = gram.shape[0]
    coeffs = (1.0, 1j)
    out = np.empty((2 * n, 2 * n))
    for p, a in enumerate(coeffs):
        for q, b in enumerate(coeffs):
            out[p::2, q::2] = np.real(a * np.conj(b) * gram)
    return 0.5 * (out + out.T)


def holomorphic_basis(
    wd: WeierstrassData, t: SurfaceTopology | None = None, max_condition: float = 1e10
) -> HolomorphicBasis:
    """Base des formes holomorphes à pôles d'ordre ≤ dⱼ + 1, certifiée par son Gram L²*.

    Cardinal g + Σ(dⱼ+1) - 1 ; les parties réelles et imaginaires engendrent
    H¹ ∩ L²*.

    Raises:
        InconsistentMultiplicity: Si t ne correspond pas aux multiplicités lues
        DegenerateBasis: Si le Gram normalisé est singulier
    """
    mults = {p: pole_multiplicity(wd, p) for p in wd.punctures}
    genus = 1 if wd.chart == ChartKind.TORUS else 0
    observed = SurfaceTopology.of(genus, list(mults.values()))
    if t is not None and (t.genus, t.multiplicities) != (observed.genus, observed.multiplicities):
        raise InconsistentMultiplicity(f"{t.label()} does not match {wd.name} data {observed.label()}")

    if wd.chart == ChartKind.TORUS:
        forms = _costa_forms(wd)
        gram = _torus_gram(wd, forms)
    else:
        forms = _rational_forms(wd, mults)
        gram = _plane_gram(wd, forms, mults)

    expected = observed.genus + observed.end_weight - 1
    if len(forms) != expected:
        raise DegenerateBasis(f"{len(forms)} forms built, expected {expected}")
    real = _real_gram(gram)
    diag = np.sqrt(np.diag(real))
    normalized = real / np.outer(diag, diag)
    eigs = np.linalg.eigvalsh(normalized)
    condition = float(eigs[-1] / eigs[0]) if eigs[0] > 0 else float("inf")
    if not condition < max_condition:
        raise DegenerateBasis(f"Singular L²* Gram for {wd.name} (cond={condition:.3e})", condition)
    sums = [residue_sum(wd, f) for f in forms]
    logger.info(f"Holomorphic basis for {wd.name}: {len(forms)} forms, Gram condition {condition:.3e}")
    return HolomorphicBasis(
        forms=forms, gram=gram, real_gram=real, condition_number=condition, residue_sums=sums
    )


# --- X_ω ---


def x_omega(wd: WeierstrassData, omega: MeromorphicForm, z: Any) -> np.ndarray:
    """X_ω = (⟨Re ω, dx¹⟩, ⟨Re ω, dx²⟩, ⟨Re ω, dx³⟩) = λ⁻² Re(f·conj φᵢ).

    Raises:
        PoleHit: Si z est une puncture
    """
    f = np.asarray(omega.evaluate(z, strict=True))
    lam2 = np.asarray(conformal_factor(wd, z, strict=True)) ** 2
    phi = phi_array(wd, z, strict=True)
    return np.real(f[..., None] * np.conj(phi)) / lam2[..., None]


# --- coupures logarithmiques ---


XI_PRIME_SUP = 30.0 / 16.0
XI_SECOND_SUP = 10.0 / math.sqrt(3.0)


@dataclass(frozen=True)
class CutoffFamily:
    """φ^α_R = ξ(ψ^α_R), ψ^α_R(x) = 1 + 1/(α-1) - log|x|/((α-1) log R).

    ξ(s) = 6s⁵ - 15s⁴ + 10s³ sur [0, 1] (0 avant, 1 après) : sup ξ′ = 15/8,
    sup |ξ″| = 10/√3.
    """

    alpha: float
    R: float

    def __post_init__(self) -> None:
        if not self.alpha > 1.0 or not self.R > 1.0:
            raise ValueError("alpha et R doivent être > 1")

    @property
    def scale(self) -> float:
        """(α - 1) log R."""
        return (self.alpha - 1.0) * math.log(self.R)

    @property
    def gradient_constant(self) -> float:
        return XI_PRIME_SUP

    @property
    def laplacian_constant(self) -> float:
        return max(XI_SECOND_SUP, 2.0 * XI_PRIME_SUP)

    def psi(self, x_norm: Any) -> Any:
        return 1.0 + 1.0 / (self.alpha - 1.0) - np.log(x_norm) / self.scale


@dataclass(frozen=True)
class CutoffSample:
    """Valeur de φ et témoins des estimations du gradient et du laplacien."""

    phi: float
    grad_witness: float
    lap_witness: float


def _xi_derivatives(s: float) -> tuple[float, float, float]:
    if s <= 0.0:
        return 0.0, 0.0, 0.0
    if s >= 1.0:
        return 1.0, 0.0, 0.0
    value = float(_smoothstep(s))
    first = 30.0 * s * s * (1.0 - s) ** 2
    second = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
    return value, first, second


def cutoff_eval(c: CutoffFamily, x_norm: float) -> CutoffSample:
    """φ^α_R(x) et témoins au pire cas |∇|x|| ∈ {0, 1}.

    Sur une surface minimale |x|Δ|x| = 2 - |∇|x||², d'où
    |x|² Δψ = -2(1 - |∇|x||²)/((α-1) log R). Les témoins sont
    |x|(α-1)(log R)|∇φ| ≤ sup ξ′ et |x|²|Δφ| / (L⁻² + L⁻¹) ≤ max(sup|ξ″|, 2 sup ξ′),
    avec L = (α-1) log R.
    """
    if not x_norm > 0:
        raise ValueError("x_norm doit être > 0")
    value, first, second = _xi_derivatives(float(c.psi(x_norm)))
    L = c.scale
    grad = abs(first)
    bound = 1.0 / L**2 + 1.0 / L
    # linéaire en |∇|x||², extrêmes en 0 et 1
    lap = max(abs(second) / L**2, 2.0 * abs(first) / L) / bound
    return CutoffSample(phi=value, grad_witness=grad, lap_witness=lap)


def cutoff_witness_sup(c: CutoffFamily, samples: int = 2001) -> tuple[float, float]:
    """Sup des deux témoins sur un échantillon log-régulier de [R, R^α]."""
    logs = np.linspace(math.log(c.R), c.alpha * math.log(c.R), samples)
    grads, laps = zip(*((s.grad_witness, s.lap_witness) for s in (cutoff_eval(c, math.exp(u)) for u in logs)))
    return float(max(grads)), float(max(laps))


@dataclass(frozen=True)
class DecayOrder:
    """Exposant p de |Δψ| ≲ |x|^(-p)/((α-1) log R), p = 2 + 2/k.

    k_min donne l'estimation la plus forte, k_max la plus prudente ;
    k_max est retenu.
    """

    k_min: int
    k_max: int

    @property
    def exponent(self) -> float:
        return 2.0 + 2.0 / self.k_max

    @property
    def exponent_min_multiplicity(self) -> float:
        return 2.0 + 2.0 / self.k_min

    def to_dict(self) -> dict[str, Any]:
        return {
            "k_min": self.k_min,
            "k_max": self.k_max,
            "exponent": self.exponent,
            "exponent_min_multiplicity": self.exponent_min_multiplicity,
        }


def laplacian_decay_order(t: SurfaceTopology) -> DecayOrder:
    return DecayOrder(k_min=min(t.multiplicities), k_max=max(t.multiplicities))


def sectors_table(forms: Iterable[ModelEndForm]) -> list[tuple[str, str]]:
    """Table (forme, type) des parités des formes modèles."""
    return [(f.value, parity_type_of(f).label) for f in forms]
