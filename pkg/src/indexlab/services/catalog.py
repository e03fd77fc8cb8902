"""Catalogue de surfaces : plan, caténoïde, Enneper d'ordre k, famille de Costa."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from indexlab.exceptions import PeriodViolation
from indexlab.logging_conf import get_logger
from indexlab.services.complexfn import INFINITY, RationalMap, is_infinity
from indexlab.services.elliptic import EllipticFunction, RectLattice
from indexlab.services.surface import ChartKind, WeierstrassData

logger = get_logger(__name__)


@dataclass(frozen=True)
class CatalogEntry:
    """Entrée de catalogue : constructeur, indice connu, remarques."""

    name: str
    description: str
    parameters: tuple[str, ...]
    known_index: str | None
    notes: str = ""


CATALOG: dict[str, CatalogEntry] = {
    "plane": CatalogEntry("plane", "Plan, g = 1, dh = dz", (), "0"),
    "catenoid": CatalogEntry("catenoid", "Caténoïde, g = z, dh = dz/z", (), "1"),
    "enneper": CatalogEntry(
        "enneper",
        "Enneper d'ordre k, g = z^k, dh = z^k dz",
        ("k",),
        "2k-1",
        notes=(
            "La borne inférieure calculée avec d = 2k+1 vaut (4k-1)/3 ; "
            "la forme close (2k+1)/3 parfois citée ne coïncide qu'en k = 1."
        ),
    ),
    "costa": CatalogEntry(
        "costa",
        "Famille de Costa sur C/L(it), g = A/℘′, dh = A(℘ - e2)/℘′ dz",
        ("t",),
        "5 (t = 1)",
        notes="Pour t ≠ 1 la période verticale de φ2 ne s'annule pas : résultats exploratoires.",
    ),
}


def plane() -> WeierstrassData:
    """Plan : X(x + iy) = (0, -y, x)."""
    return WeierstrassData(
        name="plane",
        gauss_map=RationalMap.constant(1.0),
        dh_density=RationalMap.constant(1.0),
        chart=ChartKind.PLANE,
        punctures=(INFINITY,),
        basepoint=0j,
    )


def catenoid() -> WeierstrassData:
    """Caténoïde centrée : |z| = 1 est envoyé sur le cercle unité du plan x₃ = 0."""
    return WeierstrassData(
        name="catenoid",
        gauss_map=RationalMap([0.0, 1.0], [1.0]),
        dh_density=RationalMap([1.0], [0.0, 1.0]),
        chart=ChartKind.PLANE,
        punctures=(0j, INFINITY),
        basepoint=1 + 0j,
        base_value=(-1.0, 0.0, 0.0),
    )


def enneper(k: int = 1) -> WeierstrassData:
    """Enneper d'ordre k (un bout de multiplicité 2k + 1 à l'infini)."""
    if k < 1:
        raise ValueError(f"k doit être ≥ 1 (reçu {k})")
    zk = RationalMap.monomial(k)
    return WeierstrassData(
        name="enneper",
        gauss_map=zk,
        dh_density=zk,
        chart=ChartKind.PLANE,
        punctures=(INFINITY,),
        basepoint=0j,
        parameters=(("k", float(k)),),
    )


def _horizontal_mean(f: EllipticFunction, height: float, samples: int = 512) -> complex:
    """∮ f dz sur le cycle horizontal Im z = height (règle des trapèzes, spectrale)."""
    x = np.arange(samples) / samples
    return complex(np.mean(np.asarray(f(x + 1j * height))))


def _vertical_mean(f: EllipticFunction, abscissa: float, t: float, samples: int = 512) -> complex:
    """∮ f dz sur le cycle vertical Re z = abscissa."""
    y = t * np.arange(samples) / samples
    return complex(1j * t * np.mean(np.asarray(f(abscissa + 1j * y))))


def costa(t: float = 1.0) -> WeierstrassData:
    """Surface de Costa (et sa déformation rectangulaire) sur C/L(it).

    L'échelle A annule la période horizontale de φ1. Cette période est
    affine en A², d'où A² = P/Q avec P = Re∮(℘ - e2) et Q = Re∮(℘ - e2)/℘′².
    La période verticale résiduelle de φ2 est conservée dans period_defect.

    Raises:
        PeriodViolation: Si aucune échelle réelle n'annule la période
    """
    lattice = RectLattice(t)
    e1, e2, e3 = lattice.roots
    wp = EllipticFunction.wp(lattice)
    shifted = wp - e2
    inv_wp_prime = EllipticFunction.wp_prime(lattice).reciprocal()
    ratio = shifted * inv_wp_prime * inv_wp_prime

    height = 0.25 * t
    p_period = _horizontal_mean(shifted, height).real
    q_period = _horizontal_mean(ratio, height).real
    if not p_period / q_period > 0:
        raise PeriodViolation(f"No real Costa scale for t={t} (P={p_period}, Q={q_period})")
    scale = math.sqrt(p_period / q_period)

    gauss = scale * inv_wp_prime
    dh = scale * shifted * inv_wp_prime
    q_minus = dh / gauss
    q_plus = gauss * dh
    vertical = _vertical_mean(0.5j * (q_minus + q_plus), 0.25, t)
    defect = abs(vertical.real)
    logger.info(f"Costa t={t}: A={scale:.10f}, e=({e1:.6f}, {e2:.6f}, {e3:.6f}), defect={defect:.2e}")
    return WeierstrassData(
        name="costa",
        gauss_map=gauss,
        dh_density=dh,
        chart=ChartKind.TORUS,
        punctures=(0j, 0.5 + 0j, complex(0.0, 0.5 * t)),
        basepoint=complex(0.5, 0.5 * t),
        lattice=lattice,
        parameters=(("t", float(t)), ("A", scale)),
        period_defect=defect,
    )


def _coefficients(raw: Any) -> list[complex]:
    return [complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c) for c in raw]


def rational(
    gauss_numerator: Any,
    dh_numerator: Any,
    gauss_denominator: Any = ((1.0, 0.0),),
    dh_denominator: Any = ((1.0, 0.0),),
    punctures: Any = None,
    basepoint: complex | None = None,
    base_value: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> WeierstrassData:
    """Données rationnelles explicites (coefficients [re, im] en degré croissant).

    Sans liste de punctures, elles sont déduites des pôles des φ (et de
    l'infini si l'une des densités y a un pôle d'ordre ≥ 2).
    """
    gauss = RationalMap(_coefficients(gauss_numerator), _coefficients(gauss_denominator))
    dh = RationalMap(_coefficients(dh_numerator), _coefficients(dh_denominator))
    draft = WeierstrassData("rational", gauss, dh, ChartKind.PLANE, (INFINITY,), 0j)
    if punctures is None:
        found: list[complex] = []
        for phi in draft.phi:
            if phi.is_zero:
                continue
            for root in phi.poles():
                if all(abs(root - q) > 1e-8 for q in found):
                    found.append(complex(root))
        pullback = RationalMap([-1.0], [0.0, 0.0, 1.0])
        if any(not phi.is_zero and (phi.invert_chart() * pullback).order_at(0j) <= -2 for phi in draft.phi):
            found.append(INFINITY)
        punctures = found
    else:
        punctures = [
            INFINITY if (isinstance(p, str) and p.lower() in {"inf", "infinity"}) else
            complex(p[0], p[1]) if isinstance(p, (list, tuple)) else complex(p)
            for p in punctures
        ]
    if basepoint is None:
        candidates = [0j, 1 + 0j, 0.5 + 0.5j, 2 + 0j]
        basepoint = next(c for c in candidates if all(is_infinity(p) or abs(c - p) > 0.1 for p in punctures))
    return WeierstrassData(
        name="rational",
        gauss_map=gauss,
        dh_density=dh,
        chart=ChartKind.PLANE,
        punctures=tuple(punctures),
        basepoint=complex(basepoint),
        base_value=tuple(float(v) for v in base_value),
    )


def build(name: str, **params: Any) -> WeierstrassData:
    """Construit une surface du catalogue par son nom."""
    if name == "plane":
        return plane()
    if name == "catenoid":
        return catenoid()
    if name == "enneper":
        return enneper(int(params.get("k") or 1))
    if name == "costa":
        return costa(float(params.get("t") or 1.0))
    if name == "rational":
        return rational(**{k: v for k, v in params.items() if v is not None and k not in {"k", "t"}})
    raise ValueError(f"Surface inconnue : {name} (catalogue : {', '.join(CATALOG)}, rational)")
