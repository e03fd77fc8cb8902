"""Arithmétique exacte sur la topologie : Jorge-Meeks, bornes d'indice, encadrement.

Aucun flottant dans ce module : toutes les valeurs sont des ``Fraction``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

from indexlab.exceptions import PlanarInput


class Sidedness(str, Enum):
    """Surface bilatère (orientable) ou unilatère (genre du revêtement double)."""

    TWO = "two"
    ONE = "one"


class FormulaTag(str, Enum):
    """Formule utilisée pour une borne."""

    TWO_SIDED = "two_sided_multiplicities"
    EMBEDDED_ENDS = "two_sided_embedded_ends"
    ONE_SIDED = "one_sided_double_cover"
    EJIRI_MICALLEF = "ejiri_micallef"


@dataclass(frozen=True, order=True)
class SurfaceTopology:
    """(genre, nombre de bouts, multiplicités, bilatéralité).

    Les multiplicités sont rangées par ordre décroissant ; pour une surface
    unilatère, genus est le genre du revêtement double orientable.
    """

    genus: int
    ends: int
    multiplicities: tuple[int, ...]
    sided: Sidedness = Sidedness.TWO

    def __post_init__(self) -> None:
        if self.genus < 0:
            raise ValueError("le genre doit être ≥ 0")
        if self.ends < 1:
            raise ValueError("il faut au moins un bout")
        if len(self.multiplicities) != self.ends:
            raise ValueError(
                f"{len(self.multiplicities)} multiplicités pour {self.ends} bouts"
            )
        if any(d < 1 for d in self.multiplicities):
            raise ValueError("toutes les multiplicités doivent être ≥ 1")
        object.__setattr__(
            self, "multiplicities", tuple(sorted((int(d) for d in self.multiplicities), reverse=True))
        )
        object.__setattr__(self, "sided", Sidedness(self.sided))

    @classmethod
    def of(cls, genus: int, multiplicities: Any, sided: str | Sidedness = Sidedness.TWO) -> SurfaceTopology:
        mults = tuple(int(d) for d in multiplicities)
        return cls(genus=int(genus), ends=len(mults), multiplicities=mults, sided=Sidedness(sided))

    @property
    def end_weight(self) -> int:
        """Σ(dⱼ + 1)."""
        return sum(d + 1 for d in self.multiplicities)

    @property
    def embedded_ends(self) -> bool:
        return all(d == 1 for d in self.multiplicities)

    def label(self) -> str:
        mults = ",".join(str(d) for d in self.multiplicities)
        return f"(g={self.genus}, r={self.ends}, d=({mults}), {self.sided.value}-sided)"

    def to_dict(self) -> dict[str, Any]:
        return {
            "genus": self.genus,
            "ends": self.ends,
            "multiplicities": list(self.multiplicities),
            "sided": self.sided.value,
        }


@dataclass(frozen=True)
class BoundReport:
    """Bornes d'indice exactes."""

    lower: Fraction
    lower_ceil: int
    upper: Fraction | None
    formula_used: FormulaTag
    upper_formula: FormulaTag | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "lower": str(self.lower),
            "lower_float": float(self.lower),
            "lower_ceil": self.lower_ceil,
            "upper": None if self.upper is None else str(self.upper),
            "formula_used": self.formula_used.value,
            "upper_formula": None if self.upper_formula is None else self.upper_formula.value,
        }


def jorge_meeks_degree(t: SurfaceTopology) -> Fraction:
    """Degré de Jorge-Meeks.

    Bilatère : g - 1 + (r + Σdⱼ)/2 = -(1/4π)∫κ.
    Unilatère : g - 1 + (r + Σdⱼ) = -(1/2π)∫κ.
    """
    total = t.ends + sum(t.multiplicities)
    if t.sided == Sidedness.TWO:
        return Fraction(t.genus - 1) + Fraction(total, 2)
    return Fraction(t.genus - 1 + total)


def total_curvature_over_pi(t: SurfaceTopology) -> Fraction:
    """∫κ/π déduit du degré de Jorge-Meeks (négatif ou nul)."""
    degree = jorge_meeks_degree(t)
    return -4 * degree if t.sided == Sidedness.TWO else -2 * degree


def index_lower_bound(t: SurfaceTopology) -> Fraction:
    """Borne inférieure d'indice.

    Bilatère : (2g + 2Σ(dⱼ+1) - 5)/3, qui vaut (2g + 4r - 5)/3 à bouts plongés.
    Unilatère : (g + 2Σ(dⱼ+1) - 4)/3.
    """
    if t.sided == Sidedness.ONE:
        return Fraction(t.genus + 2 * t.end_weight - 4, 3)
    if t.embedded_ends:
        return Fraction(2 * t.genus + 4 * t.ends - 5, 3)
    return Fraction(2 * t.genus + 2 * t.end_weight - 5, 3)


def lower_bound_formula(t: SurfaceTopology) -> FormulaTag:
    if t.sided == Sidedness.ONE:
        return FormulaTag.ONE_SIDED
    return FormulaTag.EMBEDDED_ENDS if t.embedded_ends else FormulaTag.TWO_SIDED


def index_upper_bound(t: SurfaceTopology, total_curvature: Fraction | None = None) -> Fraction:
    """Borne d'Ejiri-Micallef : -(1/π)∫κ + 2g - 3 (bilatère).

    Args:
        t: Topologie bilatère
        total_curvature: ∫κ/π ; déduit de Jorge-Meeks si absent
    """
    if t.sided != Sidedness.TWO:
        raise ValueError("la borne d'Ejiri-Micallef ne s'applique qu'aux surfaces bilatères")
    curvature = total_curvature_over_pi(t) if total_curvature is None else Fraction(total_curvature)
    return -curvature + 2 * t.genus - 3


def bound_report(t: SurfaceTopology, total_curvature: Fraction | None = None) -> BoundReport:
    lower = index_lower_bound(t)
    upper = None
    upper_formula = None
    if t.sided == Sidedness.TWO:
        upper = index_upper_bound(t, total_curvature)
        upper_formula = FormulaTag.EJIRI_MICALLEF
    return BoundReport(
        lower=lower,
        lower_ceil=math.ceil(lower),
        upper=upper,
        formula_used=lower_bound_formula(t),
        upper_formula=upper_formula,
    )


def sandwich_from_curvature(
    negative_curvature_over_pi: Fraction, sided: Sidedness = Sidedness.TWO
) -> tuple[Fraction, Fraction]:
    """Encadrement à partir de ∫(-κ)/π.

    Bilatère : 1/3 + ∫(-κ)/(6π) ≤ Index ≤ -3 + 3∫(-κ)/(2π).
    Unilatère : même borne inférieure, Index ≤ -6 + 3∫(-κ)/π.
    """
    c = Fraction(negative_curvature_over_pi)
    if c <= 0:
        raise PlanarInput("courbure totale nulle : surface plane")
    lower = Fraction(1, 3) + c / 6
    if Sidedness(sided) == Sidedness.TWO:
        return lower, -3 + Fraction(3, 2) * c
    return lower, -6 + 3 * c


def sandwich(t: SurfaceTopology) -> tuple[Fraction, Fraction]:
    """Encadrement de l'indice via la courbure totale de Jorge-Meeks.

    Raises:
        PlanarInput: Si le degré de Jorge-Meeks est nul
    """
    if jorge_meeks_degree(t) == 0:
        raise PlanarInput(f"{t.label()} est plane (degré de Jorge-Meeks nul)")
    return sandwich_from_curvature(-total_curvature_over_pi(t), t.sided)


def known_index_check(t: SurfaceTopology, known_index: int) -> dict[str, Any]:
    """Vérifie qu'un indice connu est dans l'encadrement et au-dessus de la borne inférieure."""
    lower, upper = sandwich(t)
    bound = index_lower_bound(t)
    return {
        "topology": t.to_dict(),
        "known_index": known_index,
        "sandwich": [str(lower), str(upper)],
        "lower_bound": str(bound),
        "contained": lower <= known_index <= upper,
        "above_lower_bound": known_index >= bound,
    }
