"""Configuration d'un run de la CLI."""

from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class OutputFormat(str, Enum):
    """Format de sortie."""

    JSON = "json"
    CSV = "csv"


class Command(str, Enum):
    """Sous-commandes de la CLI."""

    SURFACE = "surface"
    BOUND = "bound"
    SANDWICH = "sandwich"
    ENUMERATE = "enumerate"
    INDEX = "index"
    FORMS = "forms"
    COSTA_AUDIT = "costa-audit"


class SurfaceSpec(BaseModel):
    """Surface du catalogue (nom + paramètres) ou données rationnelles explicites."""

    model_config = ConfigDict(extra="forbid")

    name: Annotated[str, Field(description="plane, catenoid, enneper, costa ou rational")]
    k: Annotated[Optional[int], Field(None, ge=1, description="Ordre d'Enneper")]
    t: Annotated[Optional[float], Field(None, gt=0, description="Rapport des périodes (Costa)")]
    gauss_numerator: Annotated[
        Optional[list[Any]], Field(None, description="Coefficients [re, im] de g, degré croissant")
    ]
    gauss_denominator: Annotated[Optional[list[Any]], Field(None, description="Dénominateur de g")]
    dh_numerator: Annotated[Optional[list[Any]], Field(None, description="Numérateur de dh/dz")]
    dh_denominator: Annotated[Optional[list[Any]], Field(None, description="Dénominateur de dh/dz")]
    punctures: Annotated[
        Optional[list[Any]], Field(None, description="Punctures [re, im] ou \"inf\"")
    ]

    def params(self) -> dict[str, Any]:
        """Paramètres transmis au constructeur du catalogue."""
        return self.model_dump(exclude={"name"}, exclude_none=True)


class RunConfig(BaseModel):
    """Configuration validée d'une commande (fichier key = value puis options)."""

    model_config = ConfigDict(extra="forbid")

    command: Annotated[Command, Field(description="Sous-commande")]
    surface: Annotated[Optional[SurfaceSpec], Field(None, description="Surface étudiée")]

    # topologie
    genus: Annotated[int, Field(0, ge=0, description="Genre g")]
    multiplicities: Annotated[
        list[int], Field(default_factory=list, description="Multiplicités dⱼ des bouts")
    ]
    one_sided: Annotated[bool, Field(False, description="Surface unilatère")]
    budget: Annotated[int, Field(3, ge=0, description="Budget d'indice de l'énumération")]
    embedded: Annotated[bool, Field(False, description="Bouts plongés (dⱼ = 1)")]
    nonflat: Annotated[bool, Field(False, description="Impose Σ(dⱼ+1) ≥ 4")]
    min_ends: Annotated[int, Field(1, ge=1, description="Nombre minimal de bouts")]
    min_genus: Annotated[int, Field(0, ge=0, description="Genre minimal")]
    literature: Annotated[bool, Field(False, description="Applique le fichier de littérature")]

    # spectral
    schedule: Annotated[
        Optional[list[float]], Field(None, description="Rayons R du calendrier d'exhaustion")
    ]
    h: Annotated[Optional[float], Field(None, gt=0, description="Pas relatif du maillage")]
    adaptive: Annotated[bool, Field(True, description="Raffinement adaptatif de h")]
    k_eigs: Annotated[int, Field(3, ge=0, description="Valeurs propres les plus basses par étape")]
    tol: Annotated[Optional[float], Field(None, gt=0, description="Tolérance numérique")]

    # sorties
    format: Annotated[OutputFormat, Field(OutputFormat.JSON, description="Format de sortie")]
    out: Annotated[Optional[Path], Field(None, description="Fichier de sortie (stdout sinon)")]
    dump_mesh: Annotated[Optional[Path], Field(None, description="Export du dernier maillage")]
    dump_eigs: Annotated[Optional[Path], Field(None, description="Export CSV des fonctions propres")]

    @field_validator("schedule")
    @classmethod
    def _increasing(cls, value: Optional[list[float]]) -> Optional[list[float]]:
        if value is not None and (not value or any(b <= a for a, b in zip(value, value[1:]))):
            raise ValueError("schedule must be a nonempty increasing list of radii")
        return value

    @field_validator("multiplicities")
    @classmethod
    def _positive(cls, value: list[int]) -> list[int]:
        if any(d < 1 for d in value):
            raise ValueError("multiplicities must be >= 1")
        return value
