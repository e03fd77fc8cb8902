"""Schémas pour les bornes et l'énumération de topologies."""

from typing import Annotated, Optional

from pydantic import BaseModel, ConfigDict, Field

from indexlab.services.topology import Sidedness, SurfaceTopology


class TopologyIn(BaseModel):
    """Topologie (g, r, dⱼ, bilatéralité)."""

    genus: Annotated[int, Field(ge=0, description="Genre (du revêtement double si unilatère)")]
    multiplicities: Annotated[list[int], Field(min_length=1, description="Multiplicités dⱼ ≥ 1")]
    sided: Annotated[Sidedness, Field(Sidedness.TWO, description="two ou one")]

    model_config = ConfigDict(
        json_schema_extra={"example": {"genus": 0, "multiplicities": [1, 1], "sided": "two"}}
    )

    def to_topology(self) -> SurfaceTopology:
        return SurfaceTopology.of(self.genus, self.multiplicities, self.sided)


class BoundOut(BaseModel):
    """Bornes exactes ("p/q") et leurs valeurs flottantes."""

    topology: Annotated[dict, Field(description="Topologie normalisée")]
    lower: Annotated[str, Field(description="Borne inférieure exacte")]
    lower_float: Annotated[float, Field(description="Borne inférieure en flottant")]
    lower_ceil: Annotated[int, Field(description="Plafond entier de la borne inférieure")]
    upper: Annotated[Optional[str], Field(None, description="Borne d'Ejiri-Micallef (bilatère)")]
    formula_used: Annotated[str, Field(description="Formule de la borne inférieure")]
    upper_formula: Annotated[Optional[str], Field(None, description="Formule de la borne supérieure")]


class SandwichOut(BaseModel):
    """Encadrement de l'indice par la courbure totale."""

    topology: Annotated[dict, Field(description="Topologie normalisée")]
    lower: Annotated[str, Field(description="Minorant exact")]
    upper: Annotated[str, Field(description="Majorant exact")]
    lower_float: Annotated[float, Field(description="Minorant flottant")]
    upper_float: Annotated[float, Field(description="Majorant flottant")]


class EnumerateRequest(BaseModel):
    """Requête d'énumération des topologies compatibles avec un budget d'indice."""

    budget: Annotated[int, Field(ge=0, le=20, description="Budget d'indice")]
    sided: Annotated[Sidedness, Field(Sidedness.TWO, description="two ou one")]
    embedded: Annotated[bool, Field(False, description="Bouts plongés")]
    nonflat: Annotated[bool, Field(False, description="Σ(dⱼ+1) ≥ 4")]
    min_ends: Annotated[int, Field(1, ge=1, description="Nombre minimal de bouts")]
    min_genus: Annotated[int, Field(0, ge=0, description="Genre minimal")]
    literature: Annotated[bool, Field(False, description="Applique le fichier de littérature")]

    model_config = ConfigDict(
        json_schema_extra={
            "example": {"budget": 3, "embedded": True, "min_ends": 3, "min_genus": 1}
        }
    )


class EnumerateOut(BaseModel):
    """Topologies survivantes et analyse de cas."""

    budget: Annotated[int, Field(description="Budget d'indice")]
    sided: Annotated[str, Field(description="Bilatéralité")]
    topologies: Annotated[list[dict], Field(description="Topologies survivantes")]
    case_split: Annotated[list[dict], Field(description="Analyse de cas par genre")]
