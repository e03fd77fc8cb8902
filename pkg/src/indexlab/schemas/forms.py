"""Schémas pour l'espace L²* et la décomposition par parité."""

from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field


class DimensionOut(BaseModel):
    """Dimension de H¹ ∩ L²* et sa dérivation."""

    topology: Annotated[dict, Field(description="Topologie normalisée")]
    dimension: Annotated[int, Field(description="dim H¹ ∩ L²*")]
    note: Annotated[str, Field(description="Dérivation de la formule")]
    decay: Annotated[dict, Field(description="Exposants de décroissance du laplacien de coupure")]


class FeasibilityRequest(BaseModel):
    """Comptes par secteur (++, +-, -+, --)."""

    w: Annotated[list[int], Field(min_length=4, max_length=4, description="(w++, w+-, w-+, w--)")]
    dims: Annotated[
        list[int],
        Field(default=[2, 3, 3, 1], min_length=4, max_length=4, description="dim H par secteur"),
    ]

    model_config = ConfigDict(json_schema_extra={"example": {"w": [2, 0, 0, 1]}})


class FeasibilityOut(BaseModel):
    """Inégalités violées et rejeu de l'argument pour un indice 3."""

    w: Annotated[list[int], Field(description="Comptes évalués")]
    violated: Annotated[list[str], Field(description="Inégalités violées")]
    feasible: Annotated[bool, Field(description="Aucune inégalité violée")]
    replay: Annotated[dict, Field(description="Rejeu de l'argument par l'absurde")]
