"""Schémas pour le catalogue de surfaces."""

from typing import Annotated, Optional

from pydantic import BaseModel, Field


class CatalogItem(BaseModel):
    """Entrée du catalogue."""

    name: Annotated[str, Field(description="Nom de la surface")]
    description: Annotated[str, Field(description="Données de Weierstrass")]
    parameters: Annotated[list[str], Field(description="Paramètres acceptés")]
    known_index: Annotated[Optional[str], Field(None, description="Indice connu")]
    notes: Annotated[str, Field("", description="Remarques")]


class EndsOut(BaseModel):
    """Analyse des bouts d'une surface du catalogue."""

    name: Annotated[str, Field(description="Nom de la surface")]
    topology: Annotated[dict, Field(description="Topologie lue sur les données")]
    ends: Annotated[list[dict], Field(description="Données de chaque bout")]
