"""Router du catalogue de surfaces."""

from fastapi import APIRouter, HTTPException, Query

from indexlab.logging_conf import get_logger
from indexlab.schemas.surfaces import CatalogItem, EndsOut
from indexlab.services.catalog import CATALOG, build
from indexlab.services.surface import end_analysis, surface_topology

logger = get_logger(__name__)

router = APIRouter(prefix="/v1/surfaces", tags=["surfaces"])


@router.get("", response_model=list[CatalogItem])
async def list_surfaces() -> list[CatalogItem]:
    """Surfaces disponibles et indices connus."""
    return [
        CatalogItem(
            name=entry.name,
            description=entry.description,
            parameters=list(entry.parameters),
            known_index=entry.known_index,
            notes=entry.notes,
        )
        for entry in CATALOG.values()
    ]


@router.get("/{name}/ends", response_model=EndsOut)
async def get_ends(
    name: str,
    k: int | None = Query(None, ge=1, le=6, description="Ordre d'Enneper"),
    t: float | None = Query(None, gt=0, description="Rapport des périodes (Costa)"),
) -> EndsOut:
    """Analyse des bouts : multiplicités, coefficient dominant, normale limite."""
    if name not in CATALOG:
        raise HTTPException(status_code=404, detail=f"Surface inconnue : {name}")
    wd = build(name, k=k, t=t)
    ends = [end_analysis(wd, p).to_dict() for p in wd.punctures]
    logger.info(f"API ends: {name}, {len(ends)} ends")
    return EndsOut(name=wd.name, topology=surface_topology(wd).to_dict(), ends=ends)
