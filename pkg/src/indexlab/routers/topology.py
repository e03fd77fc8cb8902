"""Router des bornes d'indice et de l'énumération des topologies."""

from fastapi import APIRouter

from indexlab.logging_conf import get_logger
from indexlab.schemas.topology import (
    BoundOut,
    EnumerateOut,
    EnumerateRequest,
    SandwichOut,
    TopologyIn,
)
from indexlab.services.enumeration import FeasibilityConstraints, case_split
from indexlab.services.topology import bound_report, sandwich

logger = get_logger(__name__)

router = APIRouter(prefix="/v1/topology", tags=["topology"])


@router.post("/bound", response_model=BoundOut)
async def post_bound(request: TopologyIn) -> BoundOut:
    """Bornes inférieure (et supérieure si bilatère) de l'indice."""
    t = request.to_topology()
    return BoundOut(topology=t.to_dict(), **bound_report(t).to_dict())


@router.post("/sandwich", response_model=SandwichOut)
async def post_sandwich(request: TopologyIn) -> SandwichOut:
    """Encadrement de l'indice par la courbure totale de Jorge-Meeks."""
    t = request.to_topology()
    lower, upper = sandwich(t)
    return SandwichOut(
        topology=t.to_dict(),
        lower=str(lower),
        upper=str(upper),
        lower_float=float(lower),
        upper_float=float(upper),
    )


@router.post("/enumerate", response_model=EnumerateOut)
async def post_enumerate(request: EnumerateRequest) -> EnumerateOut:
    """Topologies dont la borne inférieure tient dans le budget, avec l'analyse de cas."""
    constraints = FeasibilityConstraints(
        nonflat=request.nonflat,
        embedded=request.embedded,
        min_ends=request.min_ends,
        min_genus=request.min_genus,
    )
    if request.literature:
        constraints = constraints.with_literature()
    rows = case_split(request.budget, request.sided, constraints)
    found = sorted(t for row in rows for t in row.survivors)
    logger.info(f"API enumerate: budget {request.budget}, {len(found)} topologies")
    return EnumerateOut(
        budget=request.budget,
        sided=request.sided.value,
        topologies=[t.to_dict() for t in found],
        case_split=[row.to_dict() for row in rows],
    )
