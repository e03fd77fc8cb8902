"""Router de l'espace L²* : dimensions, parités de Costa, faisabilité."""

from fastapi import APIRouter, Query

from indexlab.schemas.forms import DimensionOut, FeasibilityOut, FeasibilityRequest
from indexlab.schemas.topology import TopologyIn
from indexlab.services.forms import dim_harmonic_l2star, dimension_note, laplacian_decay_order
from indexlab.services.parity import costa_parity_dims, parity_feasibility, replay_index_three

router = APIRouter(prefix="/v1/forms", tags=["forms"])


@router.post("/dimension", response_model=DimensionOut)
async def post_dimension(request: TopologyIn) -> DimensionOut:
    """dim H¹ ∩ L²* avec la note de dérivation."""
    t = request.to_topology()
    return DimensionOut(
        topology=t.to_dict(),
        dimension=dim_harmonic_l2star(t),
        note=dimension_note(t),
        decay=laplacian_decay_order(t).to_dict(),
    )


@router.get("/costa-parity")
async def get_costa_parity(t: float = Query(1.0, gt=0, description="Rapport des périodes")):
    """Dimensions par parité, dimensions avant retrait des *dxⁱ et table des parités."""
    return costa_parity_dims(t).to_dict()


@router.post("/feasibility", response_model=FeasibilityOut)
async def post_feasibility(request: FeasibilityRequest) -> FeasibilityOut:
    """Inégalités violées par des comptes de secteur, et rejeu pour un indice 3."""
    violated = [str(i) for i in parity_feasibility(request.w, request.dims)]
    return FeasibilityOut(
        w=request.w,
        violated=violated,
        feasible=not violated,
        replay=replay_index_three(request.dims).to_dict(),
    )
