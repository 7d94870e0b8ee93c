import logging
from typing import Any, Dict, Literal, Optional

from fastapi import APIRouter
from pydantic import BaseModel

from src import operations
from src.api.common import run_operation
from src.config import DEFAULT_DEGREE, DEFAULT_FLOOR

router = APIRouter()
logger = logging.getLogger(__name__)


class PdoRequest(BaseModel):
    action: Literal["compose", "adjoint", "invert"]
    op: Dict[str, Any]
    other: Optional[Dict[str, Any]] = None
    floor: int = DEFAULT_FLOOR
    degree: int = DEFAULT_DEGREE


class NkpRequest(BaseModel):
    action: Literal["check", "sato", "djkm"]
    point: Dict[str, Any]
    imax: int = 2
    floor: int = DEFAULT_FLOOR
    degree: int = DEFAULT_DEGREE


@router.post("/pdo")
def pdo(request: PdoRequest):
    """
    Matrix pseudodifferential operator algebra, truncated at `floor`.
    """
    return run_operation(
        "pdo", request, operations.pdo, request.action, request.op, request.degree, request.floor, request.other
    )


@router.post("/nkp")
def nkp(request: NkpRequest):
    """
    Lax and linear-system checks, the Sato roundtrip or the bilinear lemma
    for the wave operator of a point.
    """
    return run_operation(
        "nkp", request, operations.nkp, request.action, request.point, request.degree, request.floor, request.imax
    )
