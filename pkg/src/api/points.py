import logging
from typing import Any, Dict, List, Optional, Union

from fastapi import APIRouter
from pydantic import BaseModel

from src import operations
from src.api.common import run_operation
from src.config import DEFAULT_DEGREE

router = APIRouter()
logger = logging.getLogger(__name__)

Scalar = Union[int, str]


# Pydantic models for API requests
class TauRequest(BaseModel):
    point: Dict[str, Any]
    degree: int = DEFAULT_DEGREE
    miwa: Optional[List[List[Scalar]]] = None


class BARequest(BaseModel):
    point: Dict[str, Any]
    degree: int = DEFAULT_DEGREE
    window: Optional[int] = None
    adjoint: bool = False
    matrix: bool = False


class BilinearRequest(BaseModel):
    u: Dict[str, Any]
    uprime: Dict[str, Any]
    degree: int = DEFAULT_DEGREE


class WronskianRequest(BaseModel):
    point: Dict[str, Any]
    degree: int = DEFAULT_DEGREE


@router.post("/tau")
def tau(request: TauRequest):
    """
    Tau function of a plus-type point: a truncated polynomial, or its value
    at a Miwa point together with the addition-formula evaluation.
    """
    return run_operation("tau", request, operations.tau, request.point, request.degree, request.miwa)


@router.post("/ba")
def ba(request: BARequest):
    """
    Baker-Akhiezer function (scalar rows, adjoint or full wave matrix).
    """
    return run_operation(
        "ba", request, operations.ba, request.point, request.degree, request.window, request.adjoint, request.matrix
    )


@router.post("/bilinear")
def bilinear(request: BilinearRequest):
    return run_operation("bilinear", request, operations.bilinear, request.u, request.uprime, request.degree)


@router.post("/wronskian")
def wronskian(request: WronskianRequest):
    return run_operation("wronskian", request, operations.wronskian, request.point, request.degree)
