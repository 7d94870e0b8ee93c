import logging
from typing import Any, Dict, List, Optional

from fastapi import APIRouter
from pydantic import BaseModel, Field

from src import operations
from src.api.common import run_operation
from src.config import CORPUS_SEED, DEFAULT_WINDOW, KP_WORKERS
from src.corpus import criteria

router = APIRouter()
logger = logging.getLogger(__name__)


class KricheverRequest(BaseModel):
    curve: Dict[str, Any]
    window: List[int] = Field(default_factory=lambda: [-DEFAULT_WINDOW, DEFAULT_WINDOW + 1], min_length=2, max_length=2)
    degree: Optional[int] = None


class CorpusRequest(BaseModel):
    only: Optional[List[str]] = None
    seed: int = CORPUS_SEED
    workers: int = KP_WORKERS


@router.post("/krichever")
def krichever(request: KricheverRequest):
    """
    Builds the Krichever pair of a rational curve with nodes and reports
    index bookkeeping, ring and module closure, residue sums and, when a
    degree is given, the Baker-Akhiezer form of the moduli equations.
    """
    lo, hi = request.window
    return run_operation("krichever", request, operations.krichever, request.curve, (lo, hi), request.degree)


@router.get("/corpus")
def list_criteria():
    return {"criteria": sorted(criteria(CORPUS_SEED))}


@router.post("/corpus")
def corpus(request: CorpusRequest):
    logger.info(f"[corpus] seed={request.seed} only={request.only}")
    return run_operation("corpus", request, operations.corpus, request.only, request.seed, request.workers)
