import logging
import time
from typing import Any, Callable, Dict

from fastapi import HTTPException
from pydantic import BaseModel

from src.errors import KPError, SchemaError
from src.report import Envelope, digest

logger = logging.getLogger(__name__)


def run_operation(name: str, request: BaseModel, fn: Callable, *args, **kwargs) -> Dict[str, Any]:
    """
    Runs one payload builder and maps library errors onto HTTP status codes.
    A failed verdict is still a 200: the body carries `ok: false` and the report.
    """
    started = time.perf_counter()
    try:
        payload, ok = fn(*args, **kwargs)
    except SchemaError as e:
        logger.error(f"[{name}] rejected input: {e}", exc_info=True)
        raise HTTPException(status_code=e.status_code, detail={"location": e.location, "message": str(e)})
    except KPError as e:
        logger.error(f"[{name}] {type(e).__name__}: {e}", exc_info=True)
        raise HTTPException(status_code=e.status_code, detail=str(e))
    envelope = Envelope(
        input_digests={"request": digest(request.model_dump())},
        timing={"seconds": round(time.perf_counter() - started, 6)},
    )
    logger.info(f"[{name}] verdict: {'ok' if ok else 'failed'} in {envelope.timing['seconds']}s")
    return {"ok": ok, **envelope.model_dump(), **payload}
