import logging

import uvicorn
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from src.api import curves, operators, points
from src.config import CORPUS_SEED, DEFAULT_DEGREE, DEFAULT_FLOOR, DEFAULT_WINDOW, PORT

logger = logging.getLogger(__name__)

# --- App Initialization ---
app = FastAPI(title="KP Hierarchy Workbench")

# --- CORS Middleware ---
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# --- Health Check ---
@app.get("/health", include_in_schema=False)
def health_check():
    """
    Health check endpoint for Docker and monitoring.
    """
    return {
        "status": "healthy",
        "defaults": {
            "degree": DEFAULT_DEGREE,
            "window": DEFAULT_WINDOW,
            "floor": DEFAULT_FLOOR,
            "seed": CORPUS_SEED,
        },
    }


# --- API Routers ---
app.include_router(points.router, prefix="/api", tags=["points"])
app.include_router(operators.router, prefix="/api", tags=["operators"])
app.include_router(curves.router, prefix="/api", tags=["curves"])


# --- Main Entry Point ---
if __name__ == "__main__":
    logger.info(f"Starting KP Hierarchy Workbench on http://0.0.0.0:{PORT}")
    logger.info(f"API Documentation: http://0.0.0.0:{PORT}/docs")
    logger.info(f"Health Check: http://0.0.0.0:{PORT}/health")

    uvicorn.run(
        app,
        host="0.0.0.0",
        port=PORT,
        log_level="info"
    )
