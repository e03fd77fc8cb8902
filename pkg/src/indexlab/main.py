"""Application FastAPI principale."""

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from indexlab import __version__
from indexlab.config import settings
from indexlab.exceptions import IndexLabError
from indexlab.logging_conf import get_logger, setup_logging
from indexlab.routers import forms, health, surfaces, topology

logger = get_logger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Lifespan events."""
    setup_logging()
    settings.ensure_directories()
    yield


app = FastAPI(
    title="indexlab",
    description="Indice de Morse des surfaces minimales complètes : bornes, formes L²*, parités",
    version=__version__,
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins_list or ["http://localhost:3000", "http://127.0.0.1:3000"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(IndexLabError)
async def indexlab_error_handler(request: Request, exc: IndexLabError) -> JSONResponse:
    """Erreurs du domaine → 422 avec le type d'erreur."""
    logger.warning(f"{type(exc).__name__} on {request.url.path}: {exc}")
    return JSONResponse(
        status_code=422,
        content={"error": type(exc).__name__, "detail": str(exc), "exit_code": exc.exit_code},
    )


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=422, content={"error": "ValueError", "detail": str(exc)})


app.include_router(health.router)
app.include_router(topology.router)
app.include_router(forms.router)
app.include_router(surfaces.router)


@app.get("/")
async def root():
    """Root endpoint."""
    return {
        "service": "indexlab",
        "version": __version__,
        "status": "operational",
        "docs": "/docs",
    }
