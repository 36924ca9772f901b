import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from .routers import rest_api
from .run_store_factory import close_run_store, get_engine

logging.basicConfig(format="%(levelname)s:     %(asctime)s - %(message)s", level=logging.INFO, datefmt="%Y-%m-%d %H:%M:%S")
logger = logging.getLogger()


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Application lifespan manager.
    Opens the run store engine on startup and disposes of it on shutdown.
    """
    _, db_url = get_engine()
    logger.info("Recording solve runs in %s", db_url)
    yield
    close_run_store()


app = FastAPI(
    title="Chance-Constrained Lot-Sizing API",
    description="Generate instances, solve them by branch-and-cut and browse recorded runs.",
    version="0.1.0",
    lifespan=lifespan,
)

app.include_router(rest_api.router)


@app.get("/health")
async def health_check():
    """
    Health check endpoint to verify that the server is running.
    """
    return {"status": "ok"}
