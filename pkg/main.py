# Entry point for uvicorn: uvicorn main:app
from service.server import app

__all__ = ["app"]
