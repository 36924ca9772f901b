"""
HTTP surface of the lot-sizing toolkit.

Key Components:

- **server**: FastAPI app, lifespan and health check
- **run_store_factory**: DATABASE_URL driven run store dependency
- **routers**: REST endpoints under /api/v1
"""

__all__ = [
    "server",
    "run_store_factory",
    "routers",
]
