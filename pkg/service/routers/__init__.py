"""
API routers.
"""

__all__ = [
    "rest_api",
]
