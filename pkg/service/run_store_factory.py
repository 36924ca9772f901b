"""
Run store factory for creating and managing run store instances.
"""

import logging
import os
from typing import Generator

from sqlalchemy import create_engine
from sqlalchemy.pool import StaticPool
from sqlmodel import SQLModel

from storage.backends.sqlite import SQLiteRunStore
from storage.interfaces import RunStoreInterface

logger = logging.getLogger(__name__)

DEFAULT_DATABASE_URL = "sqlite:///./runs.db"

# Singleton engine and db_url
_engine = None
_db_url = None


def get_engine():
    """
    Returns a singleton instance of the SQLAlchemy engine and db_url.
    """
    global _engine, _db_url
    if _engine is None:
        _db_url = os.getenv("DATABASE_URL")
        if not _db_url:
            logger.info("DATABASE_URL not set, defaulting to %s", DEFAULT_DATABASE_URL)
            _db_url = DEFAULT_DATABASE_URL
        if not _db_url.startswith("sqlite://"):
            _db_url = None
            raise ValueError("Unsupported database URL scheme.")
        # one shared connection keeps an in-memory database alive across requests
        pool = {"poolclass": StaticPool} if sqlite_path(_db_url) == ":memory:" else {}
        _engine = create_engine(_db_url, connect_args={"check_same_thread": False}, **pool)
        SQLModel.metadata.create_all(_engine)
    return _engine, _db_url


def sqlite_path(db_url: str) -> str:
    """File path (or ":memory:") encoded in a sqlite URL."""
    db_path = db_url.replace("sqlite:///", "", 1)
    return db_path or ":memory:"


def get_run_store() -> Generator[RunStoreInterface, None, None]:
    """
    FastAPI dependency that provides a run store for the duration of a request.
    Every store shares the singleton engine; only its session is closed.
    """
    engine, _ = get_engine()
    store: RunStoreInterface = SQLiteRunStore(engine=engine)
    try:
        yield store
    finally:
        store.close()


def close_run_store():
    """
    Closes the engine connection.
    """
    global _engine, _db_url
    if _engine:
        _engine.dispose()
        _engine = None
        _db_url = None
