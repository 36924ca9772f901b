"""
SQLite implementation of the run store.
"""

import logging
from typing import Optional, Sequence

from sqlalchemy import func
from sqlalchemy.engine import Engine
from sqlmodel import Session, SQLModel, create_engine, select

from storage.interfaces import RunStoreInterface
from storage.models import SolveRun

logger = logging.getLogger(__name__)


class SQLiteRunStore(RunStoreInterface):
    """
    SQLite implementation of the run store. `db_path` may be ":memory:".
    A store given an `engine` shares it and leaves disposal to its owner.
    """

    def __init__(self, db_path: Optional[str] = None, engine: Optional[Engine] = None):
        self._owns_engine = engine is None
        if engine is None:
            if db_path is None:
                raise ValueError("SQLiteRunStore needs a db_path or an engine")
            engine = create_engine(f"sqlite:///{db_path}", connect_args={"check_same_thread": False})
            SQLModel.metadata.create_all(engine)
        self.engine = engine
        self._session = Session(self.engine)

    def record_run(self, run: SolveRun) -> SolveRun:
        self._session.add(run)
        self._session.commit()
        self._session.refresh(run)
        logger.debug("Recorded run %s (%s, %s)", run.id, run.method, run.status)
        return run

    def get_run(self, run_id: int) -> Optional[SolveRun]:
        return self._session.get(SolveRun, run_id)

    def list_runs(
        self,
        limit: int = 100,
        offset: int = 0,
        method: Optional[str] = None,
        status: Optional[str] = None,
    ) -> Sequence[SolveRun]:
        statement = select(SolveRun)
        if method:
            statement = statement.where(SolveRun.method == method)
        if status:
            statement = statement.where(SolveRun.status == status)
        statement = statement.order_by(SolveRun.id.desc()).limit(limit).offset(offset)
        return self._session.exec(statement).all()

    def count_runs(self, method: Optional[str] = None, status: Optional[str] = None) -> int:
        statement = select(func.count(SolveRun.id))  # pylint: disable=not-callable
        if method:
            statement = statement.where(SolveRun.method == method)
        if status:
            statement = statement.where(SolveRun.status == status)
        return self._session.exec(statement).one()

    def close(self) -> None:
        self._session.close()
        if self._owns_engine:
            self.engine.dispose()
