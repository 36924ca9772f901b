"""
Storage layer for recorded solve runs.

Key Components:

- **interfaces**: RunStoreInterface and the report-to-row conversion
- **backends**: concrete implementations (SQLite)
- **models**: SQLModel schemas for database persistence

Example:

    >>> from storage.backends.sqlite import SQLiteRunStore
    >>> from storage.interfaces import solve_run_from_report
    >>>
    >>> store = SQLiteRunStore(":memory:")
    >>> store.record_run(solve_run_from_report(inst, "compact", "mixing", report))
"""

__all__ = [
    "interfaces",
    "backends",
    "models",
]
