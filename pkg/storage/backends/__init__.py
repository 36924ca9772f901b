"""
Storage backend implementations.

Available Backends:

- **sqlite**: SQLite run store (file or in-memory)

Example:

    >>> from storage.backends.sqlite import SQLiteRunStore
    >>> store = SQLiteRunStore("runs.db")
"""

__all__ = [
    "sqlite",
]
