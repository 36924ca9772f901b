"""
SQLModel schemas for database persistence.
"""

from .solve_run import SolveRun as SolveRun
