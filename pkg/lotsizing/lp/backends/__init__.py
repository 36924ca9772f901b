"""
LP engine implementations.

Available Backends:

- **simplex**: bounded dual simplex with warm starts (production engine)
- **tableau**: two-phase primal simplex with Bland's rule (reference engine)

Example:

    >>> from lotsizing.lp.backends.simplex import BoundedDualSimplex
    >>> engine = BoundedDualSimplex()
"""

__all__ = [
    "simplex",
    "tableau",
]
