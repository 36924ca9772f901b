"""
Branch-and-cut toolkit for chance-constrained static lot-sizing.

Key Components:

- **instance**: problem data, scenario statistics, generation and file I/O
- **lp**: bounded-variable LP engines
- **formulations**: deterministic equivalent, compact and Benders master models
- **cuts**: valid inequalities, separation routines and the cut pool
- **solver**: root cutting-plane loop plus best-bound branch-and-bound
- **benders**: closed-form dual subproblems and optimality cuts
- **oracle**: brute-force certifiers used by the verification suites
- **methods**: method dispatch shared by the CLI, the bench harness and the service
- **verification**: randomized property suites driving the oracle
- **bench**: benchmark grid runner and CSV averages
- **cli**: the `lotsizing` command

Example:

    >>> from lotsizing.instance import generate
    >>> from lotsizing.formulations import build_compact
    >>> from lotsizing.solver import CutConfig, solve
    >>>
    >>> inst = generate(n=5, m=20, epsilon=0.1, seed=1)
    >>> report = solve(build_compact(inst), CutConfig.from_names("mixing,new"))
"""

__version__ = "0.1.0"

__all__ = [
    "instance",
    "lp",
    "formulations",
    "cuts",
    "solver",
    "benders",
    "oracle",
    "methods",
    "verification",
    "bench",
    "cli",
]
