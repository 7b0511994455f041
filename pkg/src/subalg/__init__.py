"""Subspace collections and the rational functions they realize."""

from .collections import Superfunction, YCollection, ZCollection, l_operator, validate
from .errors import SubalgError
from .numcore import DEFAULT_TOL, Tolerance
from .solvers import solve_superfunction, solve_y, solve_z
from .spaces import DirectSum, Subspace

__version__ = "0.1.0"

__all__ = [
    "Subspace",
    "DirectSum",
    "ZCollection",
    "YCollection",
    "Superfunction",
    "validate",
    "l_operator",
    "solve_z",
    "solve_y",
    "solve_superfunction",
    "Tolerance",
    "DEFAULT_TOL",
    "SubalgError",
]
