"""Kähler-Einstein edge metrics on Calabi-Hirzebruch manifolds via the Calabi ansatz."""
from .core import DomainError, Family, ManifoldParams, NumericalError, validate_params
from .profiles import EtaProfile, XiProfile, solve, solve_T, solve_t

__all__ = [
    "DomainError",
    "NumericalError",
    "Family",
    "ManifoldParams",
    "validate_params",
    "EtaProfile",
    "XiProfile",
    "solve",
    "solve_T",
    "solve_t",
]
