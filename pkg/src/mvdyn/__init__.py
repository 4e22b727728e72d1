"""Finite multivariable dynamical systems and their operator algebras at desk scale."""
from .core import (
    FiniteMultiSystem,
    InputError,
    Polynomial,
    evaluate_word,
    orbit,
    poly_mul,
    structure_summary,
)

__all__ = [
    "FiniteMultiSystem",
    "InputError",
    "Polynomial",
    "evaluate_word",
    "orbit",
    "poly_mul",
    "structure_summary",
]
__version__ = "0.1.0"
