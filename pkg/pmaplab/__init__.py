"""
pmaplab: exact-arithmetic tools for the principal minor assignment problem.

Learns a matrix from black-box access to det(A + Y), learns read-once
determinants, reconstructs matrices with the rank-one extension property and
tests principal minor equivalence deterministically.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import PmaplabError
from .field import FieldSpec, choose_prime, default_field
from .matrix import ExactMatrix

__all__ = [
    "__version__",
    "PmaplabError",
    "FieldSpec",
    "ExactMatrix",
    "choose_prime",
    "default_field",
]
