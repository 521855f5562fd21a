"""Decide, with witnesses, whether a matrix over a finite commutative ring is a sum of k idempotents or involutions."""

from .decompose import DecompQuery, Decision, Witness, decide, decompose_product, open_question_z4, sum_of_k, survey
from .enumeration import SummandKind, SummandPool, pool_for
from .errors import IdemsumError
from .matrix import Matrix, parse_matrix
from .ring import FiniteRing, make_galois, make_product, make_zmod, parse_ring

__version__ = "0.1.0"

__all__ = [
    "DecompQuery",
    "Decision",
    "FiniteRing",
    "IdemsumError",
    "Matrix",
    "SummandKind",
    "SummandPool",
    "Witness",
    "decide",
    "decompose_product",
    "make_galois",
    "make_product",
    "make_zmod",
    "open_question_z4",
    "parse_matrix",
    "parse_ring",
    "pool_for",
    "sum_of_k",
    "survey",
]
