"""Knot invariants and diagrammatic quantum states.

Exact Laurent-polynomial arithmetic in the Kauffman variable ``A`` underlies
everything; numeric evaluation happens at a :class:`NumericParams` phase.
"""
from .poly import DEFAULT_K, LOOP, A, LaurentPoly, NumericParams, RationalFunc
from .diagram import BraidWord, PDParseError, PlanarMatching, TangleDiagram, TLElement, braid_to_tl
from .bracket import BracketResult, jones_polynomial, kauffman_bracket
from .hilbert import PartyState, gram_matrix, expand_in_computational_basis
from .entangle import Connectome, reduced_density, von_neumann_entropy

__version__ = "0.1.0"

__all__ = [
    "A",
    "LOOP",
    "DEFAULT_K",
    "LaurentPoly",
    "RationalFunc",
    "NumericParams",
    "BraidWord",
    "PDParseError",
    "PlanarMatching",
    "TangleDiagram",
    "TLElement",
    "braid_to_tl",
    "BracketResult",
    "kauffman_bracket",
    "jones_polynomial",
    "PartyState",
    "gram_matrix",
    "expand_in_computational_basis",
    "Connectome",
    "reduced_density",
    "von_neumann_entropy",
]
