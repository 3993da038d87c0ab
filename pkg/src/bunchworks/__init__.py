"""Bunched logics and their algebras: parsing, proof search, finite models,
separation-logic entailment, bi-abduction and a small heap-program verifier."""
from . import finalg, hilbert, languages, models, sequent, slverify, symheap, syntax
from .syntax import parse, render

__all__ = ["finalg", "hilbert", "languages", "models", "sequent", "slverify", "symheap", "syntax",
           "parse", "render"]
__version__ = "0.1.0"
