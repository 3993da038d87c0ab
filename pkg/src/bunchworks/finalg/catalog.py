"""Named GBI-algebras with at most four elements.

Chains are listed bottom-up after an implicit bottom ``bot``; the Boolean
square has atoms ``1`` and ``0``.  Products with ``bot`` are ``bot``.
"""
from __future__ import annotations

import numpy as np

from .algebra import FiniteGBIAlgebra, linear_algebra
from .lattice import FiniteDistLattice

# name -> (chain above bot, rows of the product table in chain order, unit)
CHAINS = {
    "2": (["top"], {"top": ["top"]}, "top"),
    "L3": (["a", "1"], {"a": ["bot", "a"], "1": ["a", "1"]}, "1"),
    "G3": (["a", "1"], {"a": ["a", "a"], "1": ["a", "1"]}, "1"),
    "S3": (["1", "top"], {"1": ["1", "top"], "top": ["top", "top"]}, "1"),
    "L4": (["a", "b", "1"], {"a": ["bot", "bot", "a"], "b": ["bot", "a", "b"], "1": ["a", "b", "1"]}, "1"),
    "L3[2]": (["a", "b", "1"], {"a": ["bot", "a", "a"], "b": ["a", "b", "b"], "1": ["a", "b", "1"]}, "1"),
    "2[L3]": (["a", "b", "1"], {"a": ["a", "a", "a"], "b": ["a", "a", "b"], "1": ["a", "b", "1"]}, "1"),
    "C4bot": (["a", "b", "1"], {"a": ["bot", "bot", "a"], "b": ["bot", "bot", "b"], "1": ["a", "b", "1"]}, "1"),
    "C4bot'": (["a", "b", "1"], {"a": ["bot", "bot", "a"], "b": ["bot", "b", "b"], "1": ["a", "b", "1"]}, "1"),
    "G4": (["a", "b", "1"], {"a": ["a", "a", "a"], "b": ["a", "b", "b"], "1": ["a", "b", "1"]}, "1"),
    "N1": (["a", "b", "1"], {"a": ["bot", "bot", "a"], "b": ["a", "b", "b"], "1": ["a", "b", "1"]}, "1"),
    "N1op": (["a", "b", "1"], {"a": ["bot", "a", "a"], "b": ["bot", "b", "b"], "1": ["a", "b", "1"]}, "1"),
    "C4vee": (["1", "a", "top"], {"1": ["1", "a", "top"], "a": ["a", "a", "top"], "top": ["top", "top", "top"]}, "1"),
    "C4top": (["1", "a", "top"], {"1": ["1", "a", "top"], "a": ["a", "top", "top"], "top": ["top", "top", "top"]}, "1"),
    "S3[2]": (["a", "1", "top"], {"a": ["a", "a", "top"], "1": ["a", "1", "top"], "top": ["top", "top", "top"]}, "1"),
    "2[S3]": (["a", "1", "top"], {"a": ["a", "a", "a"], "1": ["a", "1", "top"], "top": ["a", "top", "top"]}, "1"),
    "N2": (["a", "1", "top"], {"a": ["a", "a", "a"], "1": ["a", "1", "top"], "top": ["top", "top", "top"]}, "1"),
    "N2op": (["a", "1", "top"], {"a": ["a", "a", "top"], "1": ["a", "1", "top"], "top": ["a", "top", "top"]}, "1"),
    "L3+top": (["a", "1", "top"], {"a": ["bot", "a", "a"], "1": ["a", "1", "top"], "top": ["a", "top", "top"]}, "1"),
}

# Boolean square bot < 1, 0 < top; rows in the order 1, 0, top.
# Entries 0.top and top.0 follow from join preservation (0.1 | 0.0).
SQUARES = {
    "P2+": ({"1": ["1", "0", "top"], "0": ["0", "bot", "0"], "top": ["top", "0", "top"]}, "1"),
    "Z2+": ({"1": ["1", "0", "top"], "0": ["0", "1", "top"], "top": ["top", "top", "top"]}, "1"),
    "Z3+s": ({"1": ["1", "0", "top"], "0": ["0", "top", "top"], "top": ["top", "top", "top"]}, "1"),
    "M2+": ({"1": ["1", "0", "top"], "0": ["0", "0", "0"], "top": ["top", "0", "top"]}, "1"),
    "2x2": ({"1": ["1", "bot", "1"], "0": ["bot", "0", "0"], "top": ["1", "0", "top"]}, "top"),
}

THREE_ELEMENT = ["L3", "G3", "S3"]
FOUR_ELEMENT = ["L4", "L3[2]", "2[L3]", "C4bot", "C4bot'", "G4", "N1", "N1op", "C4vee", "C4top",
                "S3[2]", "2[S3]", "N2", "N2op", "L3+top", "P2+", "Z2+", "Z3+s", "M2+", "2x2"]


def _square(name: str) -> FiniteGBIAlgebra:
    rows, unit = SQUARES[name]
    labels = ["bot", "1", "0", "top"]
    leq = np.array([[1, 1, 1, 1], [0, 1, 0, 1], [0, 0, 1, 1], [0, 0, 0, 1]], dtype=bool)
    lat = FiniteDistLattice(leq, labels)
    header = ["1", "0", "top"]
    mult = np.zeros((4, 4), dtype=np.int64)
    for a, vals in rows.items():
        for b, v in zip(header, vals):
            mult[labels.index(a), labels.index(b)] = labels.index(v)
    return FiniteGBIAlgebra(lat, mult, labels.index(unit), name)


def algebra(name: str) -> FiniteGBIAlgebra:
    """A named algebra from the catalog."""
    if name in SQUARES:
        return _square(name)
    order, rows, unit = CHAINS[name]
    table = {a: dict(zip(order, vals)) for a, vals in rows.items()}
    return linear_algebra(order, table, unit, name)


def names() -> list[str]:
    return ["2"] + THREE_ELEMENT + FOUR_ELEMENT


def lookup(alg: FiniteGBIAlgebra) -> str | None:
    """Name of the catalog algebra isomorphic to ``alg``, if any."""
    from .structure import is_isomorphic
    for name in names():
        cand = algebra(name)
        if cand.n == alg.n and is_isomorphic(cand, alg):
            return name
    return None
