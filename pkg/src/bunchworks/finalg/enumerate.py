"""Enumeration of finite GBI-algebras up to isomorphism.

A finite distributive lattice is the downset lattice of its poset ``J`` of
join-irreducibles, and a residuated multiplication on it is the same thing
as a join-preserving one.  Such a multiplication is fixed by its values on
pairs of join-irreducibles, so the search assigns a downset ``M[p][q]`` to
every pair ``(p, q)`` of points of ``J`` subject to monotonicity, the unit
laws and associativity, and keeps one representative per orbit of the
automorphism group of ``J``.
"""
from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from .algebra import FiniteGBIAlgebra
from .lattice import FiniteDistLattice, FinitePoset, lattice_of_sets, posets_with_downsets

VARIETIES = ("gbi", "bi")


def _popcount(x: int) -> int:
    return bin(x).count("1")


class _Frame:
    """Downset lattice of a poset, in bitmask form."""

    def __init__(self, leq: np.ndarray):
        self.k = k = leq.shape[0]
        self.poset = FinitePoset(leq)
        self.below = [sum(1 << b for b in range(k) if leq[b, a]) for a in range(k)]
        self.downsets = self.poset.downsets()
        self.order = self.poset.linear_extension()
        self.autos = self.poset.automorphisms()
        self.less = [[bool(leq[a, b]) and a != b for b in range(k)] for a in range(k)]

    def points(self, mask: int):
        a = 0
        while mask:
            if mask & 1:
                yield a
            mask >>= 1
            a += 1

    def permute(self, mask: int, perm) -> int:
        out = 0
        for a in self.points(mask):
            out |= 1 << perm[a]
        return out


def _solutions(fr: _Frame, unit: int, commutative: bool):
    """All multiplication tables (dict (p, q) -> downset) with the given unit."""
    k = fr.k
    order = fr.order
    cells = [(p, q) for p in order for q in order]
    pos = {c: i for i, c in enumerate(cells)}
    M: dict = {}
    downsets = fr.downsets
    below = fr.below
    unit_pts = list(fr.points(unit))
    full = (1 << k) - 1

    def upper(p, q):
        ub = full
        if (unit >> p) & 1:
            ub &= below[q]
        if (unit >> q) & 1:
            ub &= below[p]
        return ub

    ubs = {c: upper(*c) for c in cells}

    def prod_mask(X: int, r: int, left: bool):
        """(X).r if left else r.(X), for a downset X and point r; None if unknown."""
        out = 0
        for s in fr.points(X):
            key = (s, r) if left else (r, s)
            v = M.get(key)
            if v is None:
                return None
            out |= v
        return out

    def triple_ok(a, b, c) -> bool:
        ab, bc = M.get((a, b)), M.get((b, c))
        if ab is None or bc is None:
            return True
        lhs = prod_mask(ab, c, True)
        if lhs is None:
            return True
        rhs = prod_mask(bc, a, False)
        if rhs is None:
            return True
        return lhs == rhs

    def unit_ok(p, q) -> bool:
        # row/column of the unit through point q (resp. p) complete?
        for r in (q,):
            vals = [M.get((s, r)) for s in unit_pts]
            if None not in vals:
                acc = 0
                for v in vals:
                    acc |= v
                if acc != below[r]:
                    return False
        for r in (p,):
            vals = [M.get((r, s)) for s in unit_pts]
            if None not in vals:
                acc = 0
                for v in vals:
                    acc |= v
                if acc != below[r]:
                    return False
        return True

    def consistent(p, q) -> bool:
        if not unit_ok(p, q):
            return False
        for c in range(k):
            if not triple_ok(p, q, c) or not triple_ok(c, p, q):
                return False
        for a in range(k):
            for b in range(k):
                ab = M.get((a, b))
                if ab is not None and (ab >> p) & 1 and not triple_ok(a, b, q):
                    return False
                bc = M.get((a, b))
                if bc is not None and (bc >> q) & 1 and not triple_ok(p, a, b):
                    return False
        return True

    def rec(i):
        if i == len(cells):
            yield dict(M)
            return
        p, q = cells[i]
        if commutative and pos[(q, p)] < i:
            candidates = [M[(q, p)]]
        else:
            lb = 0
            for p2 in range(k):
                if fr.less[p2][p] and (p2, q) in M:
                    lb |= M[(p2, q)]
            for q2 in range(k):
                if fr.less[q2][q] and (p, q2) in M:
                    lb |= M[(p, q2)]
            ub = ubs[(p, q)]
            candidates = [d for d in downsets if (d & ~ub) == 0 and (lb & ~d) == 0]
        for d in candidates:
            # monotone against already assigned larger neighbours as well
            ok = True
            for p2 in range(k):
                if fr.less[p][p2] and (p2, q) in M and (d & ~M[(p2, q)]):
                    ok = False
                    break
            if ok:
                for q2 in range(k):
                    if fr.less[q][q2] and (p, q2) in M and (d & ~M[(p, q2)]):
                        ok = False
                        break
            if not ok:
                continue
            M[(p, q)] = d
            if consistent(p, q):
                yield from rec(i + 1)
            del M[(p, q)]

    yield from rec(0)


def _canonical(fr: _Frame, M: dict, unit: int) -> tuple:
    best = None
    k = fr.k
    for perm in fr.autos:
        img = {(perm[p], perm[q]): fr.permute(v, perm) for (p, q), v in M.items()}
        code = (fr.permute(unit, perm),) + tuple(img[(p, q)] for p in range(k) for q in range(k))
        if best is None or code < best:
            best = code
    return best


def _to_algebra(fr: _Frame, code: tuple, name=None) -> FiniteGBIAlgebra:
    k = fr.k
    unit = code[0]
    M = {(p, q): code[1 + p * k + q] for p in range(k) for q in range(k)}
    # elements: downsets of J; use the upset presentation of the dual poset
    sets = fr.downsets
    index = {s: i for i, s in enumerate(sets)}
    lat = _downset_lattice(fr)
    n = len(sets)
    mult = np.zeros((n, n), dtype=np.int64)
    for i, X in enumerate(sets):
        for j, Y in enumerate(sets):
            acc = 0
            for p in fr.points(X):
                for q in fr.points(Y):
                    acc |= M[(p, q)]
            mult[i, j] = index[acc]
    return FiniteGBIAlgebra(lat, mult, index[unit], name)


def _downset_lattice(fr: _Frame) -> FiniteDistLattice:
    # downsets of P are the upsets of the dual order; the Heyting implication
    # needs the "downset" (in the dual order) of each point, i.e. its upset in P
    k = fr.k
    above = [sum(1 << b for b in range(k) if (fr.below[b] >> a) & 1) for a in range(k)]
    return lattice_of_sets(fr.downsets, k, closure_down=above)


@lru_cache(maxsize=None)
def _codes(n: int, variety: str) -> tuple:
    if n == 1:
        return ((None, None),)
    out = []
    for leq in posets_with_downsets(n):
        fr = _Frame(leq)
        seen = set()
        for unit in fr.downsets:
            if unit == 0:
                continue
            for M in _solutions(fr, unit, variety == "bi"):
                seen.add(_canonical(fr, M, unit))
        for code in sorted(seen):
            out.append((leq.tobytes() + bytes([leq.shape[0]]), code))
    return tuple(out)


def _trivial() -> FiniteGBIAlgebra:
    lat = FiniteDistLattice(np.ones((1, 1), dtype=bool), ["0"])
    return FiniteGBIAlgebra(lat, np.zeros((1, 1), dtype=np.int64), 0, "O")


_FRAMES: dict = {}


def enumerate_algebras(n: int, variety: str = "gbi") -> list[FiniteGBIAlgebra]:
    """All ``n``-element GBI-algebras (``variety='gbi'``) or BI-algebras
    (``'bi'``) up to isomorphism, in a fixed canonical order."""
    if variety not in VARIETIES:
        raise ValueError(f"variety must be one of {VARIETIES}")
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return [_trivial()]
    out = []
    for key, code in _codes(n, variety):
        if key not in _FRAMES:
            k = key[-1]
            leq = np.frombuffer(key[:-1], dtype=bool).reshape(k, k)
            _FRAMES[key] = _Frame(leq)
        out.append(_to_algebra(_FRAMES[key], code))
    return out


def count_algebras(n: int, variety: str = "gbi") -> int:
    if n == 1:
        return 1
    return len(_codes(n, variety))


REFERENCE_COUNTS = {
    "gbi": {2: 1, 3: 3, 4: 20, 5: 115, 6: 899, 7: 7782, 8: 80468},
    "bi": {2: 1, 3: 3, 4: 16, 5: 70, 6: 399, 7: 2261, 8: 14358},
}


def _count_job(args):
    n, v = args
    return count_algebras(n, v)


def reproduce_counts(max_n: int = 5, jobs: int = 1) -> list[dict]:
    """Count algebras for ``n = 2..max_n`` and compare with the reference counts."""
    tasks = [(n, v) for n in range(2, max_n + 1) for v in VARIETIES]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            counts = dict(zip(tasks, ex.map(_count_job, tasks)))
    else:
        counts = {t: _count_job(t) for t in tasks}
    rows = []
    for n in range(2, max_n + 1):
        row = {"n": n}
        for v in VARIETIES:
            row[v] = counts[(n, v)]
            row[v + "_expected"] = REFERENCE_COUNTS[v].get(n)
        row["match"] = all(row[v] == row[v + "_expected"] for v in VARIETIES)
        rows.append(row)
    return rows


def jobs_from_env(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("BUNCHWORKS_JOBS", default)))
    except ValueError:
        return default
