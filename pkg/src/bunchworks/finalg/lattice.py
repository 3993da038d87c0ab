"""Finite posets and finite distributive lattices.

Elements are the integers ``0..n-1``; orders are boolean numpy matrices
with ``leq[a, b]`` meaning ``a <= b``.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


class NotALattice(ValueError):
    pass


class NotDistributive(ValueError):
    pass


class FinitePoset:
    def __init__(self, leq, labels=None):
        self.leq = np.array(leq, dtype=bool)
        self.n = self.leq.shape[0]
        self.labels = list(labels) if labels is not None else [str(i) for i in range(self.n)]

    def check(self) -> None:
        L = self.leq
        if not L.diagonal().all():
            raise ValueError("order is not reflexive")
        if (L & L.T & ~np.eye(self.n, dtype=bool)).any():
            raise ValueError("order is not antisymmetric")
        comp = (L.astype(np.int32) @ L.astype(np.int32)) > 0
        if (comp & ~L).any():
            raise ValueError("order is not transitive")

    def downset(self, a: int) -> int:
        return sum(1 << b for b in range(self.n) if self.leq[b, a])

    def upset(self, a: int) -> int:
        return sum(1 << b for b in range(self.n) if self.leq[a, b])

    def downsets(self) -> list[int]:
        """All downsets as bitmasks, sorted by size then value."""
        n = self.n
        below = [self.downset(a) for a in range(n)]
        out = []
        for mask in range(1 << n):
            if all(not (mask >> a) & 1 or (below[a] & ~mask) == 0 for a in range(n)):
                out.append(mask)
        out.sort(key=lambda m: (bin(m).count("1"), m))
        return out

    def upsets(self) -> list[int]:
        n = self.n
        above = [self.upset(a) for a in range(n)]
        out = []
        for mask in range(1 << n):
            if all(not (mask >> a) & 1 or (above[a] & ~mask) == 0 for a in range(n)):
                out.append(mask)
        out.sort(key=lambda m: (bin(m).count("1"), m))
        return out

    def automorphisms(self) -> list[tuple[int, ...]]:
        return [p for p in itertools.permutations(range(self.n))
                if all(self.leq[a, b] == self.leq[p[a], p[b]]
                       for a in range(self.n) for b in range(self.n))]

    def linear_extension(self) -> list[int]:
        return sorted(range(self.n), key=lambda a: (int(self.leq[:, a].sum()), a))

    def dual(self) -> "FinitePoset":
        return FinitePoset(self.leq.T, self.labels)

    def __repr__(self):
        return f"FinitePoset(n={self.n})"


def chain(n: int) -> FinitePoset:
    return FinitePoset(np.triu(np.ones((n, n), dtype=bool)))


def antichain(n: int) -> FinitePoset:
    return FinitePoset(np.eye(n, dtype=bool))


class FiniteDistLattice:
    """A finite distributive lattice with its Heyting implication."""

    def __init__(self, leq, labels=None, meet=None, join=None, imp=None, check=True):
        self.leq = np.array(leq, dtype=bool)
        self.n = self.leq.shape[0]
        self.labels = list(labels) if labels is not None else [str(i) for i in range(self.n)]
        n = self.n
        bots = [a for a in range(n) if self.leq[a].all()]
        tops = [a for a in range(n) if self.leq[:, a].all()]
        if len(bots) != 1 or len(tops) != 1:
            raise NotALattice("no least or greatest element")
        self.bot, self.top = bots[0], tops[0]
        self.meet = np.asarray(meet, dtype=np.int64) if meet is not None else self._bounds(lower=True)
        self.join = np.asarray(join, dtype=np.int64) if join is not None else self._bounds(lower=False)
        if check:
            self._check_distributive()
        self.imp = np.asarray(imp, dtype=np.int64) if imp is not None else self._heyting()

    def _bounds(self, lower: bool) -> np.ndarray:
        L = self.leq if lower else self.leq.T
        n = self.n
        out = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            for b in range(a, n):
                cand = np.flatnonzero(L[:, a] & L[:, b])
                best = [c for c in cand if L[cand, c].all()]
                if len(best) != 1:
                    raise NotALattice(f"elements {a} and {b} have no {'meet' if lower else 'join'}")
                out[a, b] = out[b, a] = best[0]
        return out

    def _check_distributive(self) -> None:
        m, j = self.meet, self.join
        for a in range(self.n):
            lhs = m[a][j]            # a & (b | c)
            rhs = j[m[a][:, None], m[a][None, :]]
            if (lhs != rhs).any():
                b, c = np.argwhere(lhs != rhs)[0]
                raise NotDistributive(f"distributivity fails at ({a}, {b}, {c})")

    def _heyting(self) -> np.ndarray:
        n = self.n
        out = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            ok = self.leq[self.meet[a], :]        # ok[c, b]: a & c <= b
            for b in range(n):
                cand = np.flatnonzero(ok[:, b])
                top = [c for c in cand if self.leq[cand, c].all()]
                out[a, b] = top[0]
        return out

    def join_irreducibles(self) -> list[int]:
        out = []
        for a in range(self.n):
            if a == self.bot:
                continue
            below = [b for b in range(self.n) if self.leq[b, a] and b != a]
            maximal = [b for b in below if not any(self.leq[b, c] and b != c for c in below)]
            if len(maximal) == 1:
                out.append(a)
        return out

    def automorphisms(self) -> list[tuple[int, ...]]:
        """Order automorphisms, induced from those of the join-irreducibles."""
        J = self.join_irreducibles()
        P = FinitePoset(self.leq[np.ix_(J, J)])
        out = []
        for perm in P.automorphisms():
            image = {J[i]: J[perm[i]] for i in range(len(J))}
            f = []
            for a in range(self.n):
                below = [image[j] for j in J if self.leq[j, a]]
                x = self.bot
                for b in below:
                    x = self.join[x, b]
                f.append(int(x))
            out.append(tuple(f))
        return out

    def __repr__(self):
        return f"FiniteDistLattice(n={self.n})"


def upsets(p: FinitePoset) -> FiniteDistLattice:
    """The lattice of upsets of ``p`` ordered by inclusion, with ``U -> V = P - down(U - V)``."""
    ups = p.upsets()
    return lattice_of_sets(ups, p.n, closure_down=[p.downset(a) for a in range(p.n)], labels=None)


def lattice_of_sets(sets: list[int], universe: int, closure_down=None, labels=None) -> FiniteDistLattice:
    """Lattice of a family of upsets (bitmasks) closed under union and intersection.

    ``closure_down[a]`` is the bitmask of the downset of point ``a``; it gives
    the Heyting implication ``U -> V = P - down(U - V)``.
    """
    index = {s: i for i, s in enumerate(sets)}
    n = len(sets)
    arr = np.array(sets, dtype=object)
    leq = np.zeros((n, n), dtype=bool)
    meet = np.empty((n, n), dtype=np.int64)
    join = np.empty((n, n), dtype=np.int64)
    imp = np.empty((n, n), dtype=np.int64)
    full = (1 << universe) - 1
    for i, s in enumerate(sets):
        for k, t in enumerate(sets):
            leq[i, k] = (s & ~t) == 0
            meet[i, k] = index[s & t]
            join[i, k] = index[s | t]
            if closure_down is not None:
                diff = s & ~t
                down = 0
                a = 0
                while diff:
                    if diff & 1:
                        down |= closure_down[a]
                    diff >>= 1
                    a += 1
                imp[i, k] = index[full & ~down]
    del arr
    labels = labels if labels is not None else [format_set(s) for s in sets]
    return FiniteDistLattice(leq, labels, meet=meet, join=join,
                             imp=imp if closure_down is not None else None, check=False)


def format_set(mask: int) -> str:
    return "{" + ",".join(str(i) for i in range(mask.bit_length()) if (mask >> i) & 1) + "}"


def join_irreducibles(lat: FiniteDistLattice) -> FinitePoset:
    """The join-irreducibles ordered by the reverse of the lattice order, so
    that ``upsets(join_irreducibles(L))`` is isomorphic to ``L`` and ``p`` maps
    to the principal upset of ``p``.  Rejects lattices that are not distributive."""
    lat._check_distributive()
    J = lat.join_irreducibles()
    return FinitePoset(lat.leq[np.ix_(J, J)].T, [lat.labels[j] for j in J])


def is_isomorphic_posets(p: FinitePoset, q: FinitePoset) -> bool:
    if p.n != q.n:
        return False
    return canonical_poset(p.leq) == canonical_poset(q.leq)


def canonical_poset(leq: np.ndarray) -> tuple:
    n = leq.shape[0]
    best = None
    for perm in itertools.permutations(range(n)):
        code = tuple(bool(leq[perm[a], perm[b]]) for a in range(n) for b in range(n))
        if best is None or code < best:
            best = code
    return best


def _natural_posets(k: int):
    """Transitive relations refining the integer order on ``k`` points (bitmask rows)."""
    pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
    for bits in range(1 << len(pairs)):
        up = [1 << a for a in range(k)]
        for idx, (a, b) in enumerate(pairs):
            if (bits >> idx) & 1:
                up[a] |= 1 << b
        if all(all(not (up[a] >> b) & 1 or (up[b] & ~up[a]) == 0 for b in range(k))
               for a in range(k)):
            yield up


def _count_downsets(up: list[int], k: int) -> int:
    count = 0
    for mask in range(1 << k):
        # mask is a downset when no point outside it lies below a point inside
        if all(not (mask >> a) & 1 or all((mask >> b) & 1 for b in range(k)
                                           if (up[b] >> a) & 1) for a in range(k)):
            count += 1
    return count


def _to_matrix(up: list[int], k: int) -> np.ndarray:
    return np.array([[(up[a] >> b) & 1 for b in range(k)] for a in range(k)], dtype=bool)


@lru_cache(maxsize=None)
def posets_with_downsets(n: int) -> tuple:
    """Posets (up to iso) whose downset lattice has exactly ``n`` elements."""
    out = []
    if n == 1:
        return (np.zeros((0, 0), dtype=bool),)
    for k in range(1, n):
        seen = set()
        for up in _natural_posets(k):
            if _count_downsets(up, k) != n:
                continue
            leq = _to_matrix(up, k)
            key = canonical_poset(leq)
            if key not in seen:
                seen.add(key)
                out.append(leq)
    return tuple(out)


def distributive_lattices(n: int) -> list[FiniteDistLattice]:
    """All distributive lattices with ``n`` elements up to isomorphism."""
    return [downset_lattice(FinitePoset(leq)) for leq in posets_with_downsets(n)]


def downset_lattice(p: FinitePoset) -> FiniteDistLattice:
    """Downsets of ``p`` under inclusion: the lattice whose join-irreducibles are ``p``."""
    dual = p.dual()
    return upsets(dual)
