"""Congruences, subalgebras, isomorphisms, varieties and constructions."""
from __future__ import annotations

import numpy as np

from .algebra import FiniteGBIAlgebra
from .lattice import FiniteDistLattice

OPERATIONS = ("meet", "join", "imp", "mult", "lres", "rres")


# ---------------------------------------------------------------- congruences

def _compatible(alg: FiniteGBIAlgebra, cls: np.ndarray) -> bool:
    """Is the partition with class labels ``cls`` compatible with every operation?"""
    n = alg.n
    for op in OPERATIONS:
        t = alg.table(op)
        # the class of t[x, y] may only depend on the classes of x and y
        img = cls[t]
        seen: dict = {}
        for x in range(n):
            for y in range(n):
                key = (cls[x], cls[y])
                v = img[x, y]
                if seen.setdefault(key, v) != v:
                    return False
    return True


def filter_congruence(alg: FiniteGBIAlgebra, a: int) -> np.ndarray:
    """Class labels of the relation induced by the filter generated by ``a``:
    ``x ~ y`` iff ``x -> y`` and ``y -> x`` are both above ``a``."""
    above = alg.leq[a]
    rel = above[alg.imp] & above[alg.imp.T]
    cls = np.empty(alg.n, dtype=np.int64)
    for x in range(alg.n):
        cls[x] = int(np.flatnonzero(rel[x])[0])
    return cls


def congruences(alg: FiniteGBIAlgebra) -> list[np.ndarray]:
    """All congruences, as class-label arrays (each class labelled by its least index).

    Congruences correspond to lattice filters, all principal here; a filter
    qualifies when its induced relation respects the monoid operations too.
    """
    out = []
    seen = set()
    for a in range(alg.n):
        cls = filter_congruence(alg, a)
        key = tuple(cls)
        if key in seen:
            continue
        if _compatible(alg, cls):
            seen.add(key)
            out.append(cls)
    out.sort(key=lambda c: (len(set(c.tolist())) * -1, tuple(c)))
    return out


def congruences_bruteforce(alg: FiniteGBIAlgebra) -> list[tuple]:
    """Every compatible equivalence relation, by enumerating set partitions."""
    n = alg.n
    out = []

    def partitions(i, labels, k):
        if i == n:
            yield list(labels)
            return
        for c in range(k + 1):
            labels.append(c)
            yield from partitions(i + 1, labels, max(k, c + 1))
            labels.pop()

    for labels in partitions(0, [], 0):
        cls = np.array(labels)
        if _compatible(alg, cls):
            canon = np.array([min(i for i in range(n) if labels[i] == labels[x]) for x in range(n)])
            out.append(tuple(canon))
    return sorted(out)


def _refines(a: np.ndarray, b: np.ndarray) -> bool:
    """Every class of ``a`` lies inside a class of ``b``."""
    return all(b[x] == b[y] for x in range(len(a)) for y in range(len(a)) if a[x] == a[y])


def is_subdirectly_irreducible(alg: FiniteGBIAlgebra) -> bool:
    if alg.n < 2:
        return False
    nontrivial = [c for c in congruences(alg) if len(set(c.tolist())) < alg.n]
    minimal = [c for c in nontrivial if not any(_refines(d, c) and tuple(d) != tuple(c) for d in nontrivial)]
    return len(minimal) == 1


def is_simple(alg: FiniteGBIAlgebra) -> bool:
    return alg.n >= 2 and len(congruences(alg)) == 2


def generated_subalgebra(alg: FiniteGBIAlgebra, gens=()) -> set[int]:
    """Closure of ``gens`` and the constants under all operations."""
    S = {alg.bot, alg.top, alg.unit} | set(int(g) for g in gens)
    tables = [alg.table(op) for op in OPERATIONS]
    changed = True
    while changed:
        changed = False
        items = sorted(S)
        for t in tables:
            for x in items:
                for y in items:
                    v = int(t[x, y])
                    if v not in S:
                        S.add(v)
                        changed = True
    return S


def has_proper_subalgebra(alg: FiniteGBIAlgebra) -> bool:
    return len(generated_subalgebra(alg)) < alg.n


def is_strictly_simple(alg: FiniteGBIAlgebra) -> bool:
    return is_simple(alg) and not has_proper_subalgebra(alg)


# ---------------------------------------------------------------- isomorphism

def find_isomorphism(a: FiniteGBIAlgebra, b: FiniteGBIAlgebra):
    """A bijection ``f`` with ``f(a-structure) = b-structure``, or ``None``."""
    if a.n != b.n or a.is_commutative() != b.is_commutative():
        return None
    n = a.n
    deg_a = [(int(a.leq[:, x].sum()), int(a.leq[x].sum()), x == a.unit) for x in range(n)]
    deg_b = [(int(b.leq[:, x].sum()), int(b.leq[x].sum()), x == b.unit) for x in range(n)]
    if sorted(deg_a) != sorted(deg_b):
        return None
    f = [-1] * n
    used = [False] * n

    def ok(x):
        for y in range(x + 1):
            if f[y] < 0:
                continue
            if a.leq[x, y] != b.leq[f[x], f[y]] or a.leq[y, x] != b.leq[f[y], f[x]]:
                return False
            for (p, q) in ((x, y), (y, x)):
                r = a.mult[p, q]
                if f[r] >= 0 and b.mult[f[p], f[q]] != f[r]:
                    return False
        return True

    def rec(x):
        if x == n:
            return all(b.mult[f[p], f[q]] == f[a.mult[p, q]] for p in range(n) for q in range(n))
        for y in range(n):
            if not used[y] and deg_a[x] == deg_b[y]:
                f[x] = y
                used[y] = True
                if ok(x) and rec(x + 1):
                    return True
                f[x] = -1
                used[y] = False
        return False

    return list(f) if rec(0) else None


def is_isomorphic(a: FiniteGBIAlgebra, b: FiniteGBIAlgebra) -> bool:
    return find_isomorphism(a, b) is not None


# ---------------------------------------------------------------- varieties

def _pairs(n):
    g = np.indices((n, n)).reshape(2, -1)
    return g[0], g[1]


def _triples(n):
    g = np.indices((n, n, n)).reshape(3, -1)
    return g[0], g[1], g[2]


def _commutative(A):
    return A.is_commutative()


def _integral(A):
    return A.unit == A.top


def _boolean(A):
    x = np.arange(A.n)
    return bool((A.neg(A.neg(x)) == x).all())


def _prelinear(A):
    x, y = _pairs(A.n)
    return bool((A.join[A.imp[x, y], A.imp[y, x]] == A.top).all())


def _idempotent_meet(A):
    return bool((A.mult == A.meet).all())


def _divisible(A):
    x, y = _pairs(A.n)
    return bool((A.meet[x, y] == A.mult[A.rres[x, y], y]).all())


def _involutive_wand(A):
    x = np.arange(A.n)
    nx = A.lres[x, A.bot]
    return bool((A.lres[nx, A.bot] == x).all())


def _tri(A, x, y):
    """``x |> y = not(x \\ not y)``."""
    return A.neg(A.lres[x, A.neg(y)])


def _euclidean(A):
    x, y, z = _triples(A.n)
    lhs = A.mult[_tri(A, x, y), z]
    rhs = _tri(A, x, A.mult[y, z])
    return bool(A.leq[lhs, rhs].all())


def _ra_law(A):
    x, y = _pairs(A.n)
    return bool((_tri(A, x, y) == A.mult[_tri(A, x, A.unit), y]).all())


def _symmetric(A):
    x = np.arange(A.n)
    return bool((_tri(A, x, A.unit) == x).all())


LAWS = {
    "commutative": _commutative,
    "integral": _integral,
    "boolean": _boolean,
    "prelinear": _prelinear,
    "meet-fusion": _idempotent_meet,
    "divisible": _divisible,
    "involutive-wand": _involutive_wand,
    "euclidean": _euclidean,
    "relation-algebra": _ra_law,
    "symmetric": _symmetric,
}

# each variety as the set of laws it adds to the GBI axioms
VARIETY_LAWS = {
    "GBI": (),
    "BI": ("commutative",),
    "GBI_w": ("integral",),
    "BI_w": ("commutative", "integral"),
    "BGBI": ("boolean",),
    "BBI": ("boolean", "commutative"),
    "LGBI": ("prelinear",),
    "LBI": ("prelinear", "commutative"),
    "LGBI_w": ("prelinear", "integral"),
    "LBI_w": ("prelinear", "integral", "commutative"),
    "BLBI": ("commutative", "prelinear", "integral", "divisible"),
    "MVBI": ("commutative", "prelinear", "integral", "divisible", "involutive-wand"),
    "HA": ("meet-fusion",),
    "GA": ("meet-fusion", "prelinear"),
    "BA": ("meet-fusion", "boolean"),
    "SeA": ("boolean", "euclidean"),
    "RA": ("boolean", "euclidean", "relation-algebra"),
    "CRA": ("boolean", "euclidean", "relation-algebra", "commutative"),
    "SRA": ("boolean", "euclidean", "relation-algebra", "symmetric"),
}

# inclusions between the identity-defined varieties (smaller, larger)
VARIETY_EDGES = [
    ("BI", "GBI"), ("GBI_w", "GBI"), ("BI_w", "BI"), ("BI_w", "GBI_w"),
    ("BGBI", "GBI"), ("BBI", "BGBI"), ("BBI", "BI"), ("LGBI", "GBI"), ("LBI", "LGBI"),
    ("LBI", "BI"), ("LGBI_w", "LGBI"), ("LGBI_w", "GBI_w"), ("LBI_w", "LGBI_w"),
    ("LBI_w", "LBI"), ("LBI_w", "BI_w"), ("BLBI", "LBI_w"), ("MVBI", "BLBI"),
    ("HA", "BI_w"), ("GA", "HA"), ("GA", "BLBI"), ("BA", "GA"), ("BA", "MVBI"),
    ("SeA", "BGBI"), ("RA", "SeA"), ("CRA", "RA"), ("CRA", "BBI"), ("SRA", "CRA"),
    ("BA", "SRA"), ("O", "BA"),
]


def satisfies(alg: FiniteGBIAlgebra, law: str) -> bool:
    return LAWS[law](alg)


def classify(alg: FiniteGBIAlgebra) -> list[str]:
    """Names of the identity-defined varieties that contain ``alg``."""
    cache = {law: fn(alg) for law, fn in LAWS.items()}
    out = [name for name, laws in VARIETY_LAWS.items() if all(cache[l] for l in laws)]
    if alg.n == 1:
        out.append("O")
    return out


def describe(alg: FiniteGBIAlgebra) -> dict:
    return {
        "n": alg.n,
        "varieties": classify(alg),
        "congruences": len(congruences(alg)),
        "subdirectly_irreducible": is_subdirectly_irreducible(alg),
        "simple": is_simple(alg),
        "strictly_simple": is_strictly_simple(alg),
    }


# ---------------------------------------------------------------- constructions

def ordinal_sum(lower: FiniteGBIAlgebra, upper: FiniteGBIAlgebra, name=None) -> FiniteGBIAlgebra:
    """Stack ``upper`` on ``lower``, identifying the top of ``lower`` with the
    bottom of ``upper``.  Only defined when ``lower`` is integral."""
    if lower.unit != lower.top:
        raise ValueError("ordinal sum is implemented only for a lower algebra with unit = top")
    lo = [x for x in range(lower.n)]
    hi = [y for y in range(upper.n) if y != upper.bot]
    n = len(lo) + len(hi)
    # element ids: lower x -> x, upper y -> len(lo) + hi.index(y); upper bottom -> lower top
    def up(y):
        return lower.top if y == upper.bot else len(lo) + hi.index(y)
    leq = np.zeros((n, n), dtype=bool)
    leq[:len(lo), :len(lo)] = lower.leq
    for y in range(upper.n):
        for z in range(upper.n):
            leq[up(y), up(z)] = upper.leq[y, z]
    leq[:len(lo), len(lo):] = True
    mult = np.zeros((n, n), dtype=np.int64)
    mult[:len(lo), :len(lo)] = lower.mult
    for y in range(upper.n):
        for z in range(upper.n):
            mult[up(y), up(z)] = up(int(upper.mult[y, z]))
    for x in range(len(lo)):
        if x == lower.top:
            continue
        for y in hi:
            mult[x, up(y)] = x
            mult[up(y), x] = x
    labels = [f"{l}" for l in lower.labels] + [f"{upper.labels[y]}'" for y in hi]
    lat = FiniteDistLattice(leq, labels)
    return FiniteGBIAlgebra(lat, mult, up(upper.unit), name)


def add_top(alg: FiniteGBIAlgebra, name=None) -> FiniteGBIAlgebra:
    """Adjoin a new top ``t`` with ``t . a = a = a . t`` for ``a != 1`` and ``t . 1 = t``."""
    n = alg.n + 1
    t = alg.n
    leq = np.zeros((n, n), dtype=bool)
    leq[:t, :t] = alg.leq
    leq[:, t] = True
    mult = np.zeros((n, n), dtype=np.int64)
    mult[:t, :t] = alg.mult
    for a in range(t):
        mult[t, a] = mult[a, t] = t if a == alg.unit else a
    mult[t, t] = t
    lat = FiniteDistLattice(leq, list(alg.labels) + ["top'"])
    return FiniteGBIAlgebra(lat, mult, alg.unit, name)


def direct_product(a: FiniteGBIAlgebra, b: FiniteGBIAlgebra, name=None) -> FiniteGBIAlgebra:
    n = a.n * b.n
    idx = lambda x, y: x * b.n + y
    leq = np.zeros((n, n), dtype=bool)
    mult = np.zeros((n, n), dtype=np.int64)
    for x1 in range(a.n):
        for y1 in range(b.n):
            for x2 in range(a.n):
                for y2 in range(b.n):
                    leq[idx(x1, y1), idx(x2, y2)] = a.leq[x1, x2] and b.leq[y1, y2]
                    mult[idx(x1, y1), idx(x2, y2)] = idx(a.mult[x1, x2], b.mult[y1, y2])
    labels = [f"({p},{q})" for p in a.labels for q in b.labels]
    lat = FiniteDistLattice(leq, labels)
    return FiniteGBIAlgebra(lat, mult, idx(a.unit, b.unit), name)
