"""Brute-force reference implementations used to cross-check the library.

Nothing here goes through normal forms, proof search or the symmetry
reductions of the symbolic-heap oracle; each check is a direct reading of
the definitions over small finite structures.
"""
from __future__ import annotations

import itertools
import random

import numpy as np

from bunchworks import syntax as sx
from bunchworks.syntax import And, Bot, Fuse, Imp, LRes, One, Or, RRes, Top, Var


# ------------------------------------------------------------------ algebra evaluation

def evaluate(alg, f, env: dict):
    """Term value computed straight from the operation tables; ``env`` values
    may be integer arrays, evaluated elementwise."""
    if isinstance(f, Var):
        return env[f.name]
    if isinstance(f, Top):
        return alg.top
    if isinstance(f, Bot):
        return alg.bot
    if isinstance(f, One):
        return alg.unit
    a, b = evaluate(alg, f.left, env), evaluate(alg, f.right, env)
    table = {And: alg.meet, Or: alg.join, Fuse: alg.mult, Imp: alg.imp,
             LRes: alg.lres, RRes: alg.rres}[type(f)]
    return table[a, b]


def leq(alg, f, g, env):
    return alg.leq[evaluate(alg, f, env), evaluate(alg, g, env)]


def holds_everywhere(alg, f, g) -> bool:
    names = sorted(sx.prop_vars(f) | sx.prop_vars(g))
    grid = np.indices((alg.n,) * len(names)).reshape(len(names), -1)
    return bool(np.all(leq(alg, f, g, dict(zip(names, grid)))))


def residuals_bruteforce(alg):
    """Left and right residual tables as maxima of the defining sets."""
    n = alg.n
    lres = [[None] * n for _ in range(n)]
    rres = [[None] * n for _ in range(n)]
    for x in range(n):
        for z in range(n):
            ys = [y for y in range(n) if alg.leq[alg.mult[x, y], z]]
            lres[x][z] = next(y for y in ys if all(alg.leq[w, y] for w in ys))
            ws = [w for w in range(n) if alg.leq[alg.mult[w, x], z]]
            rres[z][x] = next(y for y in ws if all(alg.leq[w, y] for w in ws))
    return lres, rres


# ------------------------------------------------------------------ random terms

CONNECTIVES = (And, Or, Imp, Fuse, LRes, RRes)


def random_formula(rng: random.Random, names=("x", "y", "z"), depth: int = 2):
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.08:
            return rng.choice([Top(), Bot(), One()])
        return Var(rng.choice(names))
    op = rng.choice(CONNECTIVES)
    return op(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))


def random_context(rng: random.Random, names=("x", "y", "z"), depth: int = 2):
    """A one-hole context whose path to the hole uses only fusion and meet."""
    steps = []
    for _ in range(rng.randint(0, depth)):
        side = random_formula(rng, names, 1)
        steps.append((rng.choice((Fuse, And)), rng.random() < 0.5, side))

    def plug(f):
        for op, hole_left, side in steps:
            f = op(f, side) if hole_left else op(side, f)
        return f
    return plug


# ------------------------------------------------------------------ rule schemas as quasiequations
# Each entry returns (premises, conclusion), every item a pair (lhs, rhs).

def _rules():
    def axiom_id(r, g):
        x = g()
        return [], (x, x)

    def axiom_bot(r, g):
        u = g.ctx()
        return [], (u(Bot()), g())

    def axiom_top(r, g):
        return [], (g(), Top())

    def and_idem(r, g):
        u, x, y = g.ctx(), g(), g()
        return [(u(And(x, x)), y)], (u(x), y)

    def and_l1(r, g):
        u, x, y, z = g.ctx(), g(), g(), g()
        return [(u(x), z)], (u(And(x, y)), z)

    def and_l2(r, g):
        u, x, y, z = g.ctx(), g(), g(), g()
        return [(u(y), z)], (u(And(x, y)), z)

    def and_r(r, g):
        x, y, z = g(), g(), g()
        return [(x, y), (x, z)], (x, And(y, z))

    def or_l(r, g):
        u, x, y, z = g.ctx(), g(), g(), g()
        return [(u(x), z), (u(y), z)], (u(Or(x, y)), z)

    def or_r1(r, g):
        x, y, z = g(), g(), g()
        return [(x, y)], (x, Or(y, z))

    def or_r2(r, g):
        x, y, z = g(), g(), g()
        return [(x, z)], (x, Or(y, z))

    def lres_l(r, g):
        u, x, y, z, w = g.ctx(), g(), g(), g(), g()
        return [(x, y), (u(z), w)], (u(Fuse(x, LRes(y, z))), w)

    def lres_r(r, g):
        x, y, z = g(), g(), g()
        return [(Fuse(x, y), z)], (y, LRes(x, z))

    def rres_l(r, g):
        u, x, y, z, w = g.ctx(), g(), g(), g(), g()
        return [(x, y), (u(z), w)], (u(Fuse(RRes(z, y), x)), w)

    def rres_r(r, g):
        x, y, z = g(), g(), g()
        return [(Fuse(x, y), z)], (x, RRes(z, y))

    def fuse_lr(r, g):
        x, y, z, w = g(), g(), g(), g()
        return [(x, y), (z, w)], (Fuse(x, z), Fuse(y, w))

    def imp_l(r, g):
        u, x, y, z, w = g.ctx(), g(), g(), g(), g()
        return [(x, y), (u(z), w)], (u(And(x, Imp(y, z))), w)

    def imp_r(r, g):
        x, y, z = g(), g(), g()
        return [(And(x, y), z)], (y, Imp(x, z))

    return {"id": axiom_id, "bot": axiom_bot, "top": axiom_top, "and-idem": and_idem,
            "and-l1": and_l1, "and-l2": and_l2, "and-r": and_r, "or-l": or_l,
            "or-r1": or_r1, "or-r2": or_r2, "lres-l": lres_l, "lres-r": lres_r,
            "rres-l": rres_l, "rres-r": rres_r, "fuse-lr": fuse_lr, "imp-l": imp_l,
            "imp-r": imp_r}


RULE_SCHEMAS = _rules()


class TermSource:
    """Draws metavariable and context instances."""

    def __init__(self, rng: random.Random, names=("x", "y", "z"), depth: int = 2):
        self.rng, self.names, self.depth = rng, names, depth

    def __call__(self):
        return random_formula(self.rng, self.names, self.rng.randint(0, self.depth))

    def ctx(self):
        return random_context(self.rng, self.names, 2)


def quasiequation_violations(alg, rule: str, trials: int, seed: int = 0) -> tuple[int, int]:
    """Instantiate ``rule`` ``trials`` times and test each instance under every
    assignment; returns (violating points, points where all premises held)."""
    rng = random.Random(seed)
    src = TermSource(rng)
    grid = np.indices((alg.n,) * len(src.names)).reshape(len(src.names), -1)
    env = dict(zip(src.names, grid))
    bad = fired = 0
    for _ in range(trials):
        prem, concl = RULE_SCHEMAS[rule](rng, src)
        ok = np.ones(grid.shape[1], dtype=bool)
        for a, b in prem:
            ok &= leq(alg, a, b, env)
        fired += int(ok.sum())
        bad += int((ok & ~leq(alg, *concl, env)).sum())
    return bad, fired


# ------------------------------------------------------------------ symbolic heaps

def _value(t, s):
    return t if isinstance(t, int) else s[t]


def _heap_of(h, s):
    heap = {}
    for a in h.spatial:
        if a[0] == "pto":
            cells = [(_value(a[1], s), _value(a[2], s))]
        else:
            cells = [(_value(a[1], s) + i, _value(v, s)) for i, v in enumerate(a[2])]
        for loc, v in cells:
            if loc in heap:
                return None
            heap[loc] = v
    return heap


def sh_holds(h, store: dict, heap: dict, values) -> bool:
    """Does ``(store, heap)`` satisfy the symbolic heap ``h``?"""
    for ev in itertools.product(values, repeat=len(h.evars)):
        s = dict(store)
        s.update(zip(h.evars, ev))
        if not all((a[0] == "eq") == (_value(a[1], s) == _value(a[2], s)) for a in h.pure):
            continue
        cells = _heap_of(h, s)
        if cells is None:
            continue
        if h.true_spatial:
            if all(heap.get(k) == v and k in heap for k, v in cells.items()):
                return True
        elif cells == heap:
            return True
    return False


def sh_values(consts, size: int) -> list:
    out = sorted(consts)
    v = 0
    while len(out) < size:
        if v not in consts:
            out.append(v)
        v += 1
    return out


def sh_entails_bruteforce(H, C, size: int) -> bool:
    """Every store over the value set and every heap that ``H`` pins down.

    ``H`` here is free of spatial top, so the heaps satisfying it are exactly
    those its atoms produce under some witness for its bound variables."""
    assert not H.true_spatial
    free = sorted((H.free_vars() | C.free_vars()) - set(H.evars) - set(C.evars))
    values = sh_values(H.constants() | C.constants(), size)
    for vals in itertools.product(values, repeat=len(free)):
        store = dict(zip(free, vals))
        for ev in itertools.product(values, repeat=len(H.evars)):
            s = dict(store)
            s.update(zip(H.evars, ev))
            if not all((a[0] == "eq") == (_value(a[1], s) == _value(a[2], s)) for a in H.pure):
                continue
            heap = _heap_of(H, s)
            if heap is None:
                continue
            if not sh_holds(C, store, heap, values):
                return False
    return True


def sh_sat_bruteforce(H, size: int) -> bool:
    free = sorted(H.free_vars())
    values = sh_values(H.constants(), size)
    for vals in itertools.product(values, repeat=len(free) + len(H.evars)):
        s = dict(zip(free + list(H.evars), vals))
        if all((a[0] == "eq") == (_value(a[1], s) == _value(a[2], s)) for a in H.pure) \
                and _heap_of(H, s) is not None:
            return True
    return False


# ------------------------------------------------------------------ words and languages

def words(alphabet, max_len: int):
    for k in range(max_len + 1):
        for w in itertools.product(alphabet, repeat=k):
            yield "".join(w)


def concat_bruteforce(K: set, L: set, max_len: int) -> set:
    return {u + v for u in K for v in L if len(u + v) <= max_len}


# ------------------------------------------------------------------ algebra axioms

def gbi_violations(alg) -> list[str]:
    """Every defining law of a GBI-algebra, checked over all triples."""
    n, le = alg.n, alg.leq
    x, y, z = np.ix_(range(n), range(n), range(n))
    out = []
    if not (le.diagonal().all() and not (le & le.T & ~np.eye(n, dtype=bool)).any()
            and (le[x, y] & le[y, z] <= le[x, z]).all()):
        out.append("partial order")
    mt, jn = alg.meet, alg.join
    glb_ok = (le[mt, np.arange(n)[None, :]].all() and le[mt, np.arange(n)[:, None]].all()
              and ((le[x, y] & le[x, z]) <= le[x, mt[y, z]]).all())
    lub_ok = (le[np.arange(n)[None, :], jn].all() and le[np.arange(n)[:, None], jn].all()
              and ((le[y, x] & le[z, x]) <= le[jn[y, z], x]).all())
    if not (glb_ok and lub_ok):
        out.append("lattice")
    if not (alg.meet[x, alg.join[y, z]] == alg.join[alg.meet[x, y], alg.meet[x, z]]).all():
        out.append("distributivity")
    m = alg.mult
    if not (m[m[x, y], z] == m[x, m[y, z]]).all():
        out.append("associativity")
    if not ((m[alg.unit] == np.arange(n)).all() and (m[:, alg.unit] == np.arange(n)).all()):
        out.append("unit")
    if not (le[m[x, y], z] == le[y, alg.lres[x, z]]).all():
        out.append("left residuation")
    if not (le[m[x, y], z] == le[x, alg.rres[z, y]]).all():
        out.append("right residuation")
    if not (le[alg.meet[x, y], z] == le[y, alg.imp[x, z]]).all():
        out.append("heyting residuation")
    if not (le[alg.bot].all() and le[:, alg.top].all()):
        out.append("bounds")
    return out
