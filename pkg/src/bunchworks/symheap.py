"""Symbolic heaps: satisfiability, entailment, abduction and bi-abduction.

A symbolic heap is ``E v1 ... vk. pure & spatial`` where the pure part is a
conjunction of equalities and disequalities between terms (variables or
integer constants) and the spatial part is a separating conjunction of
points-to atoms, possibly with a spatial ``top`` absorbing any leftover
heap.  Entailment is decided semantically over a bounded value domain;
without pointer arithmetic, satisfaction only depends on the equality
pattern of the store, so stores are enumerated up to renaming of
non-constant values.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import syntax as sx

Term = "str | int"


def _tkey(t):
    return (0, t, "") if isinstance(t, int) else (1, 0, t)


def _akey(a):
    return (a[0],) + tuple(_tkey(x) if not isinstance(x, tuple) else tuple(_tkey(y) for y in x) for x in a[1:])


def _render_term(t) -> str:
    return str(t)


@dataclass(frozen=True)
class SymbolicHeap:
    """``evars`` are names; atoms are ``('eq'|'neq'|'pto', a, b)`` or ``('ptol', a, (v0, ...))``."""

    evars: tuple = ()
    pure: tuple = ()
    spatial: tuple = ()
    true_spatial: bool = False

    def __post_init__(self):
        pure = []
        for a in self.pure:
            if a[0] in ("eq", "neq") and _tkey(a[2]) < _tkey(a[1]):
                a = (a[0], a[2], a[1])
            pure.append(a)
        object.__setattr__(self, "pure", tuple(sorted(set(pure), key=_akey)))
        object.__setattr__(self, "spatial", tuple(sorted(self.spatial, key=_akey)))
        object.__setattr__(self, "evars", tuple(self.evars))

    # -- views

    def terms(self) -> set:
        out = set()
        for a in self.pure + self.spatial:
            for x in a[1:]:
                if isinstance(x, tuple):
                    out.update(x)
                else:
                    out.add(x)
        return out

    def variables(self) -> set:
        return {t for t in self.terms() if isinstance(t, str)} | set(self.evars)

    def free_vars(self) -> set:
        return {t for t in self.terms() if isinstance(t, str)} - set(self.evars)

    def constants(self) -> set:
        return {t for t in self.terms() if isinstance(t, int)}

    def has_arithmetic(self) -> bool:
        return any(a[0] == "ptol" and len(a[2]) > 1 for a in self.spatial)

    def star(self, other: "SymbolicHeap") -> "SymbolicHeap":
        """Separating conjunction; bound variables of ``other`` are renamed apart."""
        other = other.rename_bound(self.variables() | self.free_vars())
        return SymbolicHeap(self.evars + other.evars, self.pure + other.pure,
                            self.spatial + other.spatial, self.true_spatial or other.true_spatial)

    def rename_bound(self, avoid: set) -> "SymbolicHeap":
        mapping = {}
        used = set(avoid) | self.free_vars()
        for v in self.evars:
            if v in avoid:
                new = v
                while new in used:
                    new += "'"
                used.add(new)
                mapping[v] = new
        return self.substitute(mapping) if mapping else self

    def substitute(self, mapping: dict) -> "SymbolicHeap":
        def t(x):
            return mapping.get(x, x) if isinstance(x, str) else x

        def atom(a):
            if a[0] == "ptol":
                return (a[0], t(a[1]), tuple(t(v) for v in a[2]))
            return (a[0], t(a[1]), t(a[2]))

        return SymbolicHeap(tuple(mapping.get(v, v) for v in self.evars), tuple(atom(a) for a in self.pure),
                            tuple(atom(a) for a in self.spatial), self.true_spatial)

    def size(self) -> tuple:
        return (len(self.spatial), len(self.pure))

    def render(self) -> str:
        pure = [f"{_render_term(a[1])} {'=' if a[0] == 'eq' else '!='} {_render_term(a[2])}" for a in self.pure]
        sp = []
        for a in self.spatial:
            if a[0] == "pto":
                sp.append(f"{_render_term(a[1])} |-> {_render_term(a[2])}")
            else:
                sp.append(f"{_render_term(a[1])} |->l [{', '.join(map(_render_term, a[2]))}]")
        if self.true_spatial:
            sp.append("top")
        body = " & ".join(pure + [" * ".join(sp) if sp else "emp"])
        if len(pure) and len(sp) > 1:
            body = " & ".join(pure + ["(" + " * ".join(sp) + ")"])
        prefix = "".join(f"E {v}. " for v in self.evars)
        return prefix + body

    def __str__(self):
        return self.render()


EMP = SymbolicHeap()


# ------------------------------------------------------------------ parsing

def _term(e):
    if isinstance(e, sx.Num):
        return e.value
    if isinstance(e, (sx.PVar, sx.AVar)):
        return e.name
    raise ValueError(f"symbolic heaps have no arithmetic: {sx.render_expr(e)}")


def from_formula(f: sx.Formula) -> SymbolicHeap:
    evars = []
    while isinstance(f, sx.Exists):
        evars.append(f.var.name)
        f = f.body
    pure, spatial = [], []
    true_spatial = False

    def conj(g):
        nonlocal true_spatial
        if isinstance(g, sx.And):
            conj(g.left)
            conj(g.right)
        elif isinstance(g, sx.Eq):
            pure.append(("eq", _term(g.left), _term(g.right)))
        elif isinstance(g, sx.Neq):
            pure.append(("neq", _term(g.left), _term(g.right)))
        elif isinstance(g, sx.Top):
            pass
        else:
            sep(g)

    def sep(g):
        nonlocal true_spatial
        if isinstance(g, sx.Fuse):
            sep(g.left)
            sep(g.right)
        elif isinstance(g, (sx.Emp, sx.One)):
            pass
        elif isinstance(g, sx.Top):
            true_spatial = True
        elif isinstance(g, sx.PointsTo):
            spatial.append(("pto", _term(g.addr), _term(g.value)))
        elif isinstance(g, sx.PointsToList):
            addr = _term(g.addr)
            vals = tuple(_term(v) for v in g.values)
            if isinstance(addr, int):
                spatial.extend(("pto", addr + i, v) for i, v in enumerate(vals))
            elif len(vals) == 1:
                spatial.append(("pto", addr, vals[0]))
            elif vals:
                spatial.append(("ptol", addr, vals))
        elif isinstance(g, (sx.Eq, sx.Neq)):
            conj(g)
        else:
            raise ValueError(f"not a symbolic heap: {sx.render(g, 'sl')}")

    conj(f)
    return SymbolicHeap(tuple(evars), tuple(pure), tuple(spatial), true_spatial)


def parse_sh(text: str) -> SymbolicHeap:
    """Parse ``"E a. x |-> a * y |-> b & x != y"`` style text."""
    return from_formula(sx.parse(text, "sl"))


def to_formula(h: SymbolicHeap) -> sx.Formula:
    def term(t):
        return sx.Num(t) if isinstance(t, int) else (sx.PVar(t) if t[:1].isupper() else sx.AVar(t))

    parts = []
    for a in h.pure:
        parts.append((sx.Eq if a[0] == "eq" else sx.Neq)(term(a[1]), term(a[2])))
    sp = []
    for a in h.spatial:
        if a[0] == "pto":
            sp.append(sx.PointsTo(term(a[1]), term(a[2])))
        else:
            sp.append(sx.PointsToList(term(a[1]), tuple(term(v) for v in a[2])))
    if h.true_spatial:
        sp.append(sx.Top())
    body = sp[0] if sp else sx.Emp()
    for s in sp[1:]:
        body = sx.Fuse(body, s)
    for p in reversed(parts):
        body = sx.And(p, body)
    for v in reversed(h.evars):
        body = sx.Exists(sx.AVar(v), body)
    return body


def as_sh(x) -> SymbolicHeap:
    if isinstance(x, SymbolicHeap):
        return x
    if isinstance(x, str):
        return parse_sh(x)
    return from_formula(x)


# ------------------------------------------------------------------ semantics

@dataclass(frozen=True)
class Bounds:
    """``domain``: number of values (None: variables + constants + 1);
    ``heap``: maximal heap size considered for spatial ``top``."""

    domain: int | None = None
    heap: int | None = None


def _domain(consts: set, nvars: int, size: int | None) -> tuple[list, list]:
    """Constants and a pool of further values (distinct from the constants)."""
    size = max(size if size is not None else nvars + len(consts) + 1, len(consts))
    pool = []
    v = 0
    while len(consts) + len(pool) < size:
        if v not in consts:
            pool.append(v)
        v += 1
    return sorted(consts), pool


def _stores(names: list, consts: list, pool: list, canonical: bool):
    """Assignments of ``names`` into constants and pool values (up to renaming of pool values)."""
    if not canonical:
        for vals in itertools.product(consts + pool, repeat=len(names)):
            yield dict(zip(names, vals))
        return

    def rec(i, used, acc):
        if i == len(names):
            yield dict(acc)
            return
        for c in consts:
            acc[names[i]] = c
            yield from rec(i + 1, used, acc)
        for k in range(min(used + 1, len(pool))):
            acc[names[i]] = pool[k]
            yield from rec(i + 1, max(used, k + 1), acc)
        acc.pop(names[i], None)

    yield from rec(0, 0, {})


def _val(t, s):
    return t if isinstance(t, int) else s[t]


def _pure_holds(h: SymbolicHeap, s: dict) -> bool:
    for a in h.pure:
        x, y = _val(a[1], s), _val(a[2], s)
        if (a[0] == "eq") != (x == y):
            return False
    return True


def _cells(h: SymbolicHeap, s: dict):
    heap = {}
    for a in h.spatial:
        if a[0] == "pto":
            items = [(_val(a[1], s), _val(a[2], s))]
        else:
            base = _val(a[1], s)
            items = [(base + i, _val(v, s)) for i, v in enumerate(a[2])]
        for loc, v in items:
            if loc in heap:
                return None
            heap[loc] = v
    return heap


def _satisfies(h: SymbolicHeap, s: dict, heap: dict, values: list) -> dict | None:
    """Witness values for the bound variables making ``(s, heap)`` satisfy ``h``."""
    names = [v for v in h.evars]
    for ev in itertools.product(values, repeat=len(names)):
        s2 = dict(s)
        s2.update(zip(names, ev))
        if not _pure_holds(h, s2):
            continue
        cells = _cells(h, s2)
        if cells is None:
            continue
        if h.true_spatial:
            if all(heap.get(k, object()) == v for k, v in cells.items()):
                return s2
        elif cells == heap:
            return s2
    return None


def models(h, bounds: Bounds = Bounds(), extra_vars=(), consts=()):
    """Yield ``(store, heap)`` pairs satisfying ``h`` (stores cover free and extra variables)."""
    h = as_sh(h)
    free = sorted(h.free_vars() | set(extra_vars))
    allc = set(consts) | h.constants()
    names = free + [v for v in h.evars if v not in free]
    canonical = not h.has_arithmetic()
    cs, pool = _domain(allc, len(names), bounds.domain)
    heap_bound = bounds.heap if bounds.heap is not None else len(h.spatial) + 2
    for s in _stores(names, cs, pool, canonical):
        if not _pure_holds(h, s):
            continue
        cells = _cells(h, s)
        if cells is None:
            continue
        store = {v: s[v] for v in free}
        if not h.true_spatial:
            yield store, cells
            continue
        values = cs + pool
        free_locs = [v for v in values if v not in cells]
        for k in range(0, max(0, heap_bound - len(cells)) + 1):
            for locs in itertools.combinations(free_locs, k):
                for vals in itertools.product(values, repeat=k):
                    extra = dict(cells)
                    extra.update(zip(locs, vals))
                    yield store, extra


def sh_sat(h, bounds: Bounds = Bounds()):
    """A model ``(store, heap)`` of ``h`` within the bounds, or ``None``."""
    for m in models(h, bounds):
        return m
    return None


@dataclass
class Entailment:
    status: str                      # valid | invalid | unknown
    counter: tuple | None = None     # (store, heap) refuting the entailment
    method: str = "semantic"
    bounds: Bounds = field(default_factory=Bounds)

    def __bool__(self):
        return self.status == "valid"


def sh_entails(H, C, method: str = "semantic", bounds: Bounds = Bounds()) -> Entailment:
    H, C = as_sh(H), as_sh(C)
    if method == "syntactic":
        return Entailment(_syntactic(H, C), None, "syntactic", bounds)
    if method != "semantic":
        raise ValueError("method must be 'semantic' or 'syntactic'")
    C = C.rename_bound(H.variables() | H.free_vars())
    extra = C.free_vars() - H.free_vars()
    consts = H.constants() | C.constants()
    nvars = len(H.variables() | C.variables())
    b = Bounds(bounds.domain if bounds.domain is not None else nvars + len(consts) + 1, bounds.heap)
    cs, pool = _domain(consts, nvars, b.domain)
    arithmetic = H.has_arithmetic() or C.has_arithmetic()
    for store, heap in models(H, b, extra, consts):
        if arithmetic:
            values = cs + pool
        else:
            used = set(store.values()) | set(heap) | set(heap.values()) | set(cs)
            fresh = [v for v in pool if v not in used][:1]
            values = sorted(used, key=_tkey) + fresh
        if _satisfies(C, store, heap, values) is None:
            return Entailment("invalid", (store, heap), "semantic", b)
    return Entailment("valid", None, "semantic", b)


# ------------------------------------------------------------------ syntactic entailment

class _UF:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # constants are preferred representatives
        if isinstance(rb, int) and not isinstance(ra, int):
            ra, rb = rb, ra
        self.parent[rb] = ra


def _syntactic(H: SymbolicHeap, C: SymbolicHeap) -> str:
    """Match-and-subtract: ``valid`` when a proof is found, otherwise ``unknown``."""
    H = H.rename_bound(C.variables() | C.free_vars())
    C = C.rename_bound(H.variables() | H.free_vars())
    uf = _UF()
    for a in H.pure:
        if a[0] == "eq":
            uf.union(a[1], a[2])
    for t in H.terms():
        uf.find(t)
    # H unsatisfiable: clashing constants, violated disequality, overlapping cells
    for t in uf.parent:
        if isinstance(t, int) and uf.find(t) != t:
            return "valid"
    distinct = set()
    for a in H.pure:
        if a[0] == "neq":
            x, y = uf.find(a[1]), uf.find(a[2])
            if x == y:
                return "valid"
            distinct.add(frozenset((x, y)))
    cells = []
    for a in H.spatial:
        if a[0] == "pto":
            cells.append(("pto", uf.find(a[1]), uf.find(a[2])))
        else:
            cells.append(("ptol", uf.find(a[1]), tuple(uf.find(v) for v in a[2])))
    addrs = [c[1] for c in cells if c[0] == "pto"]
    if len(addrs) != len(set(addrs)):
        return "valid"
    for i, x in enumerate(addrs):
        for y in addrs[i + 1:]:
            distinct.add(frozenset((x, y)))

    def known_distinct(x, y):
        if isinstance(x, int) and isinstance(y, int):
            return x != y
        return frozenset((x, y)) in distinct

    pattern = set(C.evars)

    def resolve(t, binding):
        if t in pattern:
            return binding.get(t, None)
        return uf.find(t)

    def unify(t, target, binding):
        if t in pattern:
            cur = binding.get(t)
            if cur is None:
                b2 = dict(binding)
                b2[t] = target
                return b2
            return binding if cur == target else None
        return binding if uf.find(t) == target else None

    def pure_ok(binding):
        pending = list(C.pure)
        progress = True
        while progress:
            progress = False
            rest = []
            for a in pending:
                x, y = resolve(a[1], binding), resolve(a[2], binding)
                if a[0] == "eq":
                    if x is None and y is None:
                        rest.append(a)
                        continue
                    if x is None:
                        binding = dict(binding, **{a[1]: y})
                        progress = True
                        continue
                    if y is None:
                        binding = dict(binding, **{a[2]: x})
                        progress = True
                        continue
                    if x != y:
                        return False
                else:
                    if x is None or y is None:
                        rest.append(a)
                        continue
                    if not known_distinct(x, y):
                        return False
            pending = rest
        return all(a[0] == "eq" for a in pending)

    def match(i, remaining, binding):
        if i == len(C.spatial):
            if remaining and not C.true_spatial:
                return False
            return pure_ok(binding)
        atom = C.spatial[i]
        for k, cell in enumerate(remaining):
            if cell[0] != atom[0]:
                continue
            b = unify(atom[1], cell[1], binding)
            if b is None:
                continue
            if atom[0] == "pto":
                b = unify(atom[2], cell[2], b)
            else:
                if len(atom[2]) != len(cell[2]):
                    continue
                for v, w in zip(atom[2], cell[2]):
                    if b is None:
                        break
                    b = unify(v, w, b)
            if b is not None and match(i + 1, remaining[:k] + remaining[k + 1:], b):
                return True
        return False

    if H.true_spatial and not C.true_spatial:
        return "unknown"
    return "valid" if match(0, cells, {}) else "unknown"


# ------------------------------------------------------------------ abduction

@dataclass(frozen=True)
class SearchSpace:
    """Candidate antiframes or frames: up to ``max_spatial`` points-to atoms and
    ``max_pure`` pure atoms over the given terms plus ``fresh`` new variables."""

    max_spatial: int = 3
    max_pure: int = 0
    fresh: int = 2
    true_spatial: bool = False
    max_candidates: int = 200_000


def _fresh_names(avoid: set, k: int) -> list[str]:
    out = []
    i = 0
    while len(out) < k:
        name = f"v{i}"
        if name not in avoid:
            out.append(name)
        i += 1
    return out


def _candidates(terms: list, space: SearchSpace, spatial_sizes):
    pto = [("pto", a, b) for a in terms for b in terms]
    pure = [(op, a, b) for i, a in enumerate(terms) for b in terms[i + 1:] for op in ("eq", "neq")]
    count = 0
    for k in spatial_sizes:
        for p in range(space.max_pure + 1):
            batch = []
            for sp in itertools.combinations_with_replacement(pto, k):
                for pu in itertools.combinations(pure, p):
                    for top in ([False, True] if space.true_spatial else [False]):
                        batch.append(SymbolicHeap((), pu, sp, top))
            batch.sort(key=lambda h: (h.true_spatial, h.render()))
            for h in batch:
                count += 1
                if count > space.max_candidates:
                    return
                yield h


def _terms_of(*heaps) -> list:
    ts = set()
    for h in heaps:
        ts |= h.free_vars() | h.constants()
    return sorted(ts, key=_tkey)


def _sub_multiset(a: tuple, b: tuple) -> bool:
    """Is ``a`` a strict sub-multiset of ``b``?"""
    if len(a) >= len(b):
        return False
    rest = list(b)
    for x in a:
        if x in rest:
            rest.remove(x)
        else:
            return False
    return True


def _spatial_sizes(H, C, frame_len, space):
    """Spatial sizes an antiframe can have: exact heaps force a cell count."""
    if C.true_spatial or space.true_spatial or H.has_arithmetic() or C.has_arithmetic():
        return range(space.max_spatial + 1)
    k = len(C.spatial) + frame_len - len(H.spatial)
    return [k] if 0 <= k <= space.max_spatial else []


def abduce(H, C, space: SearchSpace = SearchSpace(), bounds: Bounds = Bounds()) -> list[SymbolicHeap]:
    """Minimal antiframes ``a`` with ``H * a`` satisfiable and ``H * a |= C``."""
    H, C = as_sh(H), as_sh(C)
    terms = _terms_of(H, C)
    terms += _fresh_names(H.variables() | C.variables(), space.fresh)
    out = []
    for k in _spatial_sizes(H, C, 0, space):
        for a in _candidates(terms, space, [k]):
            if any(_sub_multiset(b.spatial, a.spatial) for b in out):
                continue
            Ha = H.star(a)
            if sh_sat(Ha, bounds) is None:
                continue
            if sh_entails(Ha, C, "semantic", bounds):
                out.append(a)
        # the smallest spatial size with a solution is where minimal ones live
        if out:
            break
    return out


@dataclass
class BiabductionSolution:
    antiframe: SymbolicHeap
    frame: SymbolicHeap
    bounds: Bounds

    def to_json(self) -> dict:
        return {"antiframe": self.antiframe.render(), "frame": self.frame.render(),
                "certificate": {"domain": self.bounds.domain, "heap": self.bounds.heap}}


def biabduce(H, C, anti_space: SearchSpace = SearchSpace(), frame_space: SearchSpace | None = None,
             bounds: Bounds = Bounds(), limit: int | None = None) -> list[BiabductionSolution]:
    """Pairs (antiframe, frame) with ``H * antiframe |= C * frame``, minimal antiframes first."""
    H, C = as_sh(H), as_sh(C)
    frame_space = frame_space or SearchSpace(anti_space.max_spatial, 0, 0)
    terms = _terms_of(H, C)
    anti_terms = terms + _fresh_names(H.variables() | C.variables(), anti_space.fresh)
    found: list[BiabductionSolution] = []
    unlimited = C.true_spatial or H.has_arithmetic() or C.has_arithmetic()
    # antiframes by size; the frame size is then forced (or free with spatial top)
    for ka in range(anti_space.max_spatial + 1):
        for a in _candidates(anti_terms, SearchSpace(anti_space.max_spatial, anti_space.max_pure,
                                                      anti_space.fresh, anti_space.true_spatial,
                                                      anti_space.max_candidates), [ka]):
            if any(_sub_multiset(s.antiframe.spatial, a.spatial) for s in found):
                continue
            Ha = H.star(a)
            if sh_sat(Ha, bounds) is None:
                continue
            if unlimited or a.true_spatial:
                sizes = range(frame_space.max_spatial + 1)
            else:
                kf = len(H.spatial) + ka - len(C.spatial)
                sizes = [kf] if 0 <= kf <= frame_space.max_spatial else []
            frames = []
            for kf in sizes:
                for f in _candidates(terms, frame_space, [kf]):
                    if sh_entails(Ha, C.star(f), "semantic", bounds):
                        frames.append(f)
                if frames:
                    break
            for f in frames:
                found.append(BiabductionSolution(a, f, _effective(Ha, C.star(f), bounds)))
                if limit is not None and len(found) >= limit:
                    return found
        if found:
            break
    return found


def _effective(H, C, bounds: Bounds) -> Bounds:
    consts = H.constants() | C.constants()
    nvars = len(H.variables() | C.variables())
    return Bounds(bounds.domain if bounds.domain is not None else nvars + len(consts) + 1,
                  bounds.heap)


def frame_infer(H, C, space: SearchSpace = SearchSpace(), bounds: Bounds = Bounds()) -> SymbolicHeap | None:
    """Minimal frame ``f`` with ``H |= C * f`` (no antiframe), or ``None``."""
    H, C = as_sh(H), as_sh(C)
    terms = _terms_of(H, C)
    if sh_sat(H, bounds) is None:
        return None
    for f in _candidates(terms, SearchSpace(space.max_spatial, space.max_pure, 0, space.true_spatial,
                                            space.max_candidates),
                         _spatial_sizes(C, H, 0, space)):
        if sh_entails(H, C.star(f), "semantic", bounds):
            return f
    return None


AntiframeSpace = SearchSpace
FrameSpace = SearchSpace
