"""Cut-free proof search for inequations ``s <= t`` of bunched logics.

Sequents are pairs of normal forms.  The left-hand side is a bunch: rules
act on any subterm reachable from the root through fusion and meet only.
Modes:

``gbi``   associative, noncommutative fusion (sequences)
``bi``    commutative fusion (multisets); ``-*`` is the only residual
``ngbi``  non-associative fusion (binary trees)

The search applies axioms first, then the invertible rules (right rules
for ``&``, ``->``, ``\\``, ``/`` and the left rule for ``|``) without
backtracking over them, then tries the remaining rules in a fixed order.
Failures are cached only when no loop check or depth cut contributed to
them, so ``NotProvable`` means the finite search space was exhausted.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from . import syntax as sx
from .syntax import BOT, ONE, TOP, Bunch, and_items, bunch_decompositions, fuse_items, mk_and, mk_or, or_items

RULES = ("id", "bot_l", "top_r", "and_idem", "and_l", "and_r", "or_l", "or_r",
         "lres_l", "lres_r", "rres_l", "rres_r", "fuse_lr", "imp_l", "imp_r", "cut")
DEFAULT_CAP = 3


# ------------------------------------------------------------------ data

@dataclass(frozen=True)
class Sequent:
    lhs: tuple
    rhs: tuple

    def render(self, dialect: str = "gbi") -> str:
        return f"{sx.render_nf(self.lhs, dialect)} <= {sx.render_nf(self.rhs, dialect)}"


@dataclass(frozen=True)
class RuleInstance:
    rule: str
    premises: tuple          # of Sequent
    contract: bool = False   # meet-contraction of the principal bunch first


@dataclass(frozen=True)
class ProofTree:
    sequent: Sequent
    rule: str
    premises: tuple = ()

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def rules_used(self) -> set[str]:
        out = {self.rule}
        for p in self.premises:
            out |= p.rules_used()
        return out

    def render(self, dialect: str = "gbi", indent: int = 0) -> str:
        line = "  " * indent + f"{self.sequent.render(dialect)}   [{self.rule}]"
        return "\n".join([line] + [p.render(dialect, indent + 1) for p in self.premises])

    def to_json(self, dialect: str = "gbi") -> dict:
        return {"lhs": sx.render_nf(self.sequent.lhs, dialect),
                "rhs": sx.render_nf(self.sequent.rhs, dialect),
                "rule": self.rule,
                "premises": [p.to_json(dialect) for p in self.premises]}


@dataclass
class Proved:
    tree: ProofTree
    stats: dict = field(default_factory=dict)
    status = "proved"


@dataclass
class NotProvable:
    countermodel: object = None      # (algebra, assignment) when one was found
    stats: dict = field(default_factory=dict)
    status = "not_provable"


@dataclass
class BudgetExhausted:
    stats: dict = field(default_factory=dict)
    status = "budget_exhausted"


def make_sequent(lhs, rhs=None, mode: str = "gbi") -> Sequent:
    """Build a sequent from formulas, normal forms or text (``"s <= t"``)."""
    if rhs is None:
        if isinstance(lhs, Sequent):
            return lhs
        dialect = "bi" if mode == "bi" else "gbi"
        try:
            a, b = sx.parse_sequent(lhs, dialect)
        except sx.DialectError:
            a, b = sx.parse_sequent(lhs, "gbi")
        return Sequent(sx.normalize(a, mode), sx.normalize(b, mode))
    return Sequent(_nf(lhs, mode), _nf(rhs, mode))


def _nf(t, mode):
    if isinstance(t, tuple):
        return t
    if isinstance(t, str):
        try:
            t = sx.parse(t, "bi" if mode == "bi" else "gbi")
        except sx.DialectError:
            t = sx.parse(t, "gbi")
    return sx.normalize(t, mode)


def theorem_sequent(f, mode: str = "gbi") -> Sequent:
    """``top <= f``: the sequent form of theoremhood."""
    return Sequent(TOP, _nf(f, mode))


# ------------------------------------------------------------------ helpers

def _fuse(items, mode):
    if mode == "ngbi":
        out = ONE
        for t in items:
            out = sx.mk_fuse2(out, t)
        return out
    return sx.mk_fuse(list(items), mode)


def _cap_ok(t: tuple, cap: int) -> bool:
    tag = t[0]
    if tag == "and":
        items = t[1]
        for x in set(items):
            if items.count(x) > cap:
                return False
    if tag in ("and", "or", "fuse"):
        return all(_cap_ok(x, cap) for x in t[1])
    if tag in ("imp", "lres", "rres"):
        return _cap_ok(t[1], cap) and _cap_ok(t[2], cap)
    return True


def _fuse_views(t: tuple, mode: str) -> list[tuple[tuple, tuple]]:
    """Ways of reading ``t`` as a product ``x . z`` (unit views included)."""
    if mode == "ngbi":
        out = []
        if t[0] == "fuse":
            out.append(t[1])
        out += [(t, ONE), (ONE, t)]
        return out
    items = fuse_items(t)
    if mode == "gbi":
        return [(_fuse(items[:i], mode), _fuse(items[i:], mode)) for i in range(len(items) + 1)]
    seen = set()
    out = []
    for k in range(len(items) + 1):
        for idx in itertools.combinations(range(len(items)), k):
            left = tuple(items[i] for i in idx)
            if left in seen:
                continue
            seen.add(left)
            right = tuple(items[i] for i in range(len(items)) if i not in idx)
            out.append((_fuse(left, mode), _fuse(right, mode)))
    return out


def _left_residual_views(s: tuple, mode: str):
    """Readings of ``s`` as ``x . (y \\ z)``: yields (x, y, z)."""
    if s[0] == "lres":
        yield ONE, s[1], s[2]
    if s[0] != "fuse":
        return
    items = s[1]
    if mode == "gbi":
        last = items[-1]
        if last[0] == "lres":
            yield _fuse(items[:-1], mode), last[1], last[2]
    elif mode == "bi":
        seen = set()
        for i, it in enumerate(items):
            if it[0] == "lres" and it not in seen:
                seen.add(it)
                yield _fuse(items[:i] + items[i + 1:], mode), it[1], it[2]
    else:
        a, b = items
        if b[0] == "lres":
            yield a, b[1], b[2]


def _right_residual_views(s: tuple, mode: str):
    """Readings of ``s`` as ``(z / y) . x``: yields (x, y, z)."""
    if mode == "bi":
        return
    if s[0] == "rres":
        yield ONE, s[2], s[1]
    if s[0] != "fuse":
        return
    items = s[1]
    if mode == "gbi":
        first = items[0]
        if first[0] == "rres":
            yield _fuse(items[1:], mode), first[2], first[1]
    else:
        a, b = items
        if a[0] == "rres":
            yield b, a[2], a[1]


# ------------------------------------------------------------------ rules

def applicable_rules(s: Sequent, mode: str = "gbi", cap: int = DEFAULT_CAP) -> list[RuleInstance]:
    """Every rule instance (in search order) whose conclusion is ``s``."""
    L, R = s.lhs, s.rhs
    out: list[RuleInstance] = []
    if L == R:
        out.append(RuleInstance("id", ()))
    if R == TOP:
        out.append(RuleInstance("top_r", ()))
    decomps = bunch_decompositions(L, mode)
    if any(sub == BOT for _, sub in decomps):
        out.append(RuleInstance("bot_l", ()))
    out.extend(_right_invertible(L, R, mode))
    out.extend(_or_left(decomps, R))
    out.extend(_noninvertible(L, R, decomps, mode, cap))
    return out


def _right_invertible(L, R, mode):
    tag = R[0]
    if tag == "and":
        items = R[1]
        return [RuleInstance("and_r", (Sequent(L, items[0]), Sequent(L, mk_and(items[1:]))))]
    if tag == "imp":
        return [RuleInstance("imp_r", (Sequent(mk_and([R[1], L]), R[2]),))]
    if tag == "lres":
        return [RuleInstance("lres_r", (Sequent(_fuse([R[1], L], mode), R[2]),))]
    if tag == "rres":
        return [RuleInstance("rres_r", (Sequent(_fuse([L, R[2]], mode), R[1]),))]
    return []


def _or_left(decomps, R):
    out = []
    for b, sub in decomps:
        if sub[0] == "or":
            items = sub[1]
            out.append(RuleInstance("or_l", (Sequent(b.plug(items[0]), R),
                                             Sequent(b.plug(mk_or(items[1:])), R))))
    return out


def _noninvertible(L, R, decomps, mode, cap):
    out = []
    seen = set()

    def add(inst):
        if any(p == Sequent(L, R) for p in inst.premises):
            return
        if not all(_cap_ok(p.lhs, cap) for p in inst.premises):
            return
        key = (inst.rule, inst.premises, inst.contract)
        if key not in seen:
            seen.add(key)
            out.append(inst)

    # left implication (with contraction of the surrounding conjuncts)
    for b, sub in decomps:
        items = and_items(sub) if sub[0] == "and" else (sub,)
        if sub[0] != "and" and sub[0] != "imp":
            continue
        done = set()
        for i, it in enumerate(items):
            if it[0] != "imp" or it in done:
                continue
            done.add(it)
            rest = items[:i] + items[i + 1:]
            y, z = it[1], it[2]
            if rest:
                add(RuleInstance("imp_l", (Sequent(sub, y), Sequent(b.plug(mk_and(rest + (z,))), R)),
                                 contract=True))
            else:
                add(RuleInstance("imp_l", (Sequent(TOP, y), Sequent(b.plug(z), R))))
    # residuals on the left
    for b, sub in decomps:
        for x, y, z in _left_residual_views(sub, mode):
            add(RuleInstance("lres_l", (Sequent(x, y), Sequent(b.plug(z), R))))
        for x, y, z in _right_residual_views(sub, mode):
            add(RuleInstance("rres_l", (Sequent(x, y), Sequent(b.plug(z), R))))
    # disjunction on the right
    if R[0] == "or":
        items = R[1]
        done = set()
        for i, it in enumerate(items):
            if it in done:
                continue
            done.add(it)
            add(RuleInstance("or_r", (Sequent(L, mk_or(items[:i] + items[i + 1:])),)))
    # fusion on both sides
    lviews = _fuse_views(L, mode)
    rviews = _fuse_views(R, mode)
    for (x, z) in lviews:
        for (y, w) in rviews:
            if (x, y) == (L, R) or (z, w) == (L, R):
                continue
            if x == ONE and y == ONE or z == ONE and w == ONE:
                continue
            add(RuleInstance("fuse_lr", (Sequent(x, y), Sequent(z, w))))
    # weakening of conjuncts
    for b, sub in decomps:
        if sub[0] != "and":
            continue
        items = sub[1]
        done = set()
        for i, it in enumerate(items):
            if it in done:
                continue
            done.add(it)
            add(RuleInstance("and_l", (Sequent(b.plug(mk_and(items[:i] + items[i + 1:])), R),)))
    # transitivity through the unit
    if L != ONE and R != ONE:
        add(RuleInstance("fuse_lr", (Sequent(L, ONE), Sequent(ONE, R))))
    return out


# ------------------------------------------------------------------ search

class _Budget(Exception):
    pass


class Prover:
    def __init__(self, mode: str = "gbi", max_depth: int = 60, max_nodes: int = 200_000,
                 cap: int = DEFAULT_CAP, allow_cut: bool = False):
        if mode not in sx.MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.max_depth = max_depth
        self.max_nodes = max_nodes
        self.cap = cap
        self.allow_cut = allow_cut
        self.pool = None
        self.proved: dict = {}
        self.failed: set = set()
        self.nodes = 0
        self.depth_cut = False

    def prove(self, s: Sequent):
        self.depth_cut = False
        try:
            tree, _ = self._search(s, 0, frozenset())
        except _Budget:
            return BudgetExhausted(self._stats())
        if tree is not None:
            return Proved(tree, self._stats())
        if self.depth_cut:
            return BudgetExhausted(self._stats())
        return NotProvable(None, self._stats())

    def _stats(self):
        return {"nodes": self.nodes, "cached_proofs": len(self.proved),
                "cached_failures": len(self.failed)}

    def _search(self, s: Sequent, depth: int, path: frozenset):
        """Returns (tree or None, clean) where clean means the failure does not
        depend on a loop check or depth cut."""
        if s in self.proved:
            return self.proved[s], True
        if s in self.failed:
            return None, True
        if s in path:
            return None, False
        if depth >= self.max_depth:
            self.depth_cut = True
            return None, False
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise _Budget()
        path = path | {s}
        clean = True
        instances = applicable_rules(s, self.mode, self.cap)
        if self.allow_cut:
            if self.pool is None:
                self.pool = _subformula_pool(s)
            instances = instances + _cut_instances(s, self.mode, self.pool, self.cap)
        for inst in instances:
            if inst.rule in ("id", "top_r", "bot_l"):
                tree = ProofTree(s, inst.rule)
                self.proved[s] = tree
                return tree, True
            subtrees = []
            ok = True
            for p in inst.premises:
                t, c = self._search(p, depth + 1, path)
                if t is None:
                    clean = clean and c
                    ok = False
                    break
                subtrees.append(t)
            if ok:
                tree = _build(s, inst, subtrees, self.mode)
                self.proved[s] = tree
                return tree, True
            if inst.rule in ("and_r", "imp_r", "lres_r", "rres_r", "or_l"):
                break  # invertible: no other rule can help
        if clean:
            self.failed.add(s)
        return None, clean


def _build(s: Sequent, inst: RuleInstance, subtrees: list, mode: str) -> ProofTree:
    if not inst.contract:
        return ProofTree(s, inst.rule, tuple(subtrees))
    # record the meet-contraction explicitly: u(s) <= w  from  u(s & s) <= w
    principal = inst.premises[0].lhs
    for b, sub in bunch_decompositions(s.lhs, mode):
        if sub == principal:
            doubled = Sequent(b.plug(mk_and([sub, sub])), s.rhs)
            inner = ProofTree(doubled, "imp_l", tuple(subtrees))
            return ProofTree(s, "and_idem", (inner,))
    raise AssertionError("principal bunch not found")


def _subformula_pool(s: Sequent) -> tuple:
    cands = set()

    def collect(t):
        cands.add(t)
        for part in t[1:]:
            if isinstance(part, tuple) and part and isinstance(part[0], tuple):
                for x in part:
                    collect(x)
            elif isinstance(part, tuple) and part and part[0] in sx._FORMULA_TAGS:
                collect(part)

    collect(s.lhs)
    collect(s.rhs)
    return tuple(sorted(cands))


def _cut_instances(s: Sequent, mode: str, pool: tuple, cap: int) -> list[RuleInstance]:
    """Cuts on formulas from ``pool`` (used only for probing).

    The pool is the subformula closure of the root sequent, so cut
    formulas stay analytic; premises over the multiplicity cap are dropped.
    """
    out = []
    for b, sub in bunch_decompositions(s.lhs, mode):
        for y in pool:
            if y == sub:
                continue
            rest = b.plug(y)
            if _cap_ok(rest, cap) and _size(rest) <= _size(s.lhs):
                out.append(RuleInstance("cut", (Sequent(sub, y), Sequent(rest, s.rhs))))
    return out


def _size(t) -> int:
    if t[0] in ("and", "or", "fuse"):
        return 1 + sum(_size(x) for x in t[1])
    if t[0] in ("imp", "lres", "rres"):
        return 1 + _size(t[1]) + _size(t[2])
    return 1


def prove(s, mode: str = "gbi", budget: int = 60, max_nodes: int = 200_000,
          countermodel: bool = True, cap: int = DEFAULT_CAP):
    """Search for a cut-free proof of ``s`` (a ``Sequent`` or ``"lhs <= rhs"``).

    ``budget`` bounds the proof depth.  On ``NotProvable`` in modes ``gbi``
    and ``bi`` a countermodel of size at most 4 is attached when one exists.
    """
    s = make_sequent(s, mode=mode)
    result = Prover(mode, budget, max_nodes, cap).prove(s)
    if isinstance(result, NotProvable) and countermodel and mode in ("gbi", "bi"):
        result.countermodel = _countermodel(s, mode)
    return result


def _countermodel(s: Sequent, mode: str):
    from . import finalg
    lhs, rhs = s.lhs, s.rhs
    if mode == "bi":
        # residuals collapse: rebuild in the gbi normal form
        lhs = sx.normalize(sx.to_formula(lhs), "gbi")
        rhs = sx.normalize(sx.to_formula(rhs), "gbi")
    if _has_sl(lhs) or _has_sl(rhs):
        return None
    for name in finalg.catalog.names():
        alg = finalg.catalog.algebra(name)
        if mode == "bi" and not alg.is_commutative():
            continue
        env = alg.counterexample(lhs, rhs)
        if env is not None:
            return alg, env
    return finalg.find_countermodel(lhs, rhs, 4, "gbi" if mode == "gbi" else "bi")


def _has_sl(t):
    return t[0] in ("eq", "neq", "pto", "ptol", "ex", "all") or any(
        _has_sl(x) for part in t[1:] if isinstance(part, tuple)
        for x in (part if part and isinstance(part[0], tuple) else [part])
        if isinstance(x, tuple) and x and isinstance(x[0], str) and x[0] in sx._FORMULA_TAGS)


def cut_probe(corpus, mode: str = "gbi", budget: int = 12, max_nodes: int = 20_000) -> list[dict]:
    """Empirical cut-admissibility report over a corpus of sequents.

    Each item is searched twice: with cuts on subformulas of the sequent,
    then cut-free.  Rows carry both statuses and whether the proof found
    with cuts enabled actually used one.
    """
    if isinstance(corpus, (str, Sequent)):
        corpus = [corpus]
    rows = []
    for item in corpus:
        s = make_sequent(item, mode=mode)
        with_cut = Prover(mode, budget, max_nodes, allow_cut=True).prove(s)
        cut_free = Prover(mode, max(budget, 60), max(max_nodes, 200_000)).prove(s)
        rows.append({"sequent": s.render("bi" if mode == "bi" else "gbi"),
                     "with_cut": with_cut.status,
                     "cut_used": with_cut.status == "proved" and "cut" in with_cut.tree.rules_used(),
                     "cut_free": cut_free.status})
    return rows


# ------------------------------------------------------------------ checking

def check_tree(tree: ProofTree, mode: str = "gbi") -> list[str]:
    """Errors found when re-checking every node as a rule instance (empty if valid)."""
    errors = []

    def visit(t: ProofTree, path: str):
        if not is_instance(t.rule, t.sequent, tuple(p.sequent for p in t.premises), mode):
            errors.append(f"{path or 'root'}: not an instance of {t.rule}: {t.sequent.render()}")
        for i, p in enumerate(t.premises):
            visit(p, f"{path}.{i}" if path else str(i))

    visit(tree, "")
    return errors


def _subsets(items: tuple):
    n = len(items)
    seen = set()
    for k in range(0, n + 1):
        for idx in itertools.combinations(range(n), k):
            sel = tuple(items[i] for i in idx)
            if sel in seen:
                continue
            seen.add(sel)
            yield sel, tuple(items[i] for i in range(n) if i not in idx)


def is_instance(rule: str, c: Sequent, ps: tuple, mode: str = "gbi") -> bool:
    """Is ``ps / c`` an instance of ``rule``?  Independent of the search code."""
    L, R = c.lhs, c.rhs
    if rule == "id":
        return not ps and L == R
    if rule == "top_r":
        return not ps and R == TOP
    if rule == "bot_l":
        return not ps and any(sub == BOT for _, sub in bunch_decompositions(L, mode))
    if rule == "and_r":
        return (len(ps) == 2 and ps[0].lhs == L and ps[1].lhs == L
                and mk_and([ps[0].rhs, ps[1].rhs]) == R)
    if rule == "or_r":
        if len(ps) != 1 or ps[0].lhs != L or R[0] != "or" or ps[0].rhs == R:
            return False
        return any(mk_or([ps[0].rhs, mk_or(rest)]) == R for _, rest in _subsets(or_items(R)))
    if rule == "imp_r":
        return len(ps) == 1 and R[0] == "imp" and ps[0] == Sequent(mk_and([R[1], L]), R[2])
    if rule == "lres_r":
        return len(ps) == 1 and R[0] == "lres" and ps[0] == Sequent(_fuse([R[1], L], mode), R[2])
    if rule == "rres_r":
        return len(ps) == 1 and R[0] == "rres" and ps[0] == Sequent(_fuse([L, R[2]], mode), R[1])
    if rule == "fuse_lr":
        if len(ps) != 2:
            return False
        a, b = ps
        return _fuse_pair(a.lhs, b.lhs, mode) == L and _fuse_pair(a.rhs, b.rhs, mode) == R
    if rule == "cut":
        if len(ps) != 2:
            return False
        a, b = ps
        return b.rhs == R and any(sub == a.lhs and bb.plug(a.rhs) == b.lhs
                                  for bb, sub in bunch_decompositions(L, mode))
    decomps = bunch_decompositions(L, mode)
    if rule == "and_idem":
        return (len(ps) == 1 and ps[0].rhs == R
                and any(b.plug(mk_and([sub, sub])) == ps[0].lhs for b, sub in decomps))
    if rule == "and_l":
        if len(ps) != 1 or ps[0].rhs != R:
            return False
        for b, sub in decomps:
            if sub[0] != "and":
                continue
            for keep, drop in _subsets(sub[1]):
                if drop and b.plug(mk_and(keep)) == ps[0].lhs:
                    return True
        return False
    if rule == "or_l":
        if len(ps) != 2 or ps[0].rhs != R or ps[1].rhs != R:
            return False
        for b, sub in decomps:
            if sub[0] != "or":
                continue
            for x, y in _subsets(sub[1]):
                if x and y and b.plug(mk_or(x)) == ps[0].lhs and b.plug(mk_or(y)) == ps[1].lhs:
                    return True
        return False
    if rule in ("lres_l", "rres_l"):
        if len(ps) != 2 or ps[1].rhs != R:
            return False
        a, b2 = ps
        for b, sub in decomps:
            views = _left_residual_views(sub, mode) if rule == "lres_l" else _right_residual_views(sub, mode)
            for x, y, z in views:
                if x == a.lhs and y == a.rhs and b.plug(z) == b2.lhs:
                    return True
        return False
    if rule == "imp_l":
        if len(ps) != 2 or ps[1].rhs != R:
            return False
        a, b2 = ps
        for b, sub in decomps:
            items = and_items(sub) if sub[0] == "and" else (sub,)
            for i, it in enumerate(items):
                if it[0] != "imp" or it[1] != a.rhs:
                    continue
                rest = mk_and(items[:i] + items[i + 1:])
                if rest == a.lhs and b.plug(it[2]) == b2.lhs:
                    return True
        return False
    return False


def _fuse_pair(a, b, mode):
    if mode == "ngbi":
        return sx.mk_fuse2(a, b)
    return sx.mk_fuse([a, b], mode)


def tree_to_json(tree: ProofTree, dialect: str = "gbi") -> str:
    return json.dumps(tree.to_json(dialect), indent=2)


def tree_from_json(data, mode: str = "gbi") -> ProofTree:
    """Inverse of ``tree_to_json``; the result can be re-checked with ``check_tree``."""
    d = json.loads(data) if isinstance(data, str) else data
    return ProofTree(make_sequent(d["lhs"], d["rhs"], mode), d["rule"],
                     tuple(tree_from_json(p, mode) for p in d["premises"]))
