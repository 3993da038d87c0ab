"""Formulas of bunched logics: AST, parser, printer and normal forms.

Three dialects share one AST:

* ``gbi`` -- the noncommutative core: ``&``, ``|``, ``->``, ``.``/``*``,
  ``\\``, ``/``, ``1``, ``top``, ``bot``;
* ``bi`` -- the commutative core, where ``-*`` replaces both residuals;
* ``sl`` -- separation-logic assertions: the ``bi`` connectives plus
  ``emp``, ``=``, ``!=``, ``|->``, ``|->l [..]`` and ``E v.`` / ``A v.``.

Binding strength, tightest first: fusion, residuals, lattice connectives,
implication. Residuals and lattice connectives associate to the left,
implication to the right.

Normal forms (``nf``) are hashable tagged tuples in which fusion chains
become sequences, ``&``/``|`` chains become sorted multisets and units
are absorbed.  They are what the prover and the algebra evaluator work on.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Union


# --------------------------------------------------------------------------
# expressions (separation logic)

@dataclass(frozen=True)
class PVar:
    """Program variable (uppercase initial)."""
    name: str


@dataclass(frozen=True)
class AVar:
    """Auxiliary (logical) variable (lowercase initial)."""
    name: str


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


Expr = Union[PVar, AVar, Num, Add]


# --------------------------------------------------------------------------
# formulas

@dataclass(frozen=True)
class Var:
    """Propositional variable (or assertion metavariable)."""
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class One:
    """Multiplicative unit."""


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Fuse:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class LRes:
    """``left \\ right``; in the commutative dialects this is ``left -* right``."""
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class RRes:
    """``left / right``."""
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Emp:
    pass


@dataclass(frozen=True)
class Eq:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neq:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class PointsTo:
    addr: Expr
    value: Expr


@dataclass(frozen=True)
class PointsToList:
    """``addr |->l [v0, v1, ...]``: consecutive cells starting at ``addr``."""
    addr: Expr
    values: tuple


@dataclass(frozen=True)
class Exists:
    var: AVar
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: AVar
    body: "Formula"


Formula = Union[Var, Top, Bot, One, And, Or, Imp, Fuse, LRes, RRes, Emp, Eq,
                Neq, PointsTo, PointsToList, Exists, Forall]

BINARY = (And, Or, Imp, Fuse, LRes, RRes)
PURE_ATOMS = (Eq, Neq)
DIALECTS = ("gbi", "bi", "sl")


def iff(a: Formula, b: Formula) -> Formula:
    """Biconditional as an abbreviation: ``(a -> b) & (b -> a)``."""
    return And(Imp(a, b), Imp(b, a))


def neg(a: Formula) -> Formula:
    return Imp(a, Bot())


def wand(a: Formula, b: Formula) -> Formula:
    return LRes(a, b)


def points_to_cells(f: PointsToList) -> Formula:
    """Desugar a list points-to into a separating conjunction of cells."""
    if not f.values:
        return Emp()
    cells = [PointsTo(f.addr if i == 0 else Add(f.addr, Num(i)), v)
             for i, v in enumerate(f.values)]
    out = cells[0]
    for c in cells[1:]:
        out = Fuse(out, c)
    return out


# --------------------------------------------------------------------------
# errors

class ParseError(ValueError):
    def __init__(self, message: str, pos: int = -1):
        super().__init__(message if pos < 0 else f"{message} (at offset {pos})")
        self.pos = pos


class DialectError(ParseError):
    """A construct that is well formed but not allowed in the chosen dialect."""


class SortError(TypeError):
    """A substitution that mixes formulas and expressions."""


# --------------------------------------------------------------------------
# lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op>\|->l|\|->|->|-\*|!=|<=|[()\[\],&|.*\\/=+])
  | (?P<num>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), pos))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


# --------------------------------------------------------------------------
# parser

_RELATIONS = ("=", "!=", "|->", "|->l")


class _Parser:
    def __init__(self, text: str, dialect: str):
        if dialect not in DIALECTS:
            raise ValueError(f"unknown dialect {dialect!r}")
        self.toks = tokenize(text)
        self.i = 0
        self.dialect = dialect

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def at(self, *values: str) -> bool:
        tok = self.peek()
        return tok[0] == "op" and tok[1] in values

    def parse(self) -> Formula:
        f = self.formula()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return f

    def formula(self) -> Formula:
        left = self.lattice()
        if self.at("->"):
            self.next()
            return Imp(left, self.formula())
        return left

    def lattice(self) -> Formula:
        left = self.residual()
        while self.at("&", "|"):
            op = self.next()[1]
            right = self.residual()
            left = And(left, right) if op == "&" else Or(left, right)
        return left

    def residual(self) -> Formula:
        left = self.fusion()
        while self.at("\\", "/", "-*"):
            _, op, pos = self.next()
            if op in "\\/" and self.dialect != "gbi":
                raise DialectError(f"{op!r} is not available in the {self.dialect} dialect; use '-*'", pos)
            right = self.fusion()
            left = RRes(left, right) if op == "/" else LRes(left, right)
        return left

    def fusion(self) -> Formula:
        left = self.atom()
        while self.at(".", "*"):
            self.next()
            left = Fuse(left, self.atom())
        return left

    def _is_quantifier(self) -> bool:
        a, b, c = self.peek(), self.peek(1), self.peek(2)
        return (a[0] == "id" and a[1] in ("E", "A") and b[0] == "id"
                and c[0] == "op" and c[1] == ".")

    def atom(self) -> Formula:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if tok[0] == "id" and self._is_quantifier():
            if self.dialect != "sl":
                raise DialectError("quantifiers belong to the sl dialect", tok[2])
            q = self.next()[1]
            _, name, pos = self.next()
            if not name[0].islower():
                raise DialectError(f"bound variable {name!r} must be a lowercase auxiliary variable", pos)
            self.expect(".")
            body = self.formula()
            return Exists(AVar(name), body) if q == "E" else Forall(AVar(name), body)
        if tok[0] == "id" and tok[1] in ("top", "bot", "emp"):
            self.next()
            if tok[1] == "top":
                return Top()
            if tok[1] == "bot":
                return Bot()
            if self.dialect != "sl":
                raise DialectError("'emp' belongs to the sl dialect", tok[2])
            return Emp()
        if self.dialect == "sl":
            return self.sl_atom()
        if tok[0] == "id":
            self.next()
            return Var(tok[1])
        if tok[0] == "num":
            self.next()
            if tok[1] == "1":
                return One()
            raise DialectError("numerals other than 1 belong to the sl dialect", tok[2])
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])

    # -- separation-logic atoms

    def sl_atom(self) -> Formula:
        start = self.peek()
        e = self.expr()
        if self.at(*_RELATIONS):
            op = self.next()[1]
            if op == "=":
                return Eq(e, self.expr())
            if op == "!=":
                return Neq(e, self.expr())
            if op == "|->":
                return PointsTo(e, self.expr())
            self.expect("[")
            vals = [self.expr()]
            while self.at(","):
                self.next()
                vals.append(self.expr())
            self.expect("]")
            return PointsToList(e, tuple(vals))
        if isinstance(e, (PVar, AVar)):
            return Var(e.name)
        if e == Num(1):
            return One()
        raise ParseError("expected a relation after expression", start[2])

    def expr(self) -> Expr:
        e = self.term()
        while self.at("+"):
            self.next()
            e = Add(e, self.term())
        return e

    def term(self) -> Expr:
        tok = self.next()
        if tok[0] == "num":
            return Num(int(tok[1]))
        if tok[0] == "id" and tok[1] not in ("top", "bot", "emp"):
            return PVar(tok[1]) if tok[1][0].isupper() else AVar(tok[1])
        raise ParseError(f"expected an expression, found {tok[1] or 'end of input'!r}", tok[2])


def parse(text: str, dialect: str = "gbi") -> Formula:
    """Parse ``text`` in one of the dialects ``gbi``, ``bi`` or ``sl``."""
    return _Parser(text, dialect).parse()


def parse_expr(text: str) -> Expr:
    p = _Parser(text, "sl")
    e = p.expr()
    if p.peek()[0] != "eof":
        raise ParseError(f"unexpected {p.peek()[1]!r}", p.peek()[2])
    return e


def parse_sequent(text: str, dialect: str = "gbi") -> tuple[Formula, Formula]:
    """Split ``"s <= t"`` at its top-level ``<=`` and parse both sides."""
    toks = tokenize(text)
    depth = 0
    cut = None
    for kind, val, pos in toks:
        if val in ("(", "["):
            depth += 1
        elif val in (")", "]"):
            depth -= 1
        elif val == "<=" and depth == 0:
            if cut is not None:
                raise ParseError("more than one '<=' in sequent", pos)
            cut = pos
    if cut is None:
        raise ParseError("a sequent needs the form 's <= t'")
    return parse(text[:cut], dialect), parse(text[cut + 2:], dialect)


# --------------------------------------------------------------------------
# printer

_PREC = {Imp: 1, And: 2, Or: 2, LRes: 3, RRes: 3, Fuse: 4}


def render_expr(e: Expr) -> str:
    if isinstance(e, (PVar, AVar)):
        return e.name
    if isinstance(e, Num):
        return str(e.value)
    return f"{render_expr(e.left)} + {render_expr(e.right)}"


def render(f: Formula, dialect: str = "gbi") -> str:
    """Print ``f`` with minimal parentheses so that ``parse`` reads it back."""
    def prec(g):
        if isinstance(g, (Exists, Forall)):
            return 0
        return _PREC.get(type(g), 5)

    def wrap(g, need):
        s = go(g)
        return f"({s})" if need else s

    def go(g) -> str:
        if isinstance(g, Var):
            return g.name
        if isinstance(g, Top):
            return "top"
        if isinstance(g, Bot):
            return "bot"
        if isinstance(g, One):
            return "emp" if dialect == "sl" else "1"
        if isinstance(g, Emp):
            return "emp"
        if isinstance(g, Eq):
            return f"{render_expr(g.left)} = {render_expr(g.right)}"
        if isinstance(g, Neq):
            return f"{render_expr(g.left)} != {render_expr(g.right)}"
        if isinstance(g, PointsTo):
            return f"{render_expr(g.addr)} |-> {render_expr(g.value)}"
        if isinstance(g, PointsToList):
            return f"{render_expr(g.addr)} |->l [{', '.join(render_expr(v) for v in g.values)}]"
        if isinstance(g, (Exists, Forall)):
            q = "E" if isinstance(g, Exists) else "A"
            return f"{q} {g.var.name}. {go(g.body)}"
        if isinstance(g, RRes) and dialect != "gbi":
            return go(LRes(g.right, g.left))
        p = _PREC[type(g)]
        if isinstance(g, Imp):
            sym = "->"
            lneed = prec(g.left) <= p
            rneed = prec(g.right) < p
        else:
            sym = {And: "&", Or: "|", Fuse: "*" if dialect != "gbi" else ".",
                   LRes: "\\" if dialect == "gbi" else "-*", RRes: "/"}[type(g)]
            lneed = prec(g.left) < p
            rneed = prec(g.right) <= p
        # a quantifier extends to the right, so it needs brackets unless last
        if isinstance(g.left, (Exists, Forall)):
            lneed = True
        return f"{wrap(g.left, lneed)} {sym} {wrap(g.right, rneed)}"

    return go(f)


# --------------------------------------------------------------------------
# traversal helpers

def expr_vars(e: Expr) -> set:
    if isinstance(e, (PVar, AVar)):
        return {e}
    if isinstance(e, Add):
        return expr_vars(e.left) | expr_vars(e.right)
    return set()


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from subformulas(f.body)


def prop_vars(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Var)}


def free_vars(f: Formula) -> set:
    """Free program/auxiliary variables of an assertion."""
    if isinstance(f, (Eq, Neq)):
        return expr_vars(f.left) | expr_vars(f.right)
    if isinstance(f, PointsTo):
        return expr_vars(f.addr) | expr_vars(f.value)
    if isinstance(f, PointsToList):
        out = expr_vars(f.addr)
        for v in f.values:
            out |= expr_vars(v)
        return out
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    return set()


def is_pure(f: Formula) -> bool:
    """Heap-independent assertion (no spatial atoms, no emp, no units)."""
    if isinstance(f, (Eq, Neq, Top, Bot)):
        return True
    if isinstance(f, (And, Or, Imp)):
        return is_pure(f.left) and is_pure(f.right)
    if isinstance(f, (Exists, Forall)):
        return is_pure(f.body)
    return False


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


# --------------------------------------------------------------------------
# substitution

def subst_expr(e: Expr, var, repl: Expr) -> Expr:
    if e == var:
        return repl
    if isinstance(e, Add):
        return Add(subst_expr(e.left, var, repl), subst_expr(e.right, var, repl))
    return e


def fresh_avar(base: str, avoid: set) -> AVar:
    names = {v.name for v in avoid if isinstance(v, (AVar, PVar))}
    cand = base + "'"
    while cand in names:
        cand += "'"
    return AVar(cand)


def substitute(f: Formula, var, repl) -> Formula:
    """Capture-avoiding substitution of ``repl`` for ``var`` in ``f``.

    ``var`` is a propositional ``Var`` (then ``repl`` must be a formula) or a
    ``PVar``/``AVar`` (then ``repl`` must be an expression).
    """
    prop = isinstance(var, Var)
    if prop and not isinstance(repl, (Var, Top, Bot, One) + BINARY + (Emp, Eq, Neq, PointsTo, PointsToList, Exists, Forall)):
        raise SortError("a propositional variable needs a formula")
    if not prop:
        if not isinstance(var, (PVar, AVar)):
            raise SortError(f"cannot substitute for {var!r}")
        if not isinstance(repl, (PVar, AVar, Num, Add)):
            raise SortError("an expression variable needs an expression")
    repl_free = free_vars(repl) if prop else expr_vars(repl)

    def go(g):
        if isinstance(g, Var):
            return repl if prop and g == var else g
        if isinstance(g, BINARY):
            return type(g)(go(g.left), go(g.right))
        if prop:
            if isinstance(g, (Exists, Forall)):
                if g.var in repl_free:
                    new = fresh_avar(g.var.name, repl_free | free_vars(g.body))
                    body = substitute(g.body, g.var, new)
                    return type(g)(new, go(body))
                return type(g)(g.var, go(g.body))
            return g
        if isinstance(g, Eq):
            return Eq(subst_expr(g.left, var, repl), subst_expr(g.right, var, repl))
        if isinstance(g, Neq):
            return Neq(subst_expr(g.left, var, repl), subst_expr(g.right, var, repl))
        if isinstance(g, PointsTo):
            return PointsTo(subst_expr(g.addr, var, repl), subst_expr(g.value, var, repl))
        if isinstance(g, PointsToList):
            return PointsToList(subst_expr(g.addr, var, repl),
                                tuple(subst_expr(v, var, repl) for v in g.values))
        if isinstance(g, (Exists, Forall)):
            if g.var == var:
                return g
            if g.var in repl_free and var in free_vars(g.body):
                new = fresh_avar(g.var.name, repl_free | free_vars(g.body) | {var})
                body = substitute(g.body, g.var, new)
                return type(g)(new, go(body))
            return type(g)(g.var, go(g.body))
        return g

    return go(f)


def substitute_many(f: Formula, mapping: dict) -> Formula:
    """Simultaneous substitution of formulas for propositional variables."""
    def go(g):
        if isinstance(g, Var):
            return mapping.get(g.name, g)
        if isinstance(g, BINARY):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.var, go(g.body))
        return g
    return go(f)


# --------------------------------------------------------------------------
# normal forms
#
# Tags: ('var', n) ('top',) ('bot',) ('one',) ('and', items) ('or', items)
# ('fuse', items) ('imp', a, b) ('lres', a, b) ('rres', a, b)
# ('eq', e, e) ('neq', e, e) ('pto', e, e) ('ptol', e, es) ('ex', v, b) ('all', v, b)
# Expressions: ('pv', n) ('av', n) ('num', k) ('add', e, e).
# In mode 'bi' fusion items are sorted and z/y becomes y\z; in mode 'ngbi'
# fusion is binary (never flattened).

MODES = ("gbi", "bi", "ngbi")
TOP = ("top",)
BOT = ("bot",)
ONE = ("one",)


def expr_nf(e: Expr) -> tuple:
    if isinstance(e, PVar):
        return ("pv", e.name)
    if isinstance(e, AVar):
        return ("av", e.name)
    if isinstance(e, Num):
        return ("num", e.value)
    return ("add", expr_nf(e.left), expr_nf(e.right))


def nf_expr(t: tuple) -> Expr:
    tag = t[0]
    if tag == "pv":
        return PVar(t[1])
    if tag == "av":
        return AVar(t[1])
    if tag == "num":
        return Num(t[1])
    return Add(nf_expr(t[1]), nf_expr(t[2]))


def mk_and(items) -> tuple:
    flat = []
    for t in items:
        if t[0] == "and":
            flat.extend(t[1])
        elif t != TOP:
            flat.append(t)
    if not flat:
        return TOP
    if len(flat) == 1:
        return flat[0]
    return ("and", tuple(sorted(flat)))


def mk_or(items) -> tuple:
    flat = []
    for t in items:
        if t[0] == "or":
            flat.extend(t[1])
        elif t != BOT:
            flat.append(t)
    if not flat:
        return BOT
    if len(flat) == 1:
        return flat[0]
    return ("or", tuple(sorted(flat)))


def mk_fuse(items, mode: str = "gbi") -> tuple:
    """Fusion of a sequence of normal forms (binary pairs in mode 'ngbi')."""
    if mode == "ngbi":
        items = [t for t in items if t != ONE]
        if not items:
            return ONE
        out = items[0]
        for t in items[1:]:
            out = ("fuse", (out, t))
        return out
    flat = []
    for t in items:
        if t[0] == "fuse":
            flat.extend(t[1])
        elif t != ONE:
            flat.append(t)
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    if mode == "bi":
        flat.sort()
    return ("fuse", tuple(flat))


def mk_fuse2(a: tuple, b: tuple) -> tuple:
    """Binary fusion without flattening (mode 'ngbi')."""
    if a == ONE:
        return b
    if b == ONE:
        return a
    return ("fuse", (a, b))


def fuse_items(t: tuple) -> tuple:
    """View ``t`` as a fusion sequence (unit = empty sequence)."""
    if t == ONE:
        return ()
    if t[0] == "fuse":
        return t[1]
    return (t,)


def and_items(t: tuple) -> tuple:
    if t == TOP:
        return ()
    if t[0] == "and":
        return t[1]
    return (t,)


def or_items(t: tuple) -> tuple:
    if t == BOT:
        return ()
    if t[0] == "or":
        return t[1]
    return (t,)


def mk_res(tag: str, a: tuple, b: tuple, mode: str) -> tuple:
    if mode == "bi" and tag == "rres":
        return ("lres", b, a)
    return (tag, a, b)


def normalize(f: Formula, mode: str = "gbi") -> tuple:
    """Normal form of ``f``: fusion chains as sequences (multisets in mode
    ``bi``, untouched in ``ngbi``), lattice chains as multisets, units absorbed."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")

    def go(g):
        if isinstance(g, Var):
            return ("var", g.name)
        if isinstance(g, Top):
            return TOP
        if isinstance(g, Bot):
            return BOT
        if isinstance(g, (One, Emp)):
            return ONE
        if isinstance(g, And):
            return mk_and([go(g.left), go(g.right)])
        if isinstance(g, Or):
            return mk_or([go(g.left), go(g.right)])
        if isinstance(g, Fuse):
            if mode == "ngbi":
                return mk_fuse2(go(g.left), go(g.right))
            return mk_fuse([go(g.left), go(g.right)], mode)
        if isinstance(g, Imp):
            return ("imp", go(g.left), go(g.right))
        if isinstance(g, LRes):
            return ("lres", go(g.left), go(g.right))
        if isinstance(g, RRes):
            return mk_res("rres", go(g.left), go(g.right), mode)
        if isinstance(g, Eq):
            return ("eq", expr_nf(g.left), expr_nf(g.right))
        if isinstance(g, Neq):
            return ("neq", expr_nf(g.left), expr_nf(g.right))
        if isinstance(g, PointsTo):
            return ("pto", expr_nf(g.addr), expr_nf(g.value))
        if isinstance(g, PointsToList):
            return ("ptol", expr_nf(g.addr), tuple(expr_nf(v) for v in g.values))
        if isinstance(g, Exists):
            return ("ex", g.var.name, go(g.body))
        if isinstance(g, Forall):
            return ("all", g.var.name, go(g.body))
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


def to_formula(t: tuple) -> Formula:
    """Rebuild a (left-nested) formula from a normal form."""
    tag = t[0]
    if tag == "var":
        return Var(t[1])
    if tag == "top":
        return Top()
    if tag == "bot":
        return Bot()
    if tag == "one":
        return One()
    if tag in ("and", "or", "fuse"):
        cls = {"and": And, "or": Or, "fuse": Fuse}[tag]
        parts = [to_formula(x) for x in t[1]]
        out = parts[0]
        for p in parts[1:]:
            out = cls(out, p)
        return out
    if tag == "imp":
        return Imp(to_formula(t[1]), to_formula(t[2]))
    if tag == "lres":
        return LRes(to_formula(t[1]), to_formula(t[2]))
    if tag == "rres":
        return RRes(to_formula(t[1]), to_formula(t[2]))
    if tag == "eq":
        return Eq(nf_expr(t[1]), nf_expr(t[2]))
    if tag == "neq":
        return Neq(nf_expr(t[1]), nf_expr(t[2]))
    if tag == "pto":
        return PointsTo(nf_expr(t[1]), nf_expr(t[2]))
    if tag == "ptol":
        return PointsToList(nf_expr(t[1]), tuple(nf_expr(v) for v in t[2]))
    if tag == "ex":
        return Exists(AVar(t[1]), to_formula(t[2]))
    if tag == "all":
        return Forall(AVar(t[1]), to_formula(t[2]))
    raise TypeError(f"not a normal form: {t!r}")


def render_nf(t: tuple, dialect: str = "gbi") -> str:
    return render(to_formula(t), dialect)


# --------------------------------------------------------------------------
# bunches: contexts whose path to the hole runs through fusion and meet only

@dataclass(frozen=True)
class Bunch:
    """A one-hole context over normal forms.

    ``frames`` lists the steps from the root to the hole; each frame records
    the siblings that stay in place when the hole is filled.
    """
    frames: tuple = ()
    mode: str = "gbi"

    def plug(self, t) -> tuple:
        if not isinstance(t, tuple):
            t = normalize(t, self.mode)
        for frame in reversed(self.frames):
            kind = frame[0]
            if kind == "and":
                t = mk_and(frame[1] + (t,))
            elif kind == "fuse":
                t = mk_fuse(frame[1] + (t,) + frame[2], self.mode)
            elif kind == "fusem":
                t = mk_fuse(frame[1] + (t,), "bi")
            elif kind == "left":
                t = mk_fuse2(t, frame[1])
            else:
                t = mk_fuse2(frame[1], t)
        return t

    @property
    def depth(self) -> int:
        return len(self.frames)

    def is_hole(self) -> bool:
        return not self.frames


def _sub_multisets(items: tuple) -> Iterator[tuple[tuple, tuple]]:
    """Distinct (selected, rest) splits with 2 <= |selected| < |items|."""
    seen = set()
    n = len(items)
    for k in range(2, n):
        for idx in itertools.combinations(range(n), k):
            sel = tuple(items[i] for i in idx)
            if sel in seen:
                continue
            seen.add(sel)
            rest = tuple(items[i] for i in range(n) if i not in idx)
            yield sel, rest


def _decompose(t: tuple, frames: tuple, mode: str, out: list):
    out.append((frames, t))
    tag = t[0]
    if tag == "and" or (tag == "fuse" and mode == "bi"):
        kind = "and" if tag == "and" else "fusem"
        build = mk_and if tag == "and" else (lambda xs: mk_fuse(xs, "bi"))
        for sel, rest in _sub_multisets(t[1]):
            out.append((frames + ((kind, rest),), build(sel)))
        seen = set()
        for i, child in enumerate(t[1]):
            if child in seen:
                continue
            seen.add(child)
            rest = t[1][:i] + t[1][i + 1:]
            _decompose(child, frames + ((kind, rest),), mode, out)
    elif tag == "fuse" and mode == "gbi":
        items = t[1]
        n = len(items)
        for i in range(n):
            for j in range(i + 2, n + 1):
                if j - i < n:
                    out.append((frames + (("fuse", items[:i], items[j:]),), mk_fuse(items[i:j])))
        for i, child in enumerate(items):
            _decompose(child, frames + (("fuse", items[:i], items[i + 1:]),), mode, out)
    elif tag == "fuse":  # binary
        a, b = t[1]
        _decompose(a, frames + (("left", b),), mode, out)
        _decompose(b, frames + (("right", a),), mode, out)


def bunch_decompositions(f, mode: str = "gbi") -> list:
    """All ways of writing ``f`` as ``u(s)`` with ``u`` a bunch.

    Accepts a formula or a normal form; the subterms come back in the same
    representation.  Associativity (modes ``gbi``/``bi``) and commutativity
    (``bi``, and always for ``&``) are taken into account, so in mode ``gbi``
    ``x . y . z`` has ``x . y`` and ``y . z`` as subterms.
    """
    as_formula = not isinstance(f, tuple)
    t = normalize(f, mode) if as_formula else f
    raw: list = []
    _decompose(t, (), mode, raw)
    out = []
    for frames, sub in raw:
        b = Bunch(frames, mode)
        out.append((b, to_formula(sub) if as_formula else sub))
    return out


# --------------------------------------------------------------------------
# nf helpers used by several modules

def nf_vars(t: tuple) -> set[str]:
    if t[0] == "var":
        return {t[1]}
    out: set[str] = set()
    for part in t[1:]:
        if isinstance(part, tuple) and part and isinstance(part[0], tuple):
            for x in part:
                out |= nf_vars(x)
        elif isinstance(part, tuple) and part and isinstance(part[0], str) and part[0] in _FORMULA_TAGS:
            out |= nf_vars(part)
    return out


_FORMULA_TAGS = {"var", "top", "bot", "one", "and", "or", "fuse", "imp", "lres",
                 "rres", "eq", "neq", "pto", "ptol", "ex", "all"}
