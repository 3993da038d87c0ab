"""A toy imperative heap language, its fault-aware semantics and Hoare triples.

Commands are IMP (skip, assignment, sequencing, conditionals, loops) plus
allocation ``X := CONS(a, ...)``, lookup ``X := [a]``, mutation
``[a] := b`` and ``DISPOSE a``.  Stores, locations and heap values share a
bounded range of naturals, so validity of a triple is decided by
exhaustive search over initial states.  Proof outlines built from the
IMP rules, the small axioms, the frame rule, variable elimination and a
deductive consequence rule are checked node by node.
"""
from __future__ import annotations

import itertools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import sequent as sq
from . import symheap as sh
from . import syntax as sx
from .syntax import (Add, And, AVar, Bot, Emp, Eq, Exists, Forall, Fuse, Imp, LRes, Neq, Num, One, Or,
                     PointsTo, PointsToList, PVar, RRes, Top, Var)


# ------------------------------------------------------------------ commands

@dataclass(frozen=True)
class BTrue:
    pass


@dataclass(frozen=True)
class BFalse:
    pass


@dataclass(frozen=True)
class BCmp:
    op: str          # = != < <=
    left: sx.Expr
    right: sx.Expr


@dataclass(frozen=True)
class BNot:
    arg: "BExpr"


@dataclass(frozen=True)
class BAnd:
    left: "BExpr"
    right: "BExpr"


@dataclass(frozen=True)
class BOr:
    left: "BExpr"
    right: "BExpr"


BExpr = "BTrue | BFalse | BCmp | BNot | BAnd | BOr"


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    expr: sx.Expr


@dataclass(frozen=True)
class Seq:
    first: "Command"
    second: "Command"


@dataclass(frozen=True)
class If:
    cond: BExpr
    then: "Command"
    orelse: "Command"


@dataclass(frozen=True)
class While:
    cond: BExpr
    body: "Command"
    invariant: sx.Formula | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Cons:
    var: str
    args: tuple


@dataclass(frozen=True)
class Lookup:
    var: str
    addr: sx.Expr


@dataclass(frozen=True)
class Mutate:
    addr: sx.Expr
    value: sx.Expr


@dataclass(frozen=True)
class Dispose:
    addr: sx.Expr


Command = "Skip | Assign | Seq | If | While | Cons | Lookup | Mutate | Dispose"


def seq(*cmds):
    out = cmds[0]
    for c in cmds[1:]:
        out = Seq(out, c)
    return out


# ------------------------------------------------------------------ program text

class ProgramError(ValueError):
    def __init__(self, msg: str, pos: int = -1):
        super().__init__(f"{msg} at position {pos}" if pos >= 0 else msg)
        self.pos = pos


_PTOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op>:=|<=|!=|[\[\]();,+=<])
  | (?P<num>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)

_KEYWORDS = {"SKIP", "IF", "THEN", "ELSE", "FI", "WHILE", "DO", "OD", "CONS", "DISPOSE",
             "AND", "OR", "NOT", "true", "false"}


def _ptokens(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos] == "{":
            depth, end = 0, pos
            while end < len(text):
                depth += {"{": 1, "}": -1}.get(text[end], 0)
                if depth == 0:
                    break
                end += 1
            if depth:
                raise ProgramError("unclosed annotation", pos)
            toks.append(("annot", text[pos + 1:end], pos))
            pos = end + 1
            continue
        m = _PTOKEN.match(text, pos)
        if m is None:
            raise ProgramError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            toks.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _ProgramParser:
    def __init__(self, text: str):
        self.toks = _ptokens(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def at(self, *values):
        return self.peek()[1] in values and self.peek()[0] in ("op", "id")

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            raise ProgramError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def annotation(self):
        tok = self.next()
        if tok[0] != "annot":
            raise ProgramError("expected an annotation {...}", tok[2])
        try:
            return sx.parse(tok[1], "sl")
        except sx.ParseError as e:
            raise ProgramError(f"bad assertion: {e}", tok[2]) from None

    def command(self):
        c = self.statement()
        while self.at(";"):
            self.next()
            c = Seq(c, self.statement())
        return c

    def statement(self):
        tok = self.peek()
        if tok[1] == "SKIP":
            self.next()
            return Skip()
        if tok[1] == "(":
            self.next()
            c = self.command()
            self.expect(")")
            return c
        if tok[1] == "IF":
            self.next()
            b = self.bexpr()
            self.expect("THEN")
            c1 = self.command()
            self.expect("ELSE")
            c2 = self.command()
            self.expect("FI")
            return If(b, c1, c2)
        if tok[1] == "WHILE":
            self.next()
            b = self.bexpr()
            self.expect("DO")
            inv = self.annotation() if self.peek()[0] == "annot" else None
            body = self.command()
            self.expect("OD")
            return While(b, body, inv)
        if tok[1] == "DISPOSE":
            self.next()
            return Dispose(self.expr())
        if tok[1] == "[":
            self.next()
            a = self.expr()
            self.expect("]")
            self.expect(":=")
            return Mutate(a, self.expr())
        if tok[0] == "id" and tok[1] not in _KEYWORDS:
            if not tok[1][0].isupper():
                raise ProgramError(f"program variables are capitalised, got {tok[1]!r}", tok[2])
            self.next()
            self.expect(":=")
            if self.at("CONS"):
                self.next()
                self.expect("(")
                args = [self.expr()]
                while self.at(","):
                    self.next()
                    args.append(self.expr())
                self.expect(")")
                return Cons(tok[1], tuple(args))
            if self.at("["):
                self.next()
                a = self.expr()
                self.expect("]")
                return Lookup(tok[1], a)
            return Assign(tok[1], self.expr())
        raise ProgramError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])

    def expr(self):
        e = self.term()
        while self.at("+"):
            self.next()
            e = Add(e, self.term())
        return e

    def term(self):
        tok = self.next()
        if tok[0] == "num":
            return Num(int(tok[1]))
        if tok[0] == "id" and tok[1] not in _KEYWORDS and tok[1][0].isupper():
            return PVar(tok[1])
        if tok[1] == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ProgramError(f"expected an expression, found {tok[1] or 'end of input'!r}", tok[2])

    def bexpr(self):
        b = self.bconj()
        while self.at("OR"):
            self.next()
            b = BOr(b, self.bconj())
        return b

    def bconj(self):
        b = self.bunary()
        while self.at("AND"):
            self.next()
            b = BAnd(b, self.bunary())
        return b

    def bunary(self):
        tok = self.peek()
        if tok[1] == "NOT":
            self.next()
            return BNot(self.bunary())
        if tok[1] == "true":
            self.next()
            return BTrue()
        if tok[1] == "false":
            self.next()
            return BFalse()
        if tok[1] == "(":
            save = self.i
            try:
                return self.comparison()
            except ProgramError:
                self.i = save
            self.next()
            b = self.bexpr()
            self.expect(")")
            return b
        return self.comparison()

    def comparison(self):
        left = self.expr()
        tok = self.next()
        if tok[1] not in ("=", "!=", "<", "<="):
            raise ProgramError("expected a comparison", tok[2])
        return BCmp(tok[1], left, self.expr())


def parse_program(text: str) -> Command:
    p = _ProgramParser(text)
    c = p.command()
    if p.peek()[0] != "eof":
        raise ProgramError(f"unexpected {p.peek()[1]!r}", p.peek()[2])
    return c


@dataclass(frozen=True)
class Triple:
    pre: sx.Formula
    cmd: Command
    post: sx.Formula

    def render(self) -> str:
        return f"{{{sx.render(self.pre, 'sl')}}} {render_command(self.cmd)} {{{sx.render(self.post, 'sl')}}}"


def parse_triple(text: str) -> Triple:
    """``{P} C {Q}``."""
    p = _ProgramParser(text)
    pre = p.annotation()
    c = p.command()
    post = p.annotation()
    if p.peek()[0] != "eof":
        raise ProgramError(f"unexpected {p.peek()[1]!r}", p.peek()[2])
    return Triple(pre, c, post)


def render_bexpr(b) -> str:
    if isinstance(b, BTrue):
        return "true"
    if isinstance(b, BFalse):
        return "false"
    if isinstance(b, BCmp):
        return f"{sx.render_expr(b.left)} {b.op} {sx.render_expr(b.right)}"
    if isinstance(b, BNot):
        return f"NOT ({render_bexpr(b.arg)})"
    op = "AND" if isinstance(b, BAnd) else "OR"
    return f"({render_bexpr(b.left)} {op} {render_bexpr(b.right)})"


def render_command(c) -> str:
    r = sx.render_expr
    if isinstance(c, Skip):
        return "SKIP"
    if isinstance(c, Assign):
        return f"{c.var} := {r(c.expr)}"
    if isinstance(c, Seq):
        return f"{render_command(c.first)}; {render_command(c.second)}"
    if isinstance(c, If):
        return f"IF {render_bexpr(c.cond)} THEN {render_command(c.then)} ELSE {render_command(c.orelse)} FI"
    if isinstance(c, While):
        inv = f" {{{sx.render(c.invariant, 'sl')}}}" if c.invariant is not None else ""
        return f"WHILE {render_bexpr(c.cond)} DO{inv} {render_command(c.body)} OD"
    if isinstance(c, Cons):
        return f"{c.var} := CONS({', '.join(r(a) for a in c.args)})"
    if isinstance(c, Lookup):
        return f"{c.var} := [{r(c.addr)}]"
    if isinstance(c, Mutate):
        return f"[{r(c.addr)}] := {r(c.value)}"
    if isinstance(c, Dispose):
        return f"DISPOSE {r(c.addr)}"
    raise TypeError(c)


def modifies(c) -> frozenset:
    """Program variables a command may assign."""
    if isinstance(c, (Assign, Lookup, Cons)):
        return frozenset({c.var})
    if isinstance(c, (Skip, Dispose, Mutate)):
        return frozenset()
    if isinstance(c, Seq):
        return modifies(c.first) | modifies(c.second)
    if isinstance(c, If):
        return modifies(c.then) | modifies(c.orelse)
    if isinstance(c, While):
        return modifies(c.body)
    raise TypeError(c)


def appears(f) -> frozenset:
    """Program variables occurring in an assertion."""
    return frozenset(v.name for v in sx.free_vars(f) if isinstance(v, PVar))


def _bexpr_vars(b) -> set:
    if isinstance(b, BCmp):
        return {v.name for v in sx.expr_vars(b.left) | sx.expr_vars(b.right)}
    if isinstance(b, BNot):
        return _bexpr_vars(b.arg)
    if isinstance(b, (BAnd, BOr)):
        return _bexpr_vars(b.left) | _bexpr_vars(b.right)
    return set()


def program_vars(c) -> set:
    ev = lambda e: {v.name for v in sx.expr_vars(e)}
    if isinstance(c, Skip):
        return set()
    if isinstance(c, Assign):
        return {c.var} | ev(c.expr)
    if isinstance(c, Seq):
        return program_vars(c.first) | program_vars(c.second)
    if isinstance(c, If):
        return _bexpr_vars(c.cond) | program_vars(c.then) | program_vars(c.orelse)
    if isinstance(c, While):
        return _bexpr_vars(c.cond) | program_vars(c.body)
    if isinstance(c, Cons):
        return {c.var}.union(*(ev(a) for a in c.args))
    if isinstance(c, Lookup):
        return {c.var} | ev(c.addr)
    if isinstance(c, Mutate):
        return ev(c.addr) | ev(c.value)
    if isinstance(c, Dispose):
        return ev(c.addr)
    raise TypeError(c)


# ------------------------------------------------------------------ states and execution

@dataclass(frozen=True)
class SLBounds:
    """Locations are ``range(locs)``; stored and heap values are ``range(vals)``."""

    locs: int = 4
    vals: int = 4

    def __post_init__(self):
        if self.locs < 1 or self.vals < 1:
            raise ValueError("bounds must be positive")


@dataclass(frozen=True)
class MachineState:
    store: tuple        # sorted (name, value) pairs
    heap: tuple         # sorted (location, value) pairs

    @staticmethod
    def make(store: dict, heap: dict | None = None) -> "MachineState":
        return MachineState(tuple(sorted(store.items())), tuple(sorted((heap or {}).items())))

    @property
    def s(self) -> dict:
        return dict(self.store)

    @property
    def h(self) -> dict:
        return dict(self.heap)

    def to_json(self) -> dict:
        return {"store": self.s, "heap": {str(k): v for k, v in self.heap}}

    def __str__(self):
        st = ", ".join(f"{k}={v}" for k, v in self.store)
        hp = ", ".join(f"{k}|->{v}" for k, v in self.heap) or "emp"
        return f"[{st}] {{{hp}}}"


@dataclass(frozen=True)
class Terminated:
    state: MachineState


@dataclass(frozen=True)
class Fault:
    reason: str


@dataclass(frozen=True)
class FuelExhausted:
    pass


@dataclass(frozen=True)
class ResourceExhausted:
    """A bound artifact: allocation found no room, or a stored value left the range."""

    reason: str


def eval_expr(e, store: dict, env: dict | None = None) -> int:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, PVar):
        try:
            return store[e.name]
        except KeyError:
            raise ValueError(f"program variable {e.name} is not in the store") from None
    if isinstance(e, AVar):
        if env is None or e.name not in env:
            raise ValueError(f"auxiliary variable {e.name} is unbound")
        return env[e.name]
    if isinstance(e, Add):
        return eval_expr(e.left, store, env) + eval_expr(e.right, store, env)
    raise TypeError(e)


def eval_bexpr(b, store: dict) -> bool:
    if isinstance(b, BTrue):
        return True
    if isinstance(b, BFalse):
        return False
    if isinstance(b, BCmp):
        x, y = eval_expr(b.left, store), eval_expr(b.right, store)
        return {"=": x == y, "!=": x != y, "<": x < y, "<=": x <= y}[b.op]
    if isinstance(b, BNot):
        return not eval_bexpr(b.arg, store)
    if isinstance(b, BAnd):
        return eval_bexpr(b.left, store) and eval_bexpr(b.right, store)
    return eval_bexpr(b.left, store) or eval_bexpr(b.right, store)


def _run(c, s: dict, h: dict, fuel: int, b: SLBounds):
    """List of (outcome, state-or-None, fuel left)."""
    if isinstance(c, Skip):
        return [("ok", (s, h), fuel)]
    if isinstance(c, Assign):
        v = eval_expr(c.expr, s)
        if not 0 <= v < b.vals:
            return [(ResourceExhausted(f"value {v} out of range"), None, fuel)]
        return [("ok", ({**s, c.var: v}, h), fuel)]
    if isinstance(c, Seq):
        out = []
        for r, st, f in _run(c.first, s, h, fuel, b):
            out.extend(_run(c.second, st[0], st[1], f, b) if r == "ok" else [(r, st, f)])
        return out
    if isinstance(c, If):
        return _run(c.then if eval_bexpr(c.cond, s) else c.orelse, s, h, fuel, b)
    if isinstance(c, While):
        if not eval_bexpr(c.cond, s):
            return [("ok", (s, h), fuel)]
        if fuel <= 0:
            return [(FuelExhausted(), None, 0)]
        out = []
        for r, st, f in _run(c.body, s, h, fuel - 1, b):
            out.extend(_run(c, st[0], st[1], f, b) if r == "ok" else [(r, st, f)])
        return out
    if isinstance(c, Cons):
        vals = [eval_expr(a, s) for a in c.args]
        if any(not 0 <= v < b.vals for v in vals):
            return [(ResourceExhausted("allocated value out of range"), None, fuel)]
        n = len(vals)
        out = []
        for start in range(b.locs - n + 1):
            if start >= b.vals:
                break
            if all(start + i not in h for i in range(n)):
                h2 = dict(h)
                h2.update({start + i: v for i, v in enumerate(vals)})
                out.append(("ok", ({**s, c.var: start}, h2), fuel))
        return out or [(ResourceExhausted(f"no room for {n} contiguous cells"), None, fuel)]
    if isinstance(c, Lookup):
        a = eval_expr(c.addr, s)
        if a not in h:
            return [(Fault(f"lookup of unallocated {a}"), None, fuel)]
        return [("ok", ({**s, c.var: h[a]}, h), fuel)]
    if isinstance(c, Mutate):
        a = eval_expr(c.addr, s)
        if a not in h:
            return [(Fault(f"mutation of unallocated {a}"), None, fuel)]
        v = eval_expr(c.value, s)
        if not 0 <= v < b.vals:
            return [(ResourceExhausted(f"value {v} out of range"), None, fuel)]
        return [("ok", (s, {**h, a: v}), fuel)]
    if isinstance(c, Dispose):
        a = eval_expr(c.addr, s)
        if a not in h:
            return [(Fault(f"disposal of unallocated {a}"), None, fuel)]
        h2 = dict(h)
        del h2[a]
        return [("ok", (s, h2), fuel)]
    raise TypeError(c)


def execute(c, state: MachineState, fuel: int = 64, bounds: SLBounds = SLBounds()) -> set:
    """All outcomes of running ``c`` from ``state``; only allocation branches."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    out = set()
    for r, st, _ in _run(c, state.s, state.h, fuel, bounds):
        out.add(Terminated(MachineState.make(*st)) if r == "ok" else r)
    return out


# ------------------------------------------------------------------ assertions

def _all_heaps(b: SLBounds) -> list[tuple]:
    return _all_heaps_over(tuple(range(b.locs)), b.vals)


_HEAP_CACHE: dict = {}


def _all_heaps_over(locs: tuple, vals: int) -> list[tuple]:
    key = (locs, vals)
    if key not in _HEAP_CACHE:
        out = []
        for choice in itertools.product(range(-1, vals), repeat=len(locs)):
            out.append(tuple((l, v) for l, v in zip(locs, choice) if v >= 0))
        _HEAP_CACHE[key] = out
    return _HEAP_CACHE[key]


class _Eval:
    """Assertion evaluation at a fixed store and bounds, memoised per heap."""

    def __init__(self, store: dict, b: SLBounds):
        self.store = store
        self.b = b
        self.memo = {}

    def expr(self, e, env):
        return eval_expr(e, self.store, env)

    def holds(self, f, env: tuple, heap: tuple) -> bool:
        key = (f, env, heap)
        r = self.memo.get(key)
        if r is None:
            r = self._holds(f, env, heap)
            self.memo[key] = r
        return r

    def _holds(self, f, env, heap):
        e = dict(env)
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, (Emp, One)):
            return not heap
        if isinstance(f, Eq):
            return self.expr(f.left, e) == self.expr(f.right, e)
        if isinstance(f, Neq):
            return self.expr(f.left, e) != self.expr(f.right, e)
        if isinstance(f, PointsTo):
            return heap == ((self.expr(f.addr, e), self.expr(f.value, e)),)
        if isinstance(f, PointsToList):
            cells = self._cells(f, e)
            return cells is not None and heap == cells
        if isinstance(f, And):
            return self.holds(f.left, env, heap) and self.holds(f.right, env, heap)
        if isinstance(f, Or):
            return self.holds(f.left, env, heap) or self.holds(f.right, env, heap)
        if isinstance(f, Imp):
            return not self.holds(f.left, env, heap) or self.holds(f.right, env, heap)
        if isinstance(f, Fuse):
            n = len(heap)
            for mask in range(1 << n):
                h1 = tuple(c for i, c in enumerate(heap) if mask >> i & 1)
                h2 = tuple(c for i, c in enumerate(heap) if not mask >> i & 1)
                if self.holds(f.left, env, h1) and self.holds(f.right, env, h2):
                    return True
            return False
        if isinstance(f, (LRes, RRes)):
            ante, cons = (f.left, f.right) if isinstance(f, LRes) else (f.right, f.left)
            used = {l for l, _ in heap}
            for ext in self.extensions(ante, env, used):
                if not self.holds(cons, env, tuple(sorted(heap + ext))):
                    return False
            return True
        if isinstance(f, (Exists, Forall)):
            body = f.body
            results = (self.holds(body, tuple(sorted({**e, f.var.name: v}.items())), heap)
                       for v in range(self.b.vals))
            return any(results) if isinstance(f, Exists) else all(results)
        if isinstance(f, Var):
            raise ValueError(f"propositional variable {f.name} in an assertion")
        raise TypeError(f)

    def _cells(self, f: PointsToList, e):
        base = self.expr(f.addr, e)
        cells = tuple((base + i, self.expr(v, e)) for i, v in enumerate(f.values))
        return cells

    def extensions(self, ante, env, used: set):
        """Heaps disjoint from ``used`` (within bounds) satisfying ``ante``."""
        exact = self.models(ante, env)
        if exact is not None:
            return [h for h in exact if not used & {l for l, _ in h}]
        free = tuple(l for l in range(self.b.locs) if l not in used)
        return [h for h in _all_heaps_over(free, self.b.vals) if self.holds(ante, env, h)]

    def models(self, f, env) -> list | None:
        """Heaps (within bounds) satisfying ``f``, or ``None`` when not cheaply enumerable."""
        e = dict(env)
        b = self.b
        if isinstance(f, (Emp, One)):
            return [()]
        if isinstance(f, Bot):
            return []
        if isinstance(f, PointsTo):
            a, v = self.expr(f.addr, e), self.expr(f.value, e)
            return [((a, v),)] if 0 <= a < b.locs and 0 <= v < b.vals else []
        if isinstance(f, PointsToList):
            cells = self._cells(f, e)
            ok = (len({l for l, _ in cells}) == len(cells)
                  and all(0 <= l < b.locs and 0 <= v < b.vals for l, v in cells))
            return [tuple(sorted(cells))] if ok else []
        if sx.is_pure(f):
            return None if self.holds(f, env, ()) else []
        if isinstance(f, Fuse):
            left, right = self.models(f.left, env), self.models(f.right, env)
            if left is None or right is None:
                return None
            out = set()
            for h1 in left:
                d1 = {l for l, _ in h1}
                for h2 in right:
                    if not d1 & {l for l, _ in h2}:
                        out.add(tuple(sorted(h1 + h2)))
            return sorted(out)
        if isinstance(f, And):
            for one, other in ((f.left, f.right), (f.right, f.left)):
                if sx.is_pure(one):
                    if not self.holds(one, env, ()):
                        return []
                    return self.models(other, env)
            left = self.models(f.left, env)
            if left is not None:
                return [h for h in left if self.holds(f.right, env, h)]
            right = self.models(f.right, env)
            if right is not None:
                return [h for h in right if self.holds(f.left, env, h)]
            return None
        if isinstance(f, Or):
            left, right = self.models(f.left, env), self.models(f.right, env)
            if left is None or right is None:
                return None
            return sorted(set(left) | set(right))
        if isinstance(f, Exists):
            out = set()
            for v in range(b.vals):
                m = self.models(f.body, tuple(sorted({**e, f.var.name: v}.items())))
                if m is None:
                    return None
                out.update(m)
            return sorted(out)
        return None

    def sat_heaps(self, f, env) -> list:
        m = self.models(f, env)
        if m is None:
            return [h for h in _all_heaps(self.b) if self.holds(f, env, h)]
        return m


def assert_holds(P, st: MachineState, env: dict | None = None, bounds: SLBounds = SLBounds()) -> bool:
    """Does ``st`` (with auxiliary variables ``env``) satisfy assertion ``P``?"""
    if isinstance(P, str):
        P = sx.parse(P, "sl")
    return _Eval(st.s, bounds).holds(P, tuple(sorted((env or {}).items())), st.heap)


# ------------------------------------------------------------------ triples

@dataclass
class TripleVerdict:
    status: str                          # valid | invalid | inconclusive
    initial: MachineState | None = None
    env: dict | None = None
    outcome: object = None
    states_checked: int = 0
    resource_exhausted: int = 0
    warnings: list = field(default_factory=list)

    def __bool__(self):
        return self.status == "valid"

    def to_json(self) -> dict:
        out = {"status": self.status, "states_checked": self.states_checked,
               "resource_exhausted": self.resource_exhausted, "warnings": self.warnings}
        if self.initial is not None:
            out["initial"] = self.initial.to_json()
            out["env"] = self.env
            o = self.outcome
            out["outcome"] = (o.state.to_json() if isinstance(o, Terminated) else type(o).__name__
                              + (f": {o.reason}" if hasattr(o, "reason") else ""))
        return out


def _avars(*fs) -> list[str]:
    out = set()
    for f in fs:
        out |= {v.name for v in sx.free_vars(f) if isinstance(v, AVar)}
    return sorted(out)


def _check_store(args):
    t, store, avars, b, fuel = args
    ev = _Eval(store, b)
    post_evals = {}
    checked = exhausted = 0
    fuel_hit = None
    for envvals in itertools.product(range(b.vals), repeat=len(avars)):
        env = tuple(sorted(zip(avars, envvals)))
        for heap in ev.sat_heaps(t.pre, env):
            checked += 1
            init = MachineState(tuple(sorted(store.items())), heap)
            for r, st, _ in _run(t.cmd, store, dict(heap), fuel, b):
                if isinstance(r, Fault):
                    return ("invalid", init, dict(env), r, checked, exhausted)
                if isinstance(r, ResourceExhausted):
                    exhausted += 1
                    continue
                if isinstance(r, FuelExhausted):
                    fuel_hit = fuel_hit or (init, dict(env), r)
                    continue
                s2, h2 = st
                pe = post_evals.get(tuple(sorted(s2.items())))
                if pe is None:
                    pe = post_evals[tuple(sorted(s2.items()))] = _Eval(s2, b)
                if not pe.holds(t.post, env, tuple(sorted(h2.items()))):
                    return ("invalid", init, dict(env), Terminated(MachineState.make(s2, h2)), checked, exhausted)
    if fuel_hit:
        return ("inconclusive",) + fuel_hit + (checked, exhausted)
    return ("valid", None, None, None, checked, exhausted)


def triple_valid(t: Triple, bounds: SLBounds = SLBounds(), fuel: int = 64, jobs: int = 1) -> TripleVerdict:
    """Partial correctness plus safety, checked over every bounded initial state."""
    if isinstance(t, str):
        t = parse_triple(t)
    pvars = sorted(program_vars(t.cmd) | appears(t.pre) | appears(t.post))
    avars = _avars(t.pre, t.post)
    stores = [dict(zip(pvars, vs)) for vs in itertools.product(range(bounds.vals), repeat=len(pvars))]
    tasks = [(t, s, avars, bounds, fuel) for s in stores]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_check_store, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = []
        for task in tasks:
            results.append(_check_store(task))
            if results[-1][0] == "invalid":
                break
    checked = sum(r[4] for r in results)
    exhausted = sum(r[5] for r in results)
    warnings = []
    if exhausted:
        warnings.append(f"{exhausted} executions hit the bounds and were excluded")
    for r in results:
        if r[0] == "invalid":
            return TripleVerdict("invalid", r[1], r[2], r[3], checked, exhausted, warnings)
    for r in results:
        if r[0] == "inconclusive":
            warnings.append("fuel exhausted: partial correctness not established")
            return TripleVerdict("inconclusive", r[1], r[2], r[3], checked, exhausted, warnings)
    return TripleVerdict("valid", None, None, None, checked, exhausted, warnings)


# ------------------------------------------------------------------ entailment backends

@dataclass
class Obligation:
    lhs: sx.Formula
    rhs: sx.Formula
    status: str = "open"      # discharged | failed | unknown
    backend: str = ""
    detail: str = ""

    def render(self) -> str:
        return f"{sx.render(self.lhs, 'sl')} => {sx.render(self.rhs, 'sl')}"


def _abstract(f, atoms: dict):
    """Propositional skeleton: non-bunched subformulas become variables."""
    if isinstance(f, (Top, Bot, One)):
        return f
    if isinstance(f, Emp):
        return One()
    if isinstance(f, (And, Or, Imp, Fuse, LRes)):
        return type(f)(_abstract(f.left, atoms), _abstract(f.right, atoms))
    if isinstance(f, RRes):
        return LRes(_abstract(f.right, atoms), _abstract(f.left, atoms))
    key = sx.render(f, "sl")
    if key not in atoms:
        atoms[key] = Var(f"p{len(atoms)}")
    return atoms[key]


def entails_sequent(P, Q, budget: int = 40, max_nodes: int = 50_000) -> str:
    """``discharged`` when the propositional skeleton is provable in BI (emp as the unit)."""
    atoms: dict = {}
    a, b = _abstract(P, atoms), _abstract(Q, atoms)
    r = sq.prove(sq.make_sequent(a, b, "bi"), "bi", budget=budget, max_nodes=max_nodes, countermodel=False)
    return "discharged" if r.status == "proved" else "unknown"


def entails_symheap(P, Q) -> str:
    try:
        H, C = sh.from_formula(P), sh.from_formula(Q)
    except (ValueError, TypeError):
        return "unknown"
    if sh.sh_entails(H, C).status == "valid":
        return "discharged"
    return "failed"


def entails_semantic(P, Q, bounds: SLBounds = SLBounds()) -> tuple[str, str]:
    """Validity of ``P => Q`` over all bounded stores and heaps."""
    pvars = sorted(appears(P) | appears(Q))
    avars = _avars(P, Q)
    for vs in itertools.product(range(bounds.vals), repeat=len(pvars)):
        store = dict(zip(pvars, vs))
        ev = _Eval(store, bounds)
        for es in itertools.product(range(bounds.vals), repeat=len(avars)):
            env = tuple(zip(avars, es))
            for h in ev.sat_heaps(P, env):
                if not ev.holds(Q, env, h):
                    st = MachineState(tuple(sorted(store.items())), h)
                    return "failed", f"fails at {st} with {dict(env)}"
    return "discharged", f"valid at bounds ({bounds.locs},{bounds.vals})"


BACKENDS = ("auto", "sequent", "symheap", "semantic")


def discharge(P, Q, backend: str = "auto", bounds: SLBounds = SLBounds()) -> Obligation:
    ob = Obligation(P, Q)
    if P == Q:
        ob.status, ob.backend, ob.detail = "discharged", "syntactic", "identical"
        return ob
    order = {"auto": ["sequent", "symheap", "semantic"], "sequent": ["sequent"],
             "symheap": ["symheap"], "semantic": ["semantic"]}[backend]
    for name in order:
        if name == "sequent":
            st, detail = entails_sequent(P, Q), "BI skeleton"
        elif name == "symheap":
            st, detail = entails_symheap(P, Q), "symbolic heaps"
            if st == "failed" and backend == "auto":
                st = "unknown"
        else:
            st, detail = entails_semantic(P, Q, bounds)
        ob.status, ob.backend, ob.detail = st, name, detail
        if st in ("discharged", "failed"):
            return ob
    if ob.status == "unknown" and backend != "auto":
        ob.status = "failed"
    return ob


# ------------------------------------------------------------------ proof outlines

RULES = ("skip", "assign", "seq", "if", "while", "alloc", "lookup", "mutate", "dispose",
         "frame", "conded", "varel", "varel_exists", "varel_forall")


@dataclass
class OutlineNode:
    """A judgement ``{pre} cmd {post}`` justified by ``rule`` from ``premises``.

    ``params`` carries rule data: ``R`` for frames, ``v`` for variable
    elimination.
    """

    rule: str
    pre: sx.Formula
    cmd: Command
    post: sx.Formula
    premises: tuple = ()
    params: dict = field(default_factory=dict)

    @property
    def triple(self) -> Triple:
        return Triple(self.pre, self.cmd, self.post)

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()

    def to_json(self) -> dict:
        out = {"rule": self.rule, "pre": sx.render(self.pre, "sl"), "cmd": render_command(self.cmd),
               "post": sx.render(self.post, "sl"), "premises": [p.to_json() for p in self.premises]}
        if self.params:
            out["params"] = {k: (sx.render(v, "sl") if not isinstance(v, str) else v)
                             for k, v in self.params.items()}
        return out

    @staticmethod
    def from_json(d: dict) -> "OutlineNode":
        params = {}
        for k, v in d.get("params", {}).items():
            params[k] = sx.parse(v, "sl") if k == "R" else v
        return OutlineNode(d["rule"], sx.parse(d["pre"], "sl"), parse_program(d["cmd"]),
                           sx.parse(d["post"], "sl"), tuple(OutlineNode.from_json(p) for p in d["premises"]),
                           params)


@dataclass
class OutlineResult:
    ok: bool
    node: OutlineNode | None = None
    reason: str = ""
    kind: str = ""             # shape | side-condition | obligation
    obligations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


class OutlineError(Exception):
    def __init__(self, node, kind, reason):
        super().__init__(reason)
        self.node, self.kind, self.reason = node, kind, reason


def bexpr_formula(b):
    """A guard as an assertion; ``<`` and ``<=`` have no assertion counterpart."""
    if isinstance(b, BTrue):
        return Top()
    if isinstance(b, BFalse):
        return Bot()
    if isinstance(b, BCmp):
        if b.op == "=":
            return Eq(b.left, b.right)
        if b.op == "!=":
            return Neq(b.left, b.right)
        raise ValueError(f"guard {render_bexpr(b)} is outside the assertion language")
    if isinstance(b, BNot):
        return sx.neg(bexpr_formula(b.arg))
    if isinstance(b, BAnd):
        return And(bexpr_formula(b.left), bexpr_formula(b.right))
    return Or(bexpr_formula(b.left), bexpr_formula(b.right))


def _negations(f) -> list:
    out = [sx.neg(f)]
    if isinstance(f, Eq):
        out.append(Neq(f.left, f.right))
    if isinstance(f, Neq):
        out.append(Eq(f.left, f.right))
    return out


def _subst_pvar(f, name: str, e):
    return sx.substitute(f, PVar(name), e)


def small_axiom(kind: str, **kw) -> Triple:
    """Instances of the small axioms.

    ``alloc``: X, args, v; ``lookup``: X, a, v, v2; ``mutate``: a, b, v; ``dispose``: a, v.
    """
    if kind == "alloc":
        X, args, v = kw["X"], tuple(kw["args"]), AVar(kw.get("v", "v"))
        new = tuple(sx.subst_expr(a, PVar(X), v) for a in args)
        return Triple(And(Eq(PVar(X), v), Emp()), Cons(X, args), PointsToList(PVar(X), new))
    if kind == "lookup":
        X, a, v, v2 = kw["X"], kw["a"], AVar(kw.get("v", "v")), AVar(kw.get("v2", "v'"))
        return Triple(And(Eq(PVar(X), v), PointsTo(a, v2)), Lookup(X, a),
                      And(Eq(PVar(X), v2), PointsTo(sx.subst_expr(a, PVar(X), v), v2)))
    if kind == "mutate":
        a, b, v = kw["a"], kw["b"], AVar(kw.get("v", "v"))
        return Triple(Exists(v, PointsTo(a, v)), Mutate(a, b), PointsTo(a, b))
    if kind == "dispose":
        a, v = kw["a"], AVar(kw.get("v", "v"))
        return Triple(Exists(v, PointsTo(a, v)), Dispose(a), Emp())
    raise ValueError(kind)


def _expect(node, cond, kind, reason):
    if not cond:
        raise OutlineError(node, kind, reason)


def _check_node(n: OutlineNode, backend: str, bounds: SLBounds, obligations: list):
    r, c, ps = n.rule, n.cmd, n.premises
    shape = lambda cond, why: _expect(n, cond, "shape", why)
    if r not in RULES:
        raise OutlineError(n, "shape", f"unknown rule {r!r}")
    if r == "skip":
        shape(isinstance(c, Skip) and not ps and n.pre == n.post, "skip needs {P} SKIP {P}")
    elif r == "assign":
        shape(isinstance(c, Assign) and not ps, "assign needs X := a")
        shape(n.pre == _subst_pvar(n.post, c.var, c.expr), "precondition is not P[a/X]")
    elif r == "seq":
        shape(isinstance(c, Seq) and len(ps) == 2, "seq needs two premises")
        shape(ps[0].cmd == c.first and ps[1].cmd == c.second, "premise commands do not match")
        shape(ps[0].pre == n.pre and ps[1].post == n.post and ps[0].post == ps[1].pre,
              "midcondition mismatch")
    elif r == "if":
        shape(isinstance(c, If) and len(ps) == 2, "if needs two premises")
        g = bexpr_formula(c.cond)
        shape(ps[0].cmd == c.then and ps[1].cmd == c.orelse, "branch commands do not match")
        shape(ps[0].pre == And(n.pre, g), "then-branch precondition is not P & b")
        shape(ps[1].pre in [And(n.pre, ng) for ng in _negations(g)], "else-branch precondition is not P & not b")
        shape(ps[0].post == n.post and ps[1].post == n.post, "branch postconditions differ")
    elif r == "while":
        shape(isinstance(c, While) and len(ps) == 1, "while needs one premise")
        g = bexpr_formula(c.cond)
        if c.invariant is not None:
            shape(c.invariant == n.pre, "annotated invariant differs from the precondition")
        shape(ps[0].cmd == c.body and ps[0].pre == And(n.pre, g) and ps[0].post == n.pre,
              "premise is not {P & b} C {P}")
        shape(n.post in [And(n.pre, ng) for ng in _negations(g)], "postcondition is not P & not b")
    elif r in ("alloc", "lookup", "mutate", "dispose"):
        shape(not ps, "axioms have no premises")
        inst = _axiom_for(n)
        shape(inst is not None and inst == n.triple, f"not an instance of the {r} axiom")
    elif r == "frame":
        shape(len(ps) == 1 and "R" in n.params, "frame needs one premise and R")
        R = n.params["R"]
        p = ps[0]
        shape(p.cmd == c and n.pre == Fuse(p.pre, R) and n.post == Fuse(p.post, R),
              "conclusion is not {P * R} C {Q * R}")
        clash = modifies(c) & appears(R)
        _expect(n, not clash, "side-condition",
                f"frame mentions modified variable(s) {', '.join(sorted(clash))}")
    elif r == "conded":
        shape(len(ps) == 1 and ps[0].cmd == c, "conded needs one premise with the same command")
        for lhs, rhs in ((n.pre, ps[0].pre), (ps[0].post, n.post)):
            ob = discharge(lhs, rhs, backend, bounds)
            obligations.append(ob)
            _expect(n, ob.status == "discharged", "obligation", f"undischarged: {ob.render()} ({ob.status})")
    elif r in ("varel", "varel_exists", "varel_forall"):
        shape(len(ps) == 1 and ps[0].cmd == c and "v" in n.params, "variable elimination needs v")
        v = AVar(n.params["v"])
        p = ps[0]
        if r == "varel":
            X = n.params.get("X")
            shape(X is not None and p.pre == And(Eq(PVar(X), v), n.pre) and p.post == n.post,
                  "premise is not {(X = v) & P} C {R}")
            _expect(n, v not in sx.free_vars(n.pre) | sx.free_vars(n.post), "side-condition",
                    f"{v.name} is not fresh for P, R")
        elif r == "varel_exists":
            shape(n.pre == Exists(v, p.pre) and p.post == n.post, "conclusion is not {E v. P} C {R}")
            _expect(n, v not in sx.free_vars(n.post), "side-condition", f"{v.name} is not fresh for R")
        else:
            shape(n.post == Forall(v, p.post) and p.pre == n.pre, "conclusion is not {P} C {A v. R}")
            _expect(n, v not in sx.free_vars(n.pre), "side-condition", f"{v.name} is not fresh for P")


def _axiom_for(n: OutlineNode):
    c = n.cmd
    try:
        if n.rule == "alloc" and isinstance(c, Cons):
            v = n.pre.left.right.name
            return small_axiom("alloc", X=c.var, args=c.args, v=v)
        if n.rule == "lookup" and isinstance(c, Lookup):
            return small_axiom("lookup", X=c.var, a=c.addr, v=n.pre.left.right.name, v2=n.pre.right.value.name)
        if n.rule == "mutate" and isinstance(c, Mutate):
            return small_axiom("mutate", a=c.addr, b=c.value, v=n.pre.var.name)
        if n.rule == "dispose" and isinstance(c, Dispose):
            return small_axiom("dispose", a=c.addr, v=n.pre.var.name)
    except AttributeError:
        return None
    return None


def check_outline(o: OutlineNode, backend: str = "auto", bounds: SLBounds = SLBounds()) -> OutlineResult:
    """Check every node of a proof outline; the first failing node is reported."""
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}")
    obligations: list = []
    try:
        for n in o.nodes():
            _check_node(n, backend, bounds, obligations)
    except OutlineError as e:
        return OutlineResult(False, e.node, e.reason, e.kind, obligations)
    return OutlineResult(True, None, "", "", obligations)


def axiom_node(kind: str, **kw) -> OutlineNode:
    t = small_axiom(kind, **kw)
    return OutlineNode(kind, t.pre, t.cmd, t.post)


def frame_node(premise: OutlineNode, R) -> OutlineNode:
    return OutlineNode("frame", Fuse(premise.pre, R), premise.cmd, Fuse(premise.post, R), (premise,), {"R": R})


def conded_node(premise: OutlineNode, pre=None, post=None) -> OutlineNode:
    return OutlineNode("conded", premise.pre if pre is None else pre, premise.cmd,
                       premise.post if post is None else post, (premise,))


# ------------------------------------------------------------------ global backward specifications

def _p(text):
    return sx.parse(text, "sl")


def dispose_outline(a="X", R="Y |-> 1") -> OutlineNode:
    """``{(a |-> _) * R} DISPOSE a {R}``."""
    a, R = sx.parse_expr(a), _p(R)
    ax = axiom_node("dispose", a=a)
    fr = frame_node(ax, R)
    return conded_node(fr, post=R)


def mutate_outline(a="X", b="3", R="X |-> 3") -> OutlineNode:
    """``{(a |-> _) * ((a |-> b) -* R)} [a] := b {R}``."""
    a, b, R = sx.parse_expr(a), sx.parse_expr(b), _p(R)
    ax = axiom_node("mutate", a=a, b=b)
    fr = frame_node(ax, LRes(ax.post, R))
    return conded_node(fr, post=R)


def lookup_outline(X="X", a="Y", R="Y |-> X") -> OutlineNode:
    """``{(a |-> v') * ((a |-> v') -* R[v'/X])} X := [a] {R}``."""
    a, R = sx.parse_expr(a), _p(R)
    v, v2 = AVar("v"), AVar("v'")
    ax = axiom_node("lookup", X=X, a=a, v="v", v2="v'")
    a_old = sx.subst_expr(a, PVar(X), v)
    alpha = LRes(PointsTo(a_old, v2), R)
    alpha_x = _subst_pvar(alpha, X, v2)
    fr = frame_node(ax, alpha_x)
    # drop the equality, move the frame back to R's variables
    c1 = conded_node(fr, post=Fuse(PointsTo(a_old, v2), alpha))
    R2 = _subst_pvar(R, X, v2)
    body = Fuse(PointsTo(a, v2), LRes(PointsTo(a, v2), R2))
    c2 = conded_node(c1, pre=And(Eq(PVar(X), v), body), post=R)
    return OutlineNode("varel", body, c2.cmd, R, (c2,), {"v": v.name, "X": X})


def alloc_outline(X="X", args=("Y", "0"), R="X |->l [Y, 0]") -> OutlineNode:
    """``{A v'. (v' |->l args) -* R[v'/X]} X := CONS(args) {R}``.

    The frame is the universally quantified wand itself, so no bound
    variable is captured when it is instantiated at the new address.
    """
    args = tuple(sx.parse_expr(a) for a in args)
    R = _p(R)
    v, v2 = AVar("v"), AVar("v'")
    ax = axiom_node("alloc", X=X, args=args, v="v")
    old = tuple(sx.subst_expr(a, PVar(X), v) for a in args)
    spec = Forall(v2, LRes(PointsToList(v2, args), _subst_pvar(R, X, v2)))
    frame = Forall(v2, LRes(PointsToList(v2, old), _subst_pvar(R, X, v2)))
    fr = frame_node(ax, frame)
    cell = PointsToList(v2, old)
    mid = Exists(v2, And(Eq(PVar(X), v2), Fuse(cell, LRes(cell, _subst_pvar(R, X, v2)))))
    c1 = conded_node(fr, pre=And(Eq(PVar(X), v), spec), post=mid)
    c2 = conded_node(c1, post=R)
    return OutlineNode("varel", spec, c2.cmd, R, (c2,), {"v": v.name, "X": X})


def global_outlines() -> dict:
    return {"deallocation": dispose_outline(), "mutation": mutate_outline(),
            "lookup": lookup_outline(), "allocation": alloc_outline()}


# ------------------------------------------------------------------ worked examples

def cons_frame_counterexample() -> Triple:
    """Framing ``X = 2`` around an allocation into ``X``."""
    return parse_triple("{top * X = 2} X := CONS(2) {top * X = 2}")


def cons_frame_outline() -> OutlineNode:
    """The unsound frame step: ``{top} X := CONS(2) {top}`` framed with ``X = 2``."""
    ax = axiom_node("alloc", X="X", args=(Num(2),), v="v")
    fr = frame_node(ax, Top())
    c = conded_node(fr, pre=And(Eq(PVar("X"), AVar("v")), Top()), post=Top())
    base = OutlineNode("varel", Top(), c.cmd, Top(), (c,), {"v": "v", "X": "X"})
    return frame_node(base, Eq(PVar("X"), Num(2)))
