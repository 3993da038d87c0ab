"""Finite GBI-algebras: Heyting algebras carrying a residuated monoid."""
from __future__ import annotations

import itertools
import json
from functools import reduce

import numpy as np

from ..syntax import Formula, normalize, parse
from .lattice import FiniteDistLattice


class ResidualFailure(ValueError):
    """Raised when a multiplication is not residuated.

    ``witness`` is ``(side, x, z)``: no greatest ``y`` with ``x . y <= z``
    (side ``'left'``) or ``y . x <= z`` (side ``'right'``) exists.
    """

    def __init__(self, side: str, x: int, z: int):
        super().__init__(f"no {side} residual for x={x}, z={z}")
        self.witness = (side, x, z)


class AxiomFailure(ValueError):
    def __init__(self, law: str, witness: tuple):
        super().__init__(f"{law} fails at {witness}")
        self.law = law
        self.witness = witness


def _greatest(leq: np.ndarray, ok: np.ndarray) -> np.ndarray:
    """For each column of ``ok`` (candidates by row), the greatest candidate or -1."""
    n = leq.shape[0]
    okf = ok.astype(np.int32)
    # bad[y, z]: some candidate y' for z is not below y
    bad = ((~leq).T.astype(np.int32) @ okf) > 0
    good = ok & ~bad
    out = np.full(ok.shape[1], -1, dtype=np.int64)
    rows, cols = np.nonzero(good)
    out[cols] = rows
    del n
    return out


def residuals_from_mult(lat: FiniteDistLattice, mult) -> tuple[np.ndarray, np.ndarray]:
    """Left and right residuals ``x\\z`` and ``z/y`` of a multiplication table.

    Raises ``ResidualFailure`` when some residual does not exist.
    """
    mult = np.asarray(mult, dtype=np.int64)
    n = lat.n
    leq = lat.leq
    lres = np.empty((n, n), dtype=np.int64)
    rres = np.empty((n, n), dtype=np.int64)
    for x in range(n):
        ok = leq[mult[x, :], :]          # ok[y, z]: x.y <= z
        g = _greatest(leq, ok)
        if (g < 0).any():
            raise ResidualFailure("left", x, int(np.flatnonzero(g < 0)[0]))
        lres[x] = g
        ok = leq[mult[:, x], :]          # ok[y, z]: y.x <= z
        g = _greatest(leq, ok)
        if (g < 0).any():
            raise ResidualFailure("right", x, int(np.flatnonzero(g < 0)[0]))
        rres[:, x] = g
    return lres, rres


class FiniteGBIAlgebra:
    """A finite GBI-algebra.

    ``rres[z, y]`` is ``z / y`` and ``lres[x, z]`` is ``x \\ z``.
    """

    def __init__(self, lattice: FiniteDistLattice, mult, unit: int, name: str | None = None,
                 lres=None, rres=None, check: bool = True):
        self.lattice = lattice
        self.n = lattice.n
        self.leq = lattice.leq
        self.meet, self.join, self.imp = lattice.meet, lattice.join, lattice.imp
        self.bot, self.top = lattice.bot, lattice.top
        self.labels = lattice.labels
        self.mult = np.asarray(mult, dtype=np.int64)
        self.unit = int(unit)
        self.name = name
        if lres is None or rres is None:
            lres, rres = residuals_from_mult(lattice, self.mult)
        self.lres = np.asarray(lres, dtype=np.int64)
        self.rres = np.asarray(rres, dtype=np.int64)
        if check:
            self.check()

    # -- axioms

    def check(self) -> None:
        """Verify every defining law; raise ``AxiomFailure`` with a witness.

        Each residuation law is checked as a Galois connection: both maps
        monotone (on covering pairs) plus the unit and counit inequalities.
        Residuation makes the product join-preserving, so associativity is
        checked on join-irreducibles only, and Heyting residuation already
        forces distributivity.
        """
        n, leq, m = self.n, self.leq, self.mult
        u = self.unit
        ar = np.arange(n)
        for x in range(n):
            if m[u, x] != x or m[x, u] != x:
                raise AxiomFailure("unit", (x,))
        strict = leq & ~np.eye(n, dtype=bool)
        sf = strict.astype(np.float32)
        cover = strict & ~((sf @ sf) > 0)
        lo, hi = np.nonzero(cover)
        # monotonicity of the product and of both residuals in the numerator
        for name, table, axis in (("product", m, 0), ("product", m, 1), ("left residual", self.lres, 1),
                                  ("right residual", self.rres, 0), ("meet", self.meet, 1),
                                  ("implication", self.imp, 1)):
            a = table[lo, :] if axis == 0 else table[:, lo].T
            b = table[hi, :] if axis == 0 else table[:, hi].T
            bad = ~leq[a, b]
            if bad.any():
                i, j = np.argwhere(bad)[0]
                raise AxiomFailure(f"{name} monotonicity", (int(lo[i]), int(hi[i]), int(j)))
        X = ar[:, None]
        Z = ar[None, :]
        checks = (
            ("left residuation", leq[m[X, self.lres], Z]),             # x.(x\z) <= z
            ("left residuation", leq[Z, self.lres[X, m]]),             # y <= x\(x.y)
            ("right residuation", leq[m[self.rres, Z], X]),           # (z/y).y <= z  (rows z, cols y)
            ("right residuation", leq[X, self.rres[m, Z]]),           # y <= (y.x)/x
            ("heyting residuation", leq[self.meet[X, self.imp], Z]),
            ("heyting residuation", leq[Z, self.imp[X, self.meet]]),
        )
        for name, ok in checks:
            if not ok.all():
                i, j = np.argwhere(~ok)[0]
                raise AxiomFailure(name, (int(i), int(j)))
        lower = cover.sum(axis=0)
        J = np.flatnonzero(lower == 1)
        for x in J:
            lhs = m[m[x, J]][:, J]                       # (x.y).z
            rhs = m[x][m[np.ix_(J, J)]]                  # x.(y.z)
            if (lhs != rhs).any():
                i, j = np.argwhere(lhs != rhs)[0]
                raise AxiomFailure("associativity", (int(x), int(J[i]), int(J[j])))

    # -- conveniences

    def element(self, label) -> int:
        if isinstance(label, (int, np.integer)):
            return int(label)
        return self.labels.index(label)

    def table(self, op: str) -> np.ndarray:
        return {"meet": self.meet, "join": self.join, "imp": self.imp, "mult": self.mult,
                "lres": self.lres, "rres": self.rres}[op]

    def is_commutative(self) -> bool:
        return bool((self.mult == self.mult.T).all())

    def neg(self, x):
        return self.imp[x, self.bot]

    def __repr__(self):
        return f"FiniteGBIAlgebra(n={self.n}{', ' + self.name if self.name else ''})"

    # -- evaluation

    def evaluate(self, t, env: dict):
        """Evaluate a formula or normal form; ``env`` maps variable names to
        element indices or integer arrays (evaluated elementwise)."""
        if not isinstance(t, tuple):
            t = normalize(t, "gbi")
        return _eval(self, t, env)

    def assignments(self, names: list[str]) -> dict:
        """Every assignment of the given variables, as parallel index arrays."""
        k = len(names)
        if k == 0:
            return {}
        grids = np.indices((self.n,) * k).reshape(k, -1)
        return {v: grids[i] for i, v in enumerate(names)}

    def holds(self, lhs, rhs, env: dict | None = None) -> bool:
        """``lhs <= rhs`` under every assignment (or the given one)."""
        return self.counterexample(lhs, rhs, env) is None

    def counterexample(self, lhs, rhs, env: dict | None = None):
        a, b = _as_nf(lhs), _as_nf(rhs)
        if env is None:
            names = sorted(_nf_var_names(a) | _nf_var_names(b))
            env = self.assignments(names)
        else:
            names = sorted(env)
        x = np.broadcast_to(np.asarray(_eval(self, a, env)), np.broadcast(*(list(env.values()) or [0])).shape)
        y = np.broadcast_to(np.asarray(_eval(self, b, env)), x.shape)
        bad = ~self.leq[x, y]
        if not np.any(bad):
            return None
        i = int(np.flatnonzero(np.atleast_1d(bad))[0])
        return {v: int(np.atleast_1d(np.broadcast_to(env[v], x.shape))[i]) for v in names}

    def equation_holds(self, lhs, rhs) -> bool:
        return self.holds(lhs, rhs) and self.holds(rhs, lhs)

    # -- serialization

    def to_json(self) -> dict:
        return {"n": self.n, "leq": self.leq.astype(int).tolist(), "mult": self.mult.tolist(),
                "unit": self.unit, "labels": list(self.labels), "name": self.name}

    @classmethod
    def from_json(cls, data) -> "FiniteGBIAlgebra":
        if isinstance(data, str):
            data = json.loads(data)
        lat = FiniteDistLattice(np.array(data["leq"], dtype=bool), data.get("labels"))
        return cls(lat, np.array(data["mult"]), data["unit"], data.get("name"))

    def encoding(self) -> tuple:
        return (tuple(map(tuple, self.leq.astype(int))), tuple(map(tuple, self.mult)), self.unit)


def _as_nf(t):
    if isinstance(t, str):
        return normalize(parse(t), "gbi")
    if isinstance(t, tuple):
        return t
    return normalize(t, "gbi")


def _nf_var_names(t: tuple) -> set[str]:
    if t[0] == "var":
        return {t[1]}
    out = set()
    if t[0] in ("and", "or", "fuse"):
        for x in t[1]:
            out |= _nf_var_names(x)
    elif t[0] in ("imp", "lres", "rres"):
        out = _nf_var_names(t[1]) | _nf_var_names(t[2])
    return out


def _eval(alg: FiniteGBIAlgebra, t: tuple, env: dict):
    tag = t[0]
    if tag == "var":
        return env[t[1]]
    if tag == "top":
        return alg.top
    if tag == "bot":
        return alg.bot
    if tag == "one":
        return alg.unit
    if tag == "and":
        return reduce(lambda a, b: alg.meet[a, b], (_eval(alg, x, env) for x in t[1]))
    if tag == "or":
        return reduce(lambda a, b: alg.join[a, b], (_eval(alg, x, env) for x in t[1]))
    if tag == "fuse":
        return reduce(lambda a, b: alg.mult[a, b], (_eval(alg, x, env) for x in t[1]))
    a, b = _eval(alg, t[1], env), _eval(alg, t[2], env)
    if tag == "imp":
        return alg.imp[a, b]
    if tag == "lres":
        return alg.lres[a, b]
    if tag == "rres":
        return alg.rres[a, b]
    raise ValueError(f"cannot evaluate {tag!r} in a GBI-algebra")


def linear_algebra(order: list[str], table: dict, unit: str, name: str | None = None,
                   bottom: str = "bot") -> FiniteGBIAlgebra:
    """Build an algebra on a chain ``bottom < order[0] < order[1] < ...``.

    ``table[a][b]`` gives ``a . b`` for the non-bottom elements; products
    with the bottom are the bottom.
    """
    labels = [bottom] + list(order)
    n = len(labels)
    leq = np.triu(np.ones((n, n), dtype=bool))
    lat = FiniteDistLattice(leq, labels)
    mult = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(labels):
        for k, b in enumerate(labels):
            if i and k:
                mult[i, k] = labels.index(table[a][b])
    return FiniteGBIAlgebra(lat, mult, labels.index(unit), name)


def product_table(rows: dict, header: list[str]) -> dict:
    return {a: dict(zip(header, vals)) for a, vals in rows.items()}


def all_triples(n: int):
    return itertools.product(range(n), repeat=3)
