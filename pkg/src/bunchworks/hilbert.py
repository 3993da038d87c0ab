"""Hilbert-style proof checking for HJ, HGBI and HBI.

A proof is a list of steps, each a formula with a justification.  Step
references are 1-based and must point to earlier steps.  Justifications:

``Hypothesis(i)``              the i-th member of the hypothesis list (1-based)
``AxiomInstance(id, subst)``   a schema instance; ``subst`` maps schema letters to formulas
``ModusPonens(j, k)``          step j is ``a``, step k is ``a -> b``
``ResidL-fwd(j)`` / ``-bwd``   ``x.y -> z``  to / from  ``y -> x\\z``   (HGBI)
``ResidR-fwd(j)`` / ``-bwd``   ``x.y -> z``  to / from  ``x -> z/y``    (HGBI)
``MonoFuse(j, z)``             ``x -> y``  gives  ``x*z -> y*z``        (HBI)
``WandIntro(j)``               ``x -> y``  gives  ``1 -> (x -* y)``     (HBI)

HBI here is the variant with the extra associativity, unit, evaluation
and currying axioms and the two simple rules above.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import syntax as sx
from .syntax import And, Bot, Formula, Fuse, Imp, LRes, One, Or, RRes, Top, Var, iff

SYSTEMS = ("HJ", "HGBI", "HBI")

_x, _y, _z = Var("x"), Var("y"), Var("z")

HJ_AXIOMS = {
    "bot_elim": Imp(Bot(), _x),
    "top_intro": Imp(_x, Top()),
    "K": Imp(_x, Imp(_y, _x)),
    "S": Imp(Imp(_x, Imp(_y, _z)), Imp(Imp(_x, _y), Imp(_x, _z))),
    "and_elim_l": Imp(And(_x, _y), _x),
    "and_elim_r": Imp(And(_x, _y), _y),
    "and_intro": Imp(_x, Imp(_y, And(_x, _y))),
    "or_intro_l": Imp(_x, Or(_x, _y)),
    "or_intro_r": Imp(_x, Or(_y, _x)),
    "or_elim": Imp(Imp(_x, _z), Imp(Imp(_y, _z), Imp(Or(_x, _y), _z))),
}

HGBI_AXIOMS = {
    **HJ_AXIOMS,
    "fuse_assoc": iff(Fuse(Fuse(_x, _y), _z), Fuse(_x, Fuse(_y, _z))),
    "unit_l": iff(Fuse(One(), _x), _x),
    "unit_r": iff(Fuse(_x, One()), _x),
}

HBI_AXIOMS = {
    **HJ_AXIOMS,
    "fuse_assoc": iff(Fuse(Fuse(_x, _y), _z), Fuse(_x, Fuse(_y, _z))),
    "fuse_comm": Imp(Fuse(_x, _y), Fuse(_y, _x)),
    "unit_r": iff(Fuse(_x, One()), _x),
    "wand_elim": Imp(Fuse(_x, LRes(_x, _y)), _y),
    "wand_curry": iff(LRes(_x, LRes(_y, _z)), LRes(Fuse(_x, _y), _z)),
}

AXIOMS = {"HJ": HJ_AXIOMS, "HGBI": HGBI_AXIOMS, "HBI": HBI_AXIOMS}

RULES = {
    "HJ": {"Hypothesis", "AxiomInstance", "ModusPonens"},
    "HGBI": {"Hypothesis", "AxiomInstance", "ModusPonens",
             "ResidL-fwd", "ResidL-bwd", "ResidR-fwd", "ResidR-bwd"},
    "HBI": {"Hypothesis", "AxiomInstance", "ModusPonens", "MonoFuse", "WandIntro"},
}

_CONNECTIVES = {"HJ": (Var, Top, Bot, And, Or, Imp),
                "HGBI": (Var, Top, Bot, One, And, Or, Imp, Fuse, LRes, RRes),
                "HBI": (Var, Top, Bot, One, And, Or, Imp, Fuse, LRes)}


@dataclass(frozen=True)
class Step:
    formula: Formula
    kind: str
    args: tuple = ()


@dataclass
class HilbertProof:
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def to_json(self, system: str = "HGBI") -> str:
        dialect = "bi" if system == "HBI" else "gbi"
        out = []
        for s in self.steps:
            args = list(s.args)
            if s.kind == "AxiomInstance":
                args = [args[0], {k: sx.render(v, dialect) for k, v in args[1].items()}]
            elif s.kind == "MonoFuse":
                args = [args[0], sx.render(args[1], dialect)]
            out.append({"formula": sx.render(s.formula, dialect), "by": {"kind": s.kind, "args": args}})
        return json.dumps(out, indent=2)

    @classmethod
    def from_json(cls, text, system: str = "HGBI") -> "HilbertProof":
        dialect = "bi" if system == "HBI" else "gbi"
        data = json.loads(text) if isinstance(text, str) else text
        steps = []
        for item in data:
            kind = item["by"]["kind"]
            args = list(item["by"].get("args", []))
            if kind == "AxiomInstance":
                args = [args[0], {k: sx.parse(v, dialect) for k, v in args[1].items()}]
            elif kind == "MonoFuse":
                args = [args[0], sx.parse(args[1], dialect)]
            steps.append(Step(sx.parse(item["formula"], dialect), kind, tuple(args)))
        return cls(steps)


@dataclass
class Verdict:
    ok: bool
    step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


# ------------------------------------------------------------------ matching

def match(schema: Formula, f: Formula, subst: dict | None = None) -> dict | None:
    """Substitution of formulas for the schema's variables making it ``f``."""
    subst = dict(subst or {})
    if isinstance(schema, Var):
        bound = subst.get(schema.name)
        if bound is None:
            subst[schema.name] = f
            return subst
        return subst if bound == f else None
    if type(schema) is not type(f):
        return None
    if isinstance(schema, sx.BINARY):
        subst = match(schema.left, f.left, subst)
        return None if subst is None else match(schema.right, f.right, subst)
    return subst if schema == f else None


def check_axiom_instance(f: Formula, system: str = "HGBI"):
    """``(axiom_id, substitution)`` for the first schema ``f`` instantiates, else ``None``."""
    if isinstance(f, str):
        f = sx.parse(f, "bi" if system == "HBI" else "gbi")
    for name, schema in AXIOMS[system].items():
        s = match(schema, f)
        if s is not None:
            return name, s
    return None


def _in_language(f: Formula, system: str) -> bool:
    allowed = _CONNECTIVES[system]
    return all(isinstance(g, allowed) for g in sx.subformulas(f))


# ------------------------------------------------------------------ checking

def check_proof(gamma, proof, system: str = "HGBI", goal: Formula | None = None) -> Verdict:
    """Check every step of ``proof`` from hypotheses ``gamma``."""
    if system not in SYSTEMS:
        raise ValueError(f"system must be one of {SYSTEMS}")
    dialect = "bi" if system == "HBI" else "gbi"
    gamma = [sx.parse(g, dialect) if isinstance(g, str) else g for g in gamma]
    steps = proof.steps if isinstance(proof, HilbertProof) else list(proof)
    if not steps:
        return Verdict(False, None, "empty proof")
    for i, st in enumerate(steps, start=1):
        reason = _check_step(gamma, steps, i, st, system)
        if reason:
            return Verdict(False, i, reason)
    if goal is not None and steps[-1].formula != goal:
        return Verdict(False, len(steps), "last formula is not the goal")
    return Verdict(True)


def _ref(steps, i, j):
    if not isinstance(j, int) or not 1 <= j < i:
        raise _Bad(f"reference {j!r} is not an earlier step")
    return steps[j - 1].formula


class _Bad(Exception):
    pass


def _check_step(gamma, steps, i, st: Step, system: str) -> str:
    f, kind, args = st.formula, st.kind, st.args
    if kind not in RULES[system]:
        return f"justification {kind!r} not available in {system}"
    if not _in_language(f, system):
        return f"formula uses a connective outside {system}"
    try:
        if kind == "Hypothesis":
            (k,) = args
            if not isinstance(k, int) or not 1 <= k <= len(gamma):
                return f"no hypothesis {k!r}"
            return "" if gamma[k - 1] == f else "formula differs from the hypothesis"
        if kind == "AxiomInstance":
            name, subst = args
            schema = AXIOMS[system].get(name)
            if schema is None:
                return f"unknown axiom {name!r}"
            if sx.substitute_many(schema, dict(subst)) != f:
                return f"not the instance of {name} under the given substitution"
            return ""
        if kind == "ModusPonens":
            j, k = args
            a, imp = _ref(steps, i, j), _ref(steps, i, k)
            if not isinstance(imp, Imp) or imp.left != a or imp.right != f:
                return f"modus ponens shape mismatch on steps {j}, {k}"
            return ""
        (j, *rest) = args
        prem = _ref(steps, i, j)
        if kind == "ResidL-fwd":        # x.y -> z  /  y -> x\z
            ok = (_is(prem, Imp) and _is(prem.left, Fuse) and _is(f, Imp) and _is(f.right, LRes)
                  and f.left == prem.left.right and f.right.left == prem.left.left
                  and f.right.right == prem.right)
        elif kind == "ResidL-bwd":
            ok = (_is(f, Imp) and _is(f.left, Fuse) and _is(prem, Imp) and _is(prem.right, LRes)
                  and prem.left == f.left.right and prem.right.left == f.left.left
                  and prem.right.right == f.right)
        elif kind == "ResidR-fwd":      # x.y -> z  /  x -> z/y
            ok = (_is(prem, Imp) and _is(prem.left, Fuse) and _is(f, Imp) and _is(f.right, RRes)
                  and f.left == prem.left.left and f.right.right == prem.left.right
                  and f.right.left == prem.right)
        elif kind == "ResidR-bwd":
            ok = (_is(f, Imp) and _is(f.left, Fuse) and _is(prem, Imp) and _is(prem.right, RRes)
                  and prem.left == f.left.left and prem.right.right == f.left.right
                  and prem.right.left == f.right)
        elif kind == "MonoFuse":        # x -> y  /  x*z -> y*z
            z = rest[0] if rest else (f.left.right if _is(f, Imp) and _is(f.left, Fuse) else None)
            ok = (_is(prem, Imp) and z is not None and f == Imp(Fuse(prem.left, z), Fuse(prem.right, z)))
        elif kind == "WandIntro":       # x -> y  /  1 -> (x -* y)
            ok = _is(prem, Imp) and f == Imp(One(), LRes(prem.left, prem.right))
        else:
            return f"unknown justification {kind!r}"
        return "" if ok else f"{kind} shape mismatch with step {j}"
    except _Bad as e:
        return str(e)
    except (TypeError, ValueError):
        return f"malformed arguments {args!r}"


def _is(f, cls) -> bool:
    return isinstance(f, cls)


# ------------------------------------------------------------------ building

class ProofBuilder:
    """Accumulates steps; every method returns the (1-based) step number."""

    def __init__(self, system: str = "HGBI"):
        self.system = system
        self.steps: list[Step] = []

    def _add(self, f, kind, *args) -> int:
        self.steps.append(Step(f, kind, tuple(args)))
        return len(self.steps)

    def formula(self, i: int) -> Formula:
        return self.steps[i - 1].formula

    def hyp(self, f, k: int) -> int:
        return self._add(f, "Hypothesis", k)

    def axiom(self, name: str, **subst) -> int:
        f = sx.substitute_many(AXIOMS[self.system][name], subst)
        return self._add(f, "AxiomInstance", name, subst)

    def mp(self, j: int, k: int) -> int:
        return self._add(self.formula(k).right, "ModusPonens", j, k)

    def resid_l_fwd(self, j):
        p = self.formula(j)
        return self._add(Imp(p.left.right, LRes(p.left.left, p.right)), "ResidL-fwd", j)

    def resid_l_bwd(self, j):
        p = self.formula(j)
        return self._add(Imp(Fuse(p.right.left, p.left), p.right.right), "ResidL-bwd", j)

    def resid_r_fwd(self, j):
        p = self.formula(j)
        return self._add(Imp(p.left.left, RRes(p.right, p.left.right)), "ResidR-fwd", j)

    def resid_r_bwd(self, j):
        p = self.formula(j)
        return self._add(Imp(Fuse(p.left, p.right.right), p.right.left), "ResidR-bwd", j)

    def mono_fuse(self, j, z):
        p = self.formula(j)
        return self._add(Imp(Fuse(p.left, z), Fuse(p.right, z)), "MonoFuse", j, z)

    def wand_intro(self, j):
        p = self.formula(j)
        return self._add(Imp(One(), LRes(p.left, p.right)), "WandIntro", j)

    def identity(self, a: Formula) -> int:
        """``a -> a`` from K and S."""
        k1 = self.axiom("K", x=a, y=Imp(a, a))
        s = self.axiom("S", x=a, y=Imp(a, a), z=a)
        m = self.mp(k1, s)
        k2 = self.axiom("K", x=a, y=a)
        return self.mp(k2, m)

    def transitivity(self, ab: int, bc: int) -> int:
        """From steps ``a -> b`` and ``b -> c`` derive ``a -> c``."""
        a, b = self.formula(ab).left, self.formula(ab).right
        c = self.formula(bc).right
        k = self.axiom("K", x=Imp(b, c), y=a)
        m1 = self.mp(bc, k)
        s = self.axiom("S", x=a, y=b, z=c)
        m2 = self.mp(m1, s)
        return self.mp(ab, m2)

    def proof(self) -> HilbertProof:
        return HilbertProof(list(self.steps))


def transitivity_proof(a=_x, b=_y, c=_z) -> tuple[list, HilbertProof]:
    """``{a -> b, b -> c}`` proves ``a -> c`` in HJ."""
    pb = ProofBuilder("HJ")
    gamma = [Imp(a, b), Imp(b, c)]
    h1 = pb.hyp(gamma[0], 1)
    h2 = pb.hyp(gamma[1], 2)
    pb.transitivity(h1, h2)
    return gamma, pb.proof()


def antitone_lres_proof(x=_x, y=_y, z=_z) -> tuple[list, HilbertProof, list[int]]:
    """``{x -> y}`` proves ``y\\z -> x\\z`` in HGBI.

    Also returns the step numbers carrying the seven milestone formulas
    ``x->y``, ``y\\z->y\\z``, ``y(y\\z)->z``, ``y->z/(y\\z)``,
    ``x->z/(y\\z)``, ``x(y\\z)->z``, ``y\\z->x\\z``.
    """
    pb = ProofBuilder("HGBI")
    gamma = [Imp(x, y)]
    s1 = pb.hyp(gamma[0], 1)
    s2 = pb.identity(LRes(y, z))
    s3 = pb.resid_l_bwd(s2)
    s4 = pb.resid_r_fwd(s3)
    s5 = pb.transitivity(s1, s4)
    s6 = pb.resid_r_bwd(s5)
    s7 = pb.resid_l_fwd(s6)
    return gamma, pb.proof(), [s1, s2, s3, s4, s5, s6, s7]


def theoremhood_bridge(f, mode: str = "gbi"):
    """The sequent ``top <= f``."""
    from .sequent import theorem_sequent
    if isinstance(f, str):
        f = sx.parse(f, "bi" if mode == "bi" else "gbi")
    return theorem_sequent(f, mode)


def axiom_formulas(system: str) -> dict:
    return dict(AXIOMS[system])
