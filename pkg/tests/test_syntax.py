import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bunchworks import syntax as sx
from bunchworks.syntax import (AVar, Add, And, Eq, Exists, Fuse, Imp, LRes, Num, PointsToList,
                               PVar, Var, parse, normalize, render)

atoms = st.sampled_from([Var("x"), Var("y"), Var("z"), sx.Top(), sx.Bot(), sx.One()])


def formulas(ops=(And, sx.Or, Imp, Fuse, LRes, sx.RRes)):
    return st.recursive(atoms, lambda kids: st.builds(lambda op, a, b: op(a, b),
                                                      st.sampled_from(ops), kids, kids),
                        max_leaves=8)


def test_wand_in_bi_dialect():
    assert parse("x & (y -* z)", "bi") == And(Var("x"), LRes(Var("y"), Var("z")))


def test_fusion_associates_left_and_flattens():
    f = parse("x . y . z")
    assert f == Fuse(Fuse(Var("x"), Var("y")), Var("z"))
    assert normalize(f) == ("fuse", (("var", "x"), ("var", "y"), ("var", "z")))


def test_points_to_list():
    assert parse("x |->l [1,2]", "sl") == PointsToList(AVar("x"), (Num(1), Num(2)))


def test_precedence():
    # fusion binds tighter than residuals, which bind tighter than meet and join
    assert parse("x . y \\ z") == LRes(Fuse(Var("x"), Var("y")), Var("z"))
    assert parse("x & y \\ z") == And(Var("x"), LRes(Var("y"), Var("z")))
    assert parse("x & y -> z") == Imp(And(Var("x"), Var("y")), Var("z"))
    assert parse("x -> y -> z") == Imp(Var("x"), Imp(Var("y"), Var("z")))


def test_normal_form_examples():
    assert normalize(parse("(x . y) . z")) == normalize(parse("x . (y . z)"))
    assert normalize(parse("x & top")) == normalize(parse("x"))
    assert normalize(parse("y & x")) == normalize(parse("x & y"))
    for text in ("x . 1", "1 . x", "top & x", "x | bot", "bot | x"):
        assert normalize(parse(text)) == ("var", "x")
    assert normalize(parse("x . y")) != normalize(parse("y . x"))
    assert normalize(parse("x . y"), "bi") == normalize(parse("y . x"), "bi")


def test_parse_errors_carry_positions():
    with pytest.raises(sx.ParseError) as e:
        parse("x &")
    assert e.value.pos == 3
    with pytest.raises(sx.DialectError):
        parse("x \\ y", "bi")
    with pytest.raises(sx.ParseError):
        parse("x |-> y")          # pointer atoms belong to the assertion dialect
    with pytest.raises(sx.ParseError):
        parse("x |->l []", "sl")


def test_sl_variable_sorts():
    f = parse("E v. X = v * top", "sl")
    assert sx.free_vars(f) == {PVar("X")}
    with pytest.raises(sx.ParseError):
        parse("E X. X = 1", "sl")    # quantifiers bind logical variables only


def test_bunch_decompositions():
    ds = sx.bunch_decompositions(parse("x & (y . z)"))
    assert len(ds) == 5
    subs = sorted(normalize(s) for _, s in ds)
    assert subs == sorted(normalize(parse(t)) for t in ("x & y . z", "x", "y . z", "y", "z"))
    for u, s in ds:
        assert u.plug(s) == normalize(parse("x & (y . z)"))
    assert [sx.render(s) for _, s in sx.bunch_decompositions(parse("x -> y"))] == ["x -> y"]
    assert len(sx.bunch_decompositions(sx.One())) == 1


@given(formulas(ops=(Imp, sx.Or, LRes)))
def test_decompositions_of_non_bunch_roots(f):
    assert len(sx.bunch_decompositions(f)) == 1


@settings(max_examples=60)
@given(formulas(ops=(And, Fuse, Imp)))
def test_decomposition_count_matches_independent_count(f):
    nf = normalize(f)
    assert len(sx.bunch_decompositions(nf)) == _count_nf(nf)


def _count_nf(t) -> int:
    """Whole term, plus proper sub-chains of each flattened node, plus children."""
    items = t[1] if t[0] in ("and", "fuse") else ()
    n = len(items)
    if t[0] == "and":
        # distinct sub-multisets; repeated children are one position
        subs = len({tuple(sorted(c)) for k in range(2, n) for c in itertools.combinations(items, k)})
        kids = sum(_count_nf(c) for c in set(items))
    elif t[0] == "fuse":
        subs = sum(1 for i in range(n) for j in range(i + 2, n + 1) if j - i < n)
        kids = sum(_count_nf(c) for c in items)
    else:
        return 1
    return 1 + subs + kids


def test_substitution():
    assert sx.substitute(parse("x -> y"), Var("x"), parse("a & b")) == parse("(a & b) -> y")
    g = sx.substitute(parse("E v. x = v", "sl"), AVar("x"), AVar("v"))
    assert isinstance(g, Exists) and g.var != AVar("v")
    assert g.body == Eq(AVar("v"), g.var)
    h = sx.substitute(parse("X = 3", "sl"), PVar("X"), sx.parse_expr("X + 1"))
    assert h == Eq(Add(PVar("X"), Num(1)), Num(3))
    with pytest.raises(sx.SortError):
        sx.substitute(parse("x"), Var("x"), sx.parse_expr("1"))


@given(formulas())
def test_render_parse_roundtrip(f):
    assert normalize(parse(render(f))) == normalize(f)


@given(formulas(ops=(And, sx.Or, Imp, Fuse, LRes)))
def test_render_parse_roundtrip_bi(f):
    assert normalize(parse(render(f, "bi"), "bi"), "bi") == normalize(f, "bi")


@given(formulas())
def test_normalize_idempotent(f):
    nf = normalize(f)
    assert normalize(sx.to_formula(nf)) == nf
