import random

import numpy as np
import pytest

import oracles
from bunchworks import finalg, languages as lg, models
from bunchworks.models import GeneralizedPPM


def _kinds(m):
    return {v.kind for v in models.check_ppm(m)}


# ------------------------------------------------------------------ model laws

def test_powerset_is_a_ppm():
    assert models.check_ppm(models.powerset_ppm({0, 1})) == []


def test_broken_associativity_is_witnessed():
    m = models.powerset_ppm(2)
    op = m.op.copy()
    a, b = m.index(frozenset({0})), m.index(frozenset({1}))
    op[m.index(frozenset()), m.index(frozenset({0, 1}))] = -1   # x.(y.z) defined, (x.y).z not
    broken = GeneralizedPPM(m.elements, op, m.units, m.leq)
    viols = [v for v in models.check_ppm(broken) if v.kind == "associativity"]
    assert viols
    x, y, z = viols[0].witness
    assert (m.op[x, y] >= 0) and (m.op[y, z] >= 0)
    assert a != b


def test_empty_unit_set_is_rejected():
    m = models.powerset_ppm(1)
    assert "unit" in _kinds(GeneralizedPPM(m.elements, m.op, frozenset(), m.leq))


def test_non_monotone_product_breaks_bifunctoriality():
    m = models.powerset_ppm(2, "inclusion")
    leq = np.ones_like(m.leq)
    assert "bifunctoriality" in _kinds(GeneralizedPPM(m.elements, m.op, m.units, leq)) or \
        "unit_closure" in _kinds(GeneralizedPPM(m.elements, m.op, m.units, leq))


def test_weakening_over_a_chain_is_not_bifunctorial():
    # (0,0) <= (0,1) and (1,1) <= (0,1), but (0,0).(1,1) is undefined
    w = models.weakening_ppm(finalg.chain(2).leq)
    viols = models.check_ppm(w)
    assert viols and {v.kind for v in viols} == {"bifunctoriality"}
    assert (0, 0, 2, 0) in {v.witness for v in viols}
    # the complex algebra is still the algebra of weakening relations
    ca = models.complex_algebra(w)
    assert ca.n == 6
    rels = [models.relation_of(ca, x) for x in range(ca.n)]
    for x in range(ca.n):
        for y in range(ca.n):
            assert models.relation_of(ca, int(ca.mult[x, y])) == models.compose(rels[x], rels[y])


def test_ppm_json_roundtrip():
    for m in (models.heap_ppm(1, 2), models.forest_ppm(("a", "b"), 2, True, False)):
        back = GeneralizedPPM.from_json(m.to_json())
        assert (back.op == m.op).all() and (back.leq == m.leq).all() and back.units == m.units
        assert models.check_ppm(back) == []


# ------------------------------------------------------------------ complex algebras

def test_complex_algebra_sizes():
    p1 = models.complex_algebra(models.powerset_ppm([0]))
    assert p1.n == 4 and all(p1.neg(p1.neg(x)) == x for x in range(4))
    single = models.complex_algebra(models.powerset_ppm([]))
    assert single.n == 2
    assert models.complex_algebra(models.weakening_ppm(np.eye(2, dtype=bool))).n == 16


def test_heap_composition():
    assert models.heap_compose(((1, 2),), ((1, 3),)) is None
    assert models.heap_compose(((1, 2),), ((2, 3),)) == ((1, 2), (2, 3))
    assert models.heap_compose((), ((2, 3),)) == ((2, 3),)


def test_store_heap_units_are_all_empty_heaps():
    m = models.store_heap_ppm(("X",), 2, 1, 2)
    assert len(m.units) == 2
    assert models.check_ppm(m) == []


def test_noncommutative_forests():
    m = models.forest_ppm(("a", "b"), 2, True, False)
    assert not (m.op == m.op.T).all()
    ca = models.complex_algebra(m)
    assert oracles.gbi_violations(ca) == []
    assert ca.counterexample("x . y", "y . x") is not None
    comm = models.complex_algebra(models.forest_ppm(("a", "b"), 2, True, True))
    assert comm.counterexample("x . y", "y . x") is None


def test_subforest_order_is_deleting_subtrees():
    m = models.forest_ppm(("a", "b"), 2, True, False, "subforest")
    empty = m.index(())
    assert m.leq[empty].all()
    assert models.check_ppm(m) == []


def test_builder_complex_algebras_agree_with_direct_definition():
    m = models.heap_ppm(1, 2)
    ca = models.complex_algebra(m)
    for x in range(ca.n):
        for y in range(ca.n):
            want = set()
            for a in ca.points(x):
                for b in ca.points(y):
                    c = m.op[a, b]
                    if c >= 0:
                        want |= set(np.flatnonzero(m.leq[c]).tolist())
            assert ca.points(int(ca.mult[x, y])) == want


# ------------------------------------------------------------------ classical to intuitionistic

def test_powerset_substate_is_inclusion():
    m = models.powerset_ppm(3)
    an = models.analyze_pme(m)
    incl = np.array([[a <= b for b in m.elements] for a in m.elements])
    assert (an.substate == incl).all()


@pytest.mark.parametrize("build", [lambda: models.powerset_ppm(2), lambda: models.heap_ppm(2, 2)])
def test_commutative_center_is_everything(build):
    m = build()
    an = models.analyze_pme(m)
    assert an.flags["commutative"] and an.center == frozenset(range(m.n))
    assert all(an.facts.values()), an.facts


def test_noncommutative_center_facts():
    m = models.forest_ppm(("a", "b"), 2, True, False)
    an = models.analyze_pme(m)
    assert m.units <= an.center and len(an.center) < m.n
    assert all(an.facts.values()), an.facts


def test_heap_collapse_keeps_the_equivalence():
    m = models.heap_ppm(2, 2)
    an = models.analyze_pme(m)
    assert an.flags["right-cancellative"] and an.flags["indivisible-units"]
    coll = models.intuitionistic_collapse(m)
    assert ((coll.leq & coll.leq.T) == m.equiv()).all()
    assert models.check_ppm(coll) == []


def test_effect_algebra_flag():
    flags = models.analyze_pme(models.powerset_ppm(2)).flags
    assert flags["separation-algebra"] and flags["effect-algebra"]
    assert not models.analyze_pme(models.heap_ppm(1, 2)).flags["effect-algebra"]


def test_collapse_rejects_non_equivalence_orders():
    with pytest.raises(ValueError):
        models.analyze_pme(models.powerset_ppm(2, "inclusion"))


def test_inttocl_with_several_units():
    rep = models.check_inttocl(models.store_heap_ppm(("X",), 2, 1, 2))
    assert all(ok for ok, _ in rep.values()), rep


def test_pair_groupoid_units_are_not_central():
    # (0,0).(0,1) = (0,1) but nothing times (0,0) on the right ends in 1
    m = models.weakening_ppm(np.eye(2, dtype=bool))
    an = models.analyze_pme(m)
    assert an.center == frozenset() and not an.facts["units_central"]
    assert not an.facts["substate_preorder"]
    rep = models.check_inttocl(m)
    assert rep["i"][0] and not rep["ii"][0]


# ------------------------------------------------------------------ regular languages

AB = ("a", "b")


def _lang(d: lg.DFA, k: int) -> set:
    return set(d.words(k))


def _random_dfa(rng):
    kind = rng.randrange(4)
    if kind == 0:
        return lg.from_words(rng.sample(list(oracles.words(AB, 3)), rng.randrange(1, 5)), AB)
    if kind == 1:
        return lg.star_of_word(rng.choice(["a", "ab", "ba", "b"]), AB)
    base = lg.from_words(rng.sample(list(oracles.words(AB, 2)), 2), AB)
    if kind == 2:
        return lg.complement(base)
    return lg.concatenation(lg.star_of_word("a", AB), base)


def test_unit_language():
    eps = lg.epsilon(AB)
    rng = random.Random(1)
    for _ in range(10):
        m = _random_dfa(rng)
        assert lg.concatenation(eps, m).equivalent(m) and lg.concatenation(m, eps).equivalent(m)


def test_residual_of_a_single_letter():
    ops = lg.regular_language_ops(lg.from_words(["a"], ("a",)), lg.from_words(["aa"], ("a",)))
    res = ops["lres"]
    assert res.accepts("a") and not res.accepts("")


def test_operations_against_word_enumeration():
    rng = random.Random(2)
    n = 6
    for _ in range(25):
        K, M = _random_dfa(rng), _random_dfa(rng)
        k, m = _lang(K, n), _lang(M, n)
        ops = lg.regular_language_ops(K, M)
        assert _lang(ops["union"], n) == k | m
        assert _lang(ops["intersection"], n) == k & m
        assert _lang(ops["complement"], n) == set(oracles.words(AB, n)) - k
        assert _lang(ops["concatenation"], n) == oracles.concat_bruteforce(k, m, n)
        short = _lang(K, 3)
        for w in _lang(ops["lres"], 3):
            assert all(u + w in _lang(M, 6) for u in short)
        # rres is K / M
        for w in _lang(ops["rres"], 3):
            assert all(w + u in _lang(K, 6) for u in _lang(M, 3))


def test_residuals_of_finite_languages_are_exact():
    rng = random.Random(3)
    for _ in range(25):
        words = rng.sample(list(oracles.words(AB, 2)), rng.randrange(1, 4))
        K = lg.from_words(words, AB)
        M = _random_dfa(rng)
        m = _lang(M, 8)
        want_l = {w for w in oracles.words(AB, 5) if all(u + w in m for u in words)}
        want_r = {w for w in oracles.words(AB, 5) if all(w + u in m for u in words)}
        assert _lang(lg.left_residual(K, M), 5) == want_l
        assert _lang(lg.right_residual(M, K), 5) == want_r


def test_residuation_law_on_bounded_words():
    rng = random.Random(4)
    for _ in range(15):
        K, L, M = (_random_dfa(rng) for _ in range(3))
        lhs = lg.concatenation(K, L).subset_of(M)
        assert lhs == L.subset_of(lg.left_residual(K, M))
        assert lhs == K.subset_of(lg.right_residual(M, L))


def test_alphabet_mismatch():
    with pytest.raises(lg.AlphabetMismatch):
        lg.union(lg.epsilon(("a",)), lg.epsilon(("b",)))
