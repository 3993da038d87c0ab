import random

import pytest

import oracles
from bunchworks import symheap as sh
from bunchworks.symheap import Bounds, SearchSpace, SymbolicHeap, parse_sh


def _r(xs):
    return [x.render() for x in xs]


# ------------------------------------------------------------------ satisfiability

def test_separating_conjunction_forces_disjoint_cells():
    assert sh.sh_sat("x |-> a * x |-> b") is None
    assert sh.sh_sat("x != x & x |-> a") is None
    store, heap = sh.sh_sat("x |-> 1 * y |-> 2", Bounds(3, 2))
    assert len(heap) == 2 and heap[store["x"]] == 1 and heap[store["y"]] == 2


def test_list_atoms_use_successor_addresses():
    store, heap = sh.sh_sat("x |->l [1, 2]")
    assert heap == {store["x"]: 1, store["x"] + 1: 2}
    assert sh.sh_entails("x |->l [a, b]", "x |->l [a, b]")
    assert not sh.sh_entails("x |->l [a, b]", "x |-> a")


def test_points_to_is_functional():
    # two cells at one address cannot be split apart; values must agree when merged
    assert not sh.sh_sat("x = y & x |-> a * y |-> b")
    assert sh.sh_entails("x = y & x |-> a", "y |-> a")
    assert not sh.sh_entails("x |-> a", "x |-> b")


# ------------------------------------------------------------------ entailment

@pytest.mark.parametrize("H,C,want", [
    ("x |-> a * y |-> b", "y |-> b * x |-> a", "valid"),
    ("x |-> a", "x |-> a * x |-> a", "invalid"),
    ("x |-> a & x = y", "y |-> a", "valid"),
    ("x |-> a", "E v. x |-> v", "valid"),
    ("x |-> a * y |-> b", "x |-> a * top", "valid"),
    ("x |-> a * y |-> b", "x |-> a", "invalid"),
    ("emp", "x = x & emp", "valid"),
])
def test_entailment_examples(H, C, want):
    res = sh.sh_entails(H, C)
    assert res.status == want
    if want == "invalid":
        store, heap = res.counter
        h, c = parse_sh(H), parse_sh(C)
        values = sorted(set(store.values()) | set(heap) | set(heap.values())) + [99]
        assert oracles.sh_holds(h, store, heap, values)
        assert not oracles.sh_holds(c, store, heap, values)


def test_syntactic_examples():
    assert sh.sh_entails("x |-> a * y |-> b", "y |-> b * x |-> a", "syntactic").status == "valid"
    assert sh.sh_entails("x |-> a & x = y", "y |-> a", "syntactic").status == "valid"
    assert sh.sh_entails("x |-> a", "x |-> a * x |-> a", "syntactic").status == "unknown"
    assert sh.sh_entails("x |-> a * x |-> b", "emp", "syntactic").status == "valid"


VARS = ["x", "y", "z", "w"]
TERMS = VARS + [0, 1]


def _atom(rng, kind):
    return (kind, rng.choice(TERMS), rng.choice(TERMS))


def _random_heap(rng, evars=False, top=False):
    spatial = tuple(_atom(rng, "pto") for _ in range(rng.randrange(0, 3)))
    pure = tuple(_atom(rng, rng.choice(["eq", "neq"])) for _ in range(rng.randrange(0, 2)))
    ev = ()
    if evars and spatial and rng.random() < 0.4:
        name = "u"
        a = spatial[0]
        spatial = (("pto", a[1], name),) + spatial[1:]
        ev = (name,)
    return SymbolicHeap(ev, pure, spatial, top and rng.random() < 0.3)


def _corpus(n, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        H = _random_heap(rng)
        C = _random_heap(rng, evars=True, top=True)
        vs = H.free_vars() | C.free_vars()
        if len(H.spatial) + len(C.spatial) <= 4 and len(vs) <= 4:
            out.append((H, C))
    # near misses: C as a permutation or sub-heap of H
    for H, _ in list(out[: n // 2]):
        out.append((H, SymbolicHeap((), (), tuple(reversed(H.spatial)))))
        out.append((H, SymbolicHeap((), (), H.spatial[:1], True)))
    return out


def test_semantic_entailment_matches_brute_force():
    for H, C in _corpus(150, 1):
        res = sh.sh_entails(H, C)
        want = oracles.sh_entails_bruteforce(H, C, res.bounds.domain)
        assert (res.status == "valid") == want, (H.render(), C.render())


def test_syntactic_is_sound_and_never_refutes():
    corpus = _corpus(250, 2)
    valid = 0
    for H, C in corpus:
        syn = sh.sh_entails(H, C, "syntactic").status
        assert syn in ("valid", "unknown")
        if syn == "valid":
            valid += 1
            sem = sh.sh_entails(H, C)
            assert sem.status == "valid", (H.render(), C.render())
            assert oracles.sh_entails_bruteforce(H, C, sem.bounds.domain + 1)
    assert valid > 20


# ------------------------------------------------------------------ abduction and frames

def test_abduction_examples():
    assert _r(sh.abduce("x |-> a", "x |-> a * y |-> b")) == ["y |-> b"]
    assert _r(sh.abduce("x |-> a", "x |-> a")) == ["emp"]
    assert _r(sh.abduce("emp", "x |-> a")) == ["x |-> a"]
    # every abduced antiframe keeps H * a satisfiable
    for a in sh.abduce("x |-> a", "y |-> b"):
        assert sh.sh_sat(parse_sh("x |-> a").star(a)) is not None


def test_biabduction_examples():
    def sols(H, C):
        return [(s.antiframe.render(), s.frame.render()) for s in sh.biabduce(H, C)]

    assert sols("x |-> a", "y |-> b") == [("y |-> b", "x |-> a")]
    assert sols("x |-> a * y |-> b", "x |-> a") == [("emp", "y |-> b")]
    assert sols("emp", "emp") == [("emp", "emp")]
    assert sols("x |-> a", "x |-> a * x |-> a") == []


def test_biabduction_certificates_and_limit():
    sols = sh.biabduce("x |-> a * y |-> b", "z |-> c", limit=1)
    assert len(sols) == 1
    cert = sols[0].to_json()["certificate"]
    assert cert["domain"] >= 5


def test_antiframes_are_minimal():
    H, C = parse_sh("x |-> a"), parse_sh("x |-> a * y |-> b * z |-> c")
    sols = sh.abduce(H, C)
    assert sols
    k = min(len(a.spatial) for a in sols)
    assert all(len(a.spatial) == k for a in sols)
    for a in sols:
        Ha = H.star(a)
        assert oracles.sh_entails_bruteforce(Ha, C, 6)
        for drop in range(len(a.spatial)):
            smaller = SymbolicHeap((), a.pure, a.spatial[:drop] + a.spatial[drop + 1:])
            Hs = H.star(smaller)
            assert not (oracles.sh_sat_bruteforce(Hs, 6) and oracles.sh_entails_bruteforce(Hs, C, 6))


def test_frame_inference_examples():
    assert sh.frame_infer("x |-> 1 * y |-> 2", "y |-> 2").render() == "x |-> 1"
    assert sh.frame_infer("x |-> 1", "x |-> 1").render() == "emp"
    assert sh.frame_infer("x |-> 1", "y |-> 2") is None


def test_spatial_top_is_off_by_default():
    assert not SearchSpace().true_spatial
    sols = sh.biabduce("x |-> a", "top", SearchSpace(1, 0, 0, True))
    assert sols and sols[0].antiframe.render() == "emp"


def test_output_is_deterministic():
    a = [s.to_json() for s in sh.biabduce("x |-> a * y |-> b", "y |-> b * z |-> c")]
    b = [s.to_json() for s in sh.biabduce("x |-> a * y |-> b", "y |-> b * z |-> c")]
    assert a == b and a


def test_parse_rejects_non_heaps():
    with pytest.raises(ValueError):
        parse_sh("x |-> a -> y |-> b")
