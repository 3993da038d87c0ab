"""Command-line front end.

Exit codes: 0 success or valid, 1 invalid or counterexample, 2 usage
error, 3 budget exhausted or inconclusive.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import finalg, hilbert, models, sequent, slverify, symheap, syntax

OK, INVALID, USAGE, INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _jobs(args) -> int:
    if getattr(args, "jobs", None):
        return max(1, args.jobs)
    return _env_jobs()


def _env_jobs() -> int:
    try:
        return max(1, int(os.environ.get("BUNCHWORKS_JOBS", "1")))
    except ValueError:
        return 1


def _emit(args, payload: dict, text: str):
    out = json.dumps(payload, indent=2, default=str) if args.json else text
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _pair(text: str, name: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"{name} must look like 4,4") from None
    if a < 1 or b < 1:
        raise UsageError(f"{name} must be positive")
    return a, b


# ------------------------------------------------------------------ subcommands

def cmd_parse(args):
    f = syntax.parse(args.formula, args.dialect)
    payload = {"formula": syntax.render(f, args.dialect)}
    text = payload["formula"]
    if args.nf:
        nf = syntax.normalize(f, args.nf)
        payload["nf"] = syntax.render_nf(nf, args.dialect)
        text += "\nnormal form: " + payload["nf"]
    _emit(args, payload, text)
    return OK


def cmd_prove(args):
    s = sequent.make_sequent(args.sequent, mode=args.mode)
    r = sequent.prove(s, args.mode, budget=args.budget, max_nodes=args.max_nodes)
    dialect = "bi" if args.mode == "bi" else "gbi"
    payload = {"status": r.status, "sequent": s.render(dialect), "stats": r.stats}
    if r.status == "proved":
        payload["proof"] = json.loads(sequent.tree_to_json(r.tree, dialect))
        _emit(args, payload, r.tree.render(dialect))
        return OK
    if r.status == "not_provable":
        text = f"not provable: {s.render(dialect)}"
        if r.countermodel is not None:
            alg, env = r.countermodel
            name = alg.name or finalg.catalog_name(alg) or f"{alg.n}-element algebra"
            payload["countermodel"] = {"algebra": name, "assignment": env, "table": alg.to_json()}
            text += f"\ncountermodel: {name} with {env}"
        _emit(args, payload, text)
        return INVALID
    _emit(args, payload, f"budget exhausted: {s.render(dialect)}")
    return INCONCLUSIVE


def cmd_check_hilbert(args):
    data = json.loads(_read(args.proof))
    if isinstance(data, dict):
        steps, gamma, goal = data["steps"], data.get("hypotheses", []), data.get("goal")
    else:
        steps, gamma, goal = data, [], None
    goal = goal if args.goal is None else args.goal
    dialect = "bi" if args.system == "HBI" else "gbi"
    proof = hilbert.HilbertProof.from_json(steps, args.system)
    v = hilbert.check_proof(gamma, proof, args.system, syntax.parse(goal, dialect) if goal else None)
    payload = {"ok": v.ok, "step": v.step, "reason": v.reason, "steps": len(proof)}
    _emit(args, payload, "ok" if v.ok else f"error at step {v.step}: {v.reason}")
    return OK if v.ok else INVALID


def cmd_enumerate(args):
    algs = finalg.enumerate_algebras(args.n, args.variety) if args.n > 1 else []
    count = finalg.count_algebras(args.n, args.variety)
    payload = {"n": args.n, "variety": args.variety, "count": count}
    text = str(count)
    if args.list:
        payload["algebras"] = [a.to_json() for a in algs]
        lines = [text]
        for a in algs:
            name = finalg.catalog_name(a)
            lines.append(f"{name or '-'}: unit={a.labels[a.unit]} mult={a.mult.tolist()}")
        text = "\n".join(lines)
    _emit(args, payload, text)
    return OK


def cmd_classify(args):
    names = finalg.catalog.names() if args.name == "all" else [args.name]
    rows = {}
    for name in names:
        try:
            alg = finalg.named_algebra(name)
        except KeyError:
            raise UsageError(f"unknown algebra {name!r}; choose from {', '.join(finalg.catalog.names())}") from None
        rows[name] = finalg.describe(alg)
    text = "\n".join(f"{k}: SI={d['subdirectly_irreducible']} simple={d['simple']} "
                     f"strictly_simple={d['strictly_simple']} varieties={' '.join(d['varieties'])}"
                     for k, d in rows.items())
    _emit(args, rows, text)
    return OK


def _build_model(args):
    b = args.builder
    if b == "powerset":
        return models.powerset_ppm(range(args.size), args.order)
    if b == "heap":
        return models.heap_ppm(args.locs, args.rvals, args.order)
    if b == "store-heap":
        return models.store_heap_ppm(tuple(args.pvars.split(",")), args.vals, args.locs, args.rvals)
    if b == "forest":
        return models.forest_ppm(tuple(args.labels.split(",")), args.max_nodes, not args.repeat_labels,
                                 args.commutative, args.order if args.order != "inclusion" else "subforest")
    if b == "weakening":
        n = args.size
        leq = [[i == j or (args.chain and i <= j) for j in range(n)] for i in range(n)]
        return models.weakening_ppm(leq)
    raise UsageError(f"unknown builder {b!r}")


def cmd_model(args):
    m = _build_model(args)
    viol = models.check_ppm(m)
    payload = {"name": m.name, "size": m.n, "violations": [(v.kind, list(map(str, v.witness))) for v in viol]}
    lines = [f"{m.name}: {m.n} elements, {len(viol)} model violations"]
    try:
        cm = models.complex_algebra(m)
        payload["complex_algebra"] = {"n": cm.n, "commutative": cm.is_commutative()}
        lines.append(f"complex algebra: {cm.n} elements, commutative={cm.is_commutative()}")
    except (ValueError, finalg.AxiomFailure) as e:
        payload["complex_algebra"] = {"error": str(e)}
        lines.append(f"complex algebra: {e}")
    if args.inttocl:
        rep = models.check_inttocl(m)
        payload["inttocl"] = {k: {"passed": bool(v[0]), "detail": v[1]} for k, v in rep.items()}
        lines += [f"({k}) {'pass' if v[0] else 'FAIL'}: {v[1]}" for k, v in rep.items()]
    _emit(args, payload, "\n".join(lines))
    return OK if not viol else INVALID


def _sh_bounds(args):
    return symheap.Bounds(args.domain, args.heap)


def cmd_entail(args):
    r = symheap.sh_entails(args.lhs, args.rhs, args.method, _sh_bounds(args))
    payload = {"status": r.status, "method": r.method}
    text = r.status
    if r.counter is not None:
        store, heap = r.counter
        payload["counter"] = {"store": store, "heap": {str(k): v for k, v in heap.items()}}
        text += f"\ncounter-state: store {store} heap {heap}"
    _emit(args, payload, text)
    return {"valid": OK, "invalid": INVALID}.get(r.status, INCONCLUSIVE)


def cmd_biabduce(args):
    space = symheap.SearchSpace(args.max_atoms, args.max_pure, args.fresh, args.true_spatial)
    sols = symheap.biabduce(args.lhs, args.rhs, space, bounds=_sh_bounds(args))
    payload = {"solutions": [s.to_json() for s in sols]}
    text = "\n".join(f"antiframe: {s.antiframe}   frame: {s.frame}" for s in sols) or "no solution"
    _emit(args, payload, text)
    return OK if sols else INVALID


def cmd_verify(args):
    locs, vals = _pair(args.bounds, "--bounds")
    t = slverify.parse_triple(_read(args.program))
    v = slverify.triple_valid(t, slverify.SLBounds(locs, vals), args.fuel, _jobs(args))
    payload = v.to_json()
    text = v.status
    if v.initial is not None:
        text += f"\ninitial state: {v.initial} env {v.env}\noutcome: {payload['outcome']}"
    for w in v.warnings:
        text += f"\nwarning: {w}"
    _emit(args, payload, text)
    return {"valid": OK, "invalid": INVALID}.get(v.status, INCONCLUSIVE)


def _parse_state(text: str) -> slverify.MachineState:
    text = text.strip()
    if text.startswith("{"):
        d = json.loads(text)
        return slverify.MachineState.make(d.get("store", {}), {int(k): v for k, v in d.get("heap", {}).items()})
    store_part, _, heap_part = text.partition(";")
    store, heap = {}, {}
    try:
        for item in filter(None, (x.strip() for x in store_part.split(","))):
            k, v = item.split("=")
            store[k.strip()] = int(v)
        for item in filter(None, (x.strip() for x in heap_part.split(","))):
            k, v = item.split(":")
            heap[int(k)] = int(v)
    except ValueError:
        raise UsageError("state must look like 'X=1,Y=2; 0:5,1:7'") from None
    return slverify.MachineState.make(store, heap)


def cmd_exec(args):
    locs, vals = _pair(args.bounds, "--bounds")
    text = _read(args.program)
    c = slverify.parse_triple(text).cmd if text.lstrip().startswith("{") else slverify.parse_program(text)
    st = _parse_state(args.state)
    missing = slverify.program_vars(c) - set(st.s)
    if missing:
        raise UsageError(f"state lacks program variable(s) {', '.join(sorted(missing))}")
    outs = slverify.execute(c, st, args.fuel, slverify.SLBounds(locs, vals))
    rows = []
    for o in sorted(outs, key=repr):
        if isinstance(o, slverify.Terminated):
            rows.append({"outcome": "terminated", "state": o.state.to_json()})
        else:
            rows.append({"outcome": type(o).__name__, "reason": getattr(o, "reason", "")})
    text = "\n".join(f"{r['outcome']}: {r.get('state', r.get('reason'))}" for r in rows)
    _emit(args, {"outcomes": rows}, text)
    if any(isinstance(o, slverify.Fault) for o in outs):
        return INVALID
    if any(isinstance(o, (slverify.FuelExhausted, slverify.ResourceExhausted)) for o in outs):
        return INCONCLUSIVE
    return OK


def cmd_reproduce_counts(args):
    if args.max_n < 0:
        raise UsageError("max_n must be non-negative")
    if args.max_n > args.ceiling:
        raise UsageError(f"max_n above the ceiling {args.ceiling} (raise it with --ceiling)")
    rows = finalg.reproduce_counts(args.max_n, _jobs(args)) if args.max_n >= 2 else []
    lines = [f"{'n':>2} {'GBI':>7} {'expected':>8} {'BI':>7} {'expected':>8}  match"]
    for r in rows:
        lines.append(f"{r['n']:>2} {r['gbi']:>7} {r['gbi_expected']!s:>8} {r['bi']:>7} "
                     f"{r['bi_expected']!s:>8}  {'yes' if r['match'] else 'NO'}")
    _emit(args, {"rows": rows}, "\n".join(lines))
    return OK if all(r["match"] for r in rows) else INVALID


# ------------------------------------------------------------------ argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--output", "-o", help="write output to a file")
    common.add_argument("--jobs", type=int, help="worker processes (default: $BUNCHWORKS_JOBS or 1)")

    p = argparse.ArgumentParser(prog="bunchworks", description="Bunched logics toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", parents=[common], help="parse and print a formula")
    s.add_argument("formula")
    s.add_argument("--dialect", choices=syntax.DIALECTS, default="gbi")
    s.add_argument("--nf", choices=syntax.MODES, help="also print the normal form")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("prove", parents=[common], help="cut-free proof search for 's <= t'")
    s.add_argument("sequent")
    s.add_argument("--mode", choices=syntax.MODES, default="gbi")
    s.add_argument("--budget", type=int, default=60, help="maximal proof depth")
    s.add_argument("--max-nodes", type=int, default=200_000)
    s.set_defaults(func=cmd_prove)

    s = sub.add_parser("check-hilbert", parents=[common], help="check a Hilbert-style proof (JSON)")
    s.add_argument("proof")
    s.add_argument("--system", choices=hilbert.SYSTEMS, default="HGBI")
    s.add_argument("--goal")
    s.set_defaults(func=cmd_check_hilbert)

    s = sub.add_parser("enumerate", parents=[common], help="count finite algebras up to isomorphism")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--variety", choices=("gbi", "bi"), default="gbi")
    s.add_argument("--list", action="store_true", help="list the algebras")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("classify", parents=[common], help="varieties and congruence facts of a catalog algebra")
    s.add_argument("name", help="catalog name, or 'all'")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("model", parents=[common], help="build a model and its complex algebra")
    s.add_argument("builder", choices=("powerset", "heap", "store-heap", "forest", "weakening"))
    s.add_argument("--size", type=int, default=2)
    s.add_argument("--locs", type=int, default=2)
    s.add_argument("--rvals", type=int, default=2)
    s.add_argument("--vals", type=int, default=2)
    s.add_argument("--pvars", default="X")
    s.add_argument("--labels", default="a,b")
    s.add_argument("--max-nodes", type=int, default=2)
    s.add_argument("--repeat-labels", action="store_true")
    s.add_argument("--commutative", action="store_true")
    s.add_argument("--chain", action="store_true", help="weakening over a chain instead of a discrete set")
    s.add_argument("--order", choices=("discrete", "inclusion", "subforest"), default="discrete")
    s.add_argument("--inttocl", action="store_true", help="check the classical-to-intuitionistic collapse")
    s.set_defaults(func=cmd_model)

    for name, func, helptext in (("entail", cmd_entail, "symbolic-heap entailment H |= C"),
                                 ("biabduce", cmd_biabduce, "antiframe and frame for H * a |= C * f")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("lhs")
        s.add_argument("rhs")
        s.add_argument("--domain", type=int, help="value-domain size (default: variables + constants + 1)")
        s.add_argument("--heap", type=int, help="heap-size bound for spatial top")
        s.set_defaults(func=func)
        if name == "entail":
            s.add_argument("--method", choices=("semantic", "syntactic"), default="semantic")
        else:
            s.add_argument("--max-atoms", type=int, default=3)
            s.add_argument("--max-pure", type=int, default=0)
            s.add_argument("--fresh", type=int, default=2)
            s.add_argument("--true-spatial", action="store_true", help="allow spatial top in candidates")

    for name, func, helptext in (("verify", cmd_verify, "check a triple {P} C {Q} over bounded states"),
                                 ("exec", cmd_exec, "run a program from a given state")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("program", help="file name, or - for stdin")
        s.add_argument("--bounds", default="4,4", help="locations,values")
        s.add_argument("--fuel", type=int, default=64)
        if name == "exec":
            s.add_argument("--state", required=True, help="'X=1,Y=2; 0:5' or JSON")
        s.set_defaults(func=func)

    s = sub.add_parser("reproduce-counts", parents=[common], help="compare counts with the reference counts")
    s.add_argument("max_n", type=int)
    s.add_argument("--ceiling", type=int, default=8)
    s.set_defaults(func=cmd_reproduce_counts)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.func(args)
    except syntax.ParseError as e:
        src = getattr(args, "formula", None) or getattr(args, "sequent", None)
        print(f"parse error: {e}", file=sys.stderr)
        if src is not None and e.pos >= 0:
            print(f"  {src}\n  {' ' * e.pos}^", file=sys.stderr)
        return USAGE
    except slverify.ProgramError as e:
        print(f"program error: {e}", file=sys.stderr)
        return USAGE
    except (UsageError, FileNotFoundError, json.JSONDecodeError, KeyError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return USAGE
