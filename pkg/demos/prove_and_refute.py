"""Prove a few inequations and show a countermodel for one that fails."""
from bunchworks import finalg, sequent

for text in ("top <= x -> (y -> x)", "x . (y . z) <= (x . y) . z", "x & y <= y & x"):
    res = sequent.prove(text, "gbi")
    print(f"{text:32} {res.status:12} nodes={res.tree.size()}")

res = sequent.prove("x . y <= y . x", "gbi")
alg, env = res.countermodel
print("x . y <= y . x:", res.status, "countermodel", finalg.catalog_name(alg), env)
print("same inequation in the commutative logic:", sequent.prove("x . y <= y . x", "bi").status)
