"""Count small algebras and classify a few catalog members."""
from bunchworks import finalg

for n in range(2, 6):
    print(n, finalg.count_algebras(n, "gbi"), finalg.count_algebras(n, "bi"))

for name in ("S3", "L3", "G3"):
    alg = finalg.named_algebra(name)
    print(name, "strictly simple" if finalg.is_strictly_simple(alg)
          else "simple" if finalg.is_simple(alg)
          else "subdirectly irreducible" if finalg.is_subdirectly_irreducible(alg) else "other")
