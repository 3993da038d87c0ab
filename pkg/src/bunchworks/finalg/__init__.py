"""Finite GBI-algebras: lattices, enumeration, congruences and varieties."""
from .algebra import AxiomFailure, FiniteGBIAlgebra, ResidualFailure, residuals_from_mult
from .catalog import algebra as named_algebra, lookup as catalog_name
from .enumerate import (REFERENCE_COUNTS, count_algebras, enumerate_algebras,
                        reproduce_counts)
from .lattice import (FiniteDistLattice, FinitePoset, NotDistributive, chain,
                      distributive_lattices, join_irreducibles, upsets)
from .structure import (add_top, classify, congruences, describe, direct_product,
                        find_isomorphism, generated_subalgebra, is_isomorphic, is_simple,
                        is_strictly_simple, is_subdirectly_irreducible, ordinal_sum)

enumerate = enumerate_algebras  # noqa: A001
is_SI = is_subdirectly_irreducible


def holds(alg: FiniteGBIAlgebra, lhs, rhs) -> bool:
    """``lhs <= rhs`` under every assignment in ``alg``."""
    return alg.holds(lhs, rhs)


def find_countermodel(lhs, rhs, max_n: int = 4, variety: str = "gbi"):
    """First algebra (in enumeration order, smallest first) refuting ``lhs <= rhs``,
    with a refuting assignment; ``None`` if there is none up to ``max_n``."""
    for n in range(2, max_n + 1):
        for alg in enumerate_algebras(n, variety):
            cex = alg.counterexample(lhs, rhs)
            if cex is not None:
                return alg, cex
    return None


def named_countermodels(lhs, rhs) -> list[str]:
    """Catalog algebras refuting ``lhs <= rhs``."""
    from .catalog import names
    return [name for name in names() if named_algebra(name).counterexample(lhs, rhs) is not None]
