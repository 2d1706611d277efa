"""Small named algebras used by the tests, demos and fixture files."""
from __future__ import annotations

from functools import cache

from .congruence import Congruence
from .core import FiniteAlgebra, Operation, algebra_from_ops, quotient
from .preprimal import build_preprimal
from .relations import equivalence_blocks, sigma_C2, sigma_E


def lattice(n: int, leq, name_meet: str = "meet", name_join: str = "join") -> FiniteAlgebra:
    """Bounded lattice on {0..n-1} from its order; 0 is the bottom, n-1 the top."""

    def meet(x, y):
        lower = [z for z in range(n) if leq(z, x) and leq(z, y)]
        return next(z for z in lower if all(leq(w, z) for w in lower))

    def join(x, y):
        upper = [z for z in range(n) if leq(x, z) and leq(y, z)]
        return next(z for z in upper if all(leq(z, w) for w in upper))

    return algebra_from_ops(
        n,
        {name_meet: (2, meet), name_join: (2, join), "c0": (0, 0), "c1": (0, n - 1)},
        zero=("c0",),
        one=("c1",),
    )


def chain(n: int) -> FiniteAlgebra:
    return lattice(n, lambda x, y: x <= y)


def m3() -> FiniteAlgebra:
    # 0 < 1,2,3 < 4 with 1,2,3 pairwise incomparable
    return lattice(5, lambda x, y: x == y or x == 0 or y == 4)


def n5() -> FiniteAlgebra:
    # 0 < 1 < 2 < 4 and 0 < 3 < 4
    below = {(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (2, 4), (3, 4)}
    return lattice(5, lambda x, y: x == y or (x, y) in below)


def ring_mod(n: int) -> FiniteAlgebra:
    """Z_n with +, ·, 0, 1."""
    return algebra_from_ops(
        n,
        {
            "add": (2, lambda x, y: (x + y) % n),
            "mul": (2, lambda x, y: (x * y) % n),
            "c0": (0, 0),
            "c1": (0, 1 % n),
        },
        zero=("c0",),
        one=("c1",),
    )


def cyclic_unary(n: int) -> FiniteAlgebra:
    """Z_n with successor only (no constants)."""
    return FiniteAlgebra(n, (Operation.from_function("s", 1, n, lambda x: (x + 1) % n),))


def trivial() -> FiniteAlgebra:
    return algebra_from_ops(1, {"c0": (0, 0)}, zero=("c0",), one=("c0",))


@cache
def p_sigma_e(cap: int = 2) -> FiniteAlgebra:
    return build_preprimal(sigma_E(), cap).algebra


@cache
def p_sigma_c2(cap: int = 2) -> FiniteAlgebra:
    return build_preprimal(sigma_C2(), cap).algebra


@cache
def p_sigma_e_mod_sigma() -> FiniteAlgebra:
    """P_σE/σ_E: the two-element quotient with the induced operations."""
    theta = Congruence.from_blocks(3, equivalence_blocks(sigma_E()))
    return quotient(p_sigma_e(), theta)[0]


def small_corpus() -> dict[str, FiniteAlgebra]:
    """Algebras with at most 5 elements and at most 4 operations."""
    out = {
        "chain2": chain(2),
        "chain3": chain(3),
        "chain4": chain(4),
        "M3": m3(),
        "N5": n5(),
        "cyclic3": cyclic_unary(3),
        "cyclic4": cyclic_unary(4),
        "trivial": trivial(),
    }
    for n in (2, 3, 4, 5):
        out[f"Z{n}"] = ring_mod(n)
    return out


def center_corpus() -> dict[str, FiniteAlgebra]:
    """Algebras with constants and at most 8 elements, including the preprimal ones."""
    out = {k: v for k, v in small_corpus().items() if v.N}
    out["Z6"] = ring_mod(6)
    out["P_sigmaE"] = p_sigma_e()
    out["P_sigmaE/sigma"] = p_sigma_e_mod_sigma()
    out["P_sigmaC2"] = p_sigma_c2()
    return out
