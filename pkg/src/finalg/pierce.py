"""Pierce stalks of finite algebras, discrete patchwork, and the DI-not-SI search.

For a finite algebra the Boolean algebra of factor congruences is finite,
its ultrafilters are principal, and the stalk at the ultrafilter generated
by an atom α is A/α*, α* the complement of α.  The stalks are the factors
of the finest direct decomposition.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

from .center import CenterAlgebra, center
from .congruence import (
    MAX_SIZE,
    ConLattice,
    Congruence,
    all_congruences,
    factor_pairs,
    is_directly_indecomposable,
    is_simple,
    subdirectly_irreducible,
)
from .core import (
    ISO_CAP,
    FiniteAlgebra,
    check_cap,
    find_isomorphism,
    power,
    product,
    quotient,
    restrict,
    subuniverse,
)


@dataclass(frozen=True)
class Stalk:
    algebra: FiniteAlgebra
    atom: Congruence
    complement: Congruence
    surjection: tuple[int, ...]
    directly_indecomposable: bool
    subdirectly_irreducible: bool
    simple: bool
    monolith: Congruence | None


@dataclass(frozen=True)
class StalkReport:
    algebra: FiniteAlgebra
    stalks: tuple[Stalk, ...]

    @property
    def atom_map(self) -> dict[Congruence, Stalk]:
        return {s.atom: s for s in self.stalks}

    def sizes(self) -> list[int]:
        return [s.algebra.n for s in self.stalks]

    def reassemble(self) -> FiniteAlgebra | None:
        if not self.stalks:
            return None
        return reduce(product, (s.algebra for s in self.stalks))


def factor_boolean_algebra(a: FiniteAlgebra, max_size: int | None = MAX_SIZE) -> dict[Congruence, Congruence]:
    """FC(A) as a map θ ↦ θ*; raises if some factor congruence has several complements."""
    comp: dict[Congruence, Congruence] = {}
    for fp in factor_pairs(a, max_size):
        if comp.setdefault(fp.theta, fp.delta) != fp.delta:
            raise ValueError(f"factor congruence {fp.theta} has two complements; FC(A) is not Boolean")
    return comp


def pierce_stalks(a: FiniteAlgebra, max_size: int | None = MAX_SIZE) -> StalkReport:
    comp = factor_boolean_algebra(a, max_size)
    fc = list(comp)
    nonbottom = [t for t in fc if not t.is_bottom()]
    atoms = [t for t in nonbottom if not any(s < t for s in nonbottom)]
    atoms.sort(key=lambda c: comp[c].block_id)
    stalks = []
    for alpha in atoms:
        star = comp[alpha]
        q, surj = quotient(a, star)
        si, mono = subdirectly_irreducible(q, max_size)
        stalks.append(
            Stalk(
                algebra=q,
                atom=alpha,
                complement=star,
                surjection=tuple(int(x) for x in surj),
                directly_indecomposable=is_directly_indecomposable(q, max_size),
                subdirectly_irreducible=si,
                simple=is_simple(q, max_size),
                monolith=mono,
            )
        )
    return StalkReport(a, tuple(stalks))


def reassembles(report: StalkReport, max_size: int | None = ISO_CAP) -> tuple[int, ...] | None:
    """An isomorphism from the input onto the product of its stalks, if one exists."""
    prod = report.reassemble()
    if prod is None:
        return () if report.algebra.n == 1 else None
    return find_isomorphism(report.algebra, prod, max_size)


# Iterated products encode (x_0, ..., x_{k-1}) in mixed radix, x_0 most significant.


def encode(xs: Sequence[int], sizes: Sequence[int]) -> int:
    z = 0
    for x, s in zip(xs, sizes):
        z = z * s + x
    return z


def decode(z: int, sizes: Sequence[int]) -> tuple[int, ...]:
    out = []
    for s in reversed(sizes):
        z, r = divmod(z, s)
        out.append(r)
    return tuple(reversed(out))


def product_of(family: Sequence[FiniteAlgebra]) -> FiniteAlgebra:
    return reduce(product, family)


@dataclass(frozen=True)
class PatchworkResult:
    holds: bool
    witness: tuple | None = None  # (x, y, U, patch)

    def __bool__(self):
        return self.holds


def check_patchwork_discrete(family: Sequence[FiniteAlgebra], a_sub) -> PatchworkResult:
    """Binary patchwork for the discrete topology on a finite index set.

    ``a_sub`` is a collection of coordinate tuples forming a subdirect
    subuniverse of the product.  For discrete finite index sets, closure
    under all binary patches (x on U, y off U) is equivalent to the full
    patchwork property.
    """
    sizes = [f.n for f in family]
    I = range(len(family))
    A = sorted({tuple(int(c) for c in x) for x in a_sub})
    for i in I:
        if {x[i] for x in A} != set(range(sizes[i])):
            raise ValueError(f"not subdirect: projection {i} is not onto")
    prod = product_of(family)
    enc = [encode(x, sizes) for x in A]
    if sorted(subuniverse(prod, enc)) != sorted(enc):
        raise ValueError("not a subuniverse of the product")
    members = set(A)
    for x, y in itertools.product(A, repeat=2):
        for r in range(len(family) + 1):
            for U in itertools.combinations(I, r):
                z = tuple(x[i] if i in U else y[i] for i in I)
                if z not in members:
                    return PatchworkResult(False, (x, y, U, z))
    return PatchworkResult(True)


@dataclass(frozen=True)
class DINotSIWitness:
    algebra: FiniteAlgebra
    origin: str
    universe: tuple[int, ...]  # elements of the power, as encoded integers
    congruences: ConLattice = field(compare=False)
    center: CenterAlgebra | None = field(compare=False)


def search_di_not_si(
    a_base: FiniteAlgebra,
    size_cap: int,
    max_gens: int = 2,
    exponent: int = 2,
    max_size: int | None = MAX_SIZE,
) -> list[DINotSIWitness]:
    """DI-but-not-SI algebras among subalgebras of a_base^exponent (and their quotients).

    Subalgebras come from generator sets of at most ``max_gens`` elements;
    candidates larger than ``size_cap`` are skipped; isomorphic finds are
    reported once.
    """
    check_cap("max_size", max_size, size_cap)
    big = power(a_base, exponent)
    has_const = any(op.arity == 0 for op in big.operations)
    subs: dict[tuple[int, ...], tuple[int, ...]] = {}
    for r in range(0 if has_const else 1, max_gens + 1):
        for gens in itertools.combinations(range(big.n), r):
            s = tuple(subuniverse(big, gens))
            subs.setdefault(s, gens)
    found: list[DINotSIWitness] = []
    for s in sorted(subs, key=lambda u: (len(u), u)):
        if len(s) > size_cap:
            continue
        b, _ = restrict(big, s)
        cands = [(b, f"Sg{subs[s]} in A^{exponent}")]
        for theta in all_congruences(b, max_size):
            if not theta.is_bottom() and not theta.is_top():
                q, _ = quotient(b, theta)
                cands.append((q, f"Sg{subs[s]} in A^{exponent} modulo {theta}"))
        for alg, origin in cands:
            if alg.n < 2 or alg.n > size_cap:
                continue
            if not is_directly_indecomposable(alg, max_size):
                continue
            if subdirectly_irreducible(alg, max_size)[0]:
                continue
            if any(w.algebra.n == alg.n and find_isomorphism(w.algebra, alg, max(alg.n, ISO_CAP)) for w in found):
                continue
            cz = center(alg) if alg.N else None
            found.append(DINotSIWitness(alg, origin, s, all_congruences(alg, max_size), cz))
    return found
