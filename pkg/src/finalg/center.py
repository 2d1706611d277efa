"""Central elements and the Boolean algebra Z(A)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .congruence import Congruence, complementary, join, meet, tuple_congruence
from .core import FiniteAlgebra, check_cap, is_bijection, is_homomorphism, product, quotient

MAX_CANDIDATES = 10**6


class NoConstantFrame(ValueError):
    """The algebra has no 0⃗/1⃗ constants (N = 0)."""


@dataclass(frozen=True)
class CentralElement:
    e: tuple[int, ...]
    theta0: Congruence
    theta1: Congruence


def _require_frame(a: FiniteAlgebra) -> None:
    if a.N == 0:
        raise NoConstantFrame("central elements need designated constants 0⃗ and 1⃗")


def is_central(a: FiniteAlgebra, e: Sequence[int]) -> CentralElement | None:
    """e is central iff θ(0⃗, e) and θ(1⃗, e) are complementary factor congruences."""
    _require_frame(a)
    e = tuple(int(x) for x in e)
    if len(e) != a.N:
        raise ValueError(f"expected a tuple of length {a.N}")
    t0 = tuple_congruence(a, a.zero, e)
    t1 = tuple_congruence(a, a.one, e)
    if complementary(t0, t1):
        return CentralElement(e, t0, t1)
    return None


class CenterAlgebra:
    """Z(A) with the Boolean structure transported from the factor congruences.

    Element i is ``elements[i]``; ``leq``, ``meet``, ``join`` and ``complement``
    are tables over these indices.  The order is inclusion of theta0, so 0⃗
    is the bottom.
    """

    def __init__(self, a: FiniteAlgebra, elements: list[CentralElement]):
        self.algebra = a
        self.elements = tuple(elements)
        self.by_e = {c.e: i for i, c in enumerate(self.elements)}
        self.by_theta0 = {c.theta0: i for i, c in enumerate(self.elements)}
        if len(self.by_theta0) != len(self.elements):
            raise ValueError("two central elements share a factor congruence")
        m = len(self.elements)
        self.leq = np.array([[self.elements[i].theta0 <= self.elements[j].theta0 for j in range(m)] for i in range(m)])
        self.complement = [self._lookup(c.theta1) for c in self.elements]
        self.meet = np.array(
            [[self._lookup(meet(ci.theta0, cj.theta0)) for cj in self.elements] for ci in self.elements], dtype=np.int64
        ).reshape(m, m)
        self.join = np.array(
            [[self._lookup(join(ci.theta0, cj.theta0)) for cj in self.elements] for ci in self.elements], dtype=np.int64
        ).reshape(m, m)
        self.bottom = self.by_e[a.zero]
        self.top = self.by_e[a.one]
        self._check_boolean()

    def _lookup(self, theta: Congruence) -> int:
        try:
            return self.by_theta0[theta]
        except KeyError:
            raise ValueError(f"Z(A) is not closed: no central element with theta0 = {theta}") from None

    def _check_boolean(self) -> None:
        m = len(self)
        r = range(m)
        J, M, C = self.join, self.meet, self.complement
        for x in r:
            if M[x, C[x]] != self.bottom or J[x, C[x]] != self.top:
                raise ValueError("complement law fails in Z(A)")
            for y in r:
                if self.leq[x, y] != (M[x, y] == x):
                    raise ValueError("order does not match meet in Z(A)")
                for z in r:
                    if M[x, J[y, z]] != J[M[x, y], M[x, z]]:
                        raise ValueError("distributivity fails in Z(A)")

    def __len__(self):
        return len(self.elements)

    def __contains__(self, e) -> bool:
        return tuple(e) in self.by_e

    @property
    def degenerate(self) -> bool:
        return self.bottom == self.top

    def atoms(self) -> list[CentralElement]:
        out = []
        for i, c in enumerate(self.elements):
            if i == self.bottom:
                continue
            if not any(j not in (i, self.bottom) and self.leq[j, i] for j in range(len(self))):
                out.append(c)
        return out

    def index(self, e: Sequence[int]) -> int:
        return self.by_e[tuple(e)]


def center(a: FiniteAlgebra, max_candidates: int | None = MAX_CANDIDATES) -> CenterAlgebra:
    """Z(A) by testing every N-tuple, in lexicographic order."""
    _require_frame(a)
    check_cap("center_candidates", max_candidates, a.n**a.N)
    found = []
    for e in itertools.product(range(a.n), repeat=a.N):
        c = is_central(a, e)
        if c is not None:
            found.append(c)
    return CenterAlgebra(a, found)


@dataclass(frozen=True)
class Decomposition:
    first: FiniteAlgebra
    second: FiniteAlgebra
    iso: tuple[int, ...]  # x ↦ encoded (x/θ0, x/θ1) in first × second


def decompose(a: FiniteAlgebra, ce: CentralElement) -> Decomposition:
    """A ≅ A/θ0 × A/θ1 via x ↦ (x/θ0, x/θ1); verified before returning."""
    q0, s0 = quotient(a, ce.theta0)
    q1, s1 = quotient(a, ce.theta1)
    iso = tuple(int(s0[x]) * q1.n + int(s1[x]) for x in range(a.n))
    prod = product(q0, q1)
    if not (is_bijection(iso, prod.n) and is_homomorphism(iso, a, prod)):
        raise ValueError("central element does not induce a direct decomposition")
    return Decomposition(q0, q1, iso)


def image_map(cz_a: CenterAlgebra, cz_b: CenterAlgebra, f: Sequence[int]) -> list[int] | None:
    """Index map Z(A) → Z(B) induced by e ↦ f(e), or None if some image is not central."""
    out = []
    for c in cz_a.elements:
        img = tuple(int(f[x]) for x in c.e)
        if img not in cz_b:
            return None
        out.append(cz_b.index(img))
    return out


def is_boolean_homomorphism(cz_a: CenterAlgebra, cz_b: CenterAlgebra, m: Sequence[int]) -> bool:
    r = range(len(cz_a))
    if m[cz_a.bottom] != cz_b.bottom or m[cz_a.top] != cz_b.top:
        return False
    for x in r:
        if m[cz_a.complement[x]] != cz_b.complement[m[x]]:
            return False
        for y in r:
            if m[cz_a.meet[x, y]] != cz_b.meet[m[x], m[y]] or m[cz_a.join[x, y]] != cz_b.join[m[x], m[y]]:
                return False
    return True
