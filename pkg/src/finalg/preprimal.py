"""Truncated preprimal algebras P_σ and the terms that make them Pierce varieties.

P_σ has as operations every σ-preserving operation.  Only arities up to a
cap are enumerated; named higher-arity terms (U, f) are adjoined
explicitly.  A truncated algebra has fewer operations than P_σ, so its
congruence lattice can only be larger.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .core import MAX_TABLES, FiniteAlgebra, Operation, Relation, all_args, check_cap, preserves
from .relations import classify, is_central_relation, is_equivalence

MAX_CANDIDATES = 10**8


def _constraints(rho: Relation, n: int, k: int) -> np.ndarray:
    """Table-index tuples (one per choice of k rho-tuples) whose values must land in rho."""
    R = rho.array
    choice = all_args(len(R), k)
    idx = np.zeros((len(choice), rho.arity), dtype=np.int64)
    for j in range(k):
        idx = idx * n + R[choice[:, j]]
    return np.unique(idx, axis=0)


def _solve(
    n: int,
    size: int,
    cons: np.ndarray,
    mask: np.ndarray,
    fixed: dict[int, int] | None = None,
) -> Iterator[np.ndarray]:
    """Tables t of length ``size`` with mask[code(t[c])] for every constraint row c.

    Yields solutions in lexicographic order.  Variables are assigned in index
    order; each constraint is checked once its largest index is assigned.
    """
    fixed = fixed or {}
    h = cons.shape[1] if cons.size else 0
    by_var: list[np.ndarray] = [np.zeros((0, h), dtype=np.int64) for _ in range(size)]
    if cons.size:
        last = cons.max(axis=1)
        for v in np.unique(last):
            by_var[int(v)] = cons[last == v]
    weights = n ** np.arange(h - 1, -1, -1, dtype=np.int64)
    t = np.zeros(size, dtype=np.int64)

    def ok(v: int) -> bool:
        c = by_var[v]
        if not len(c):
            return True
        return bool(mask[(t[c] * weights).sum(axis=1)].all())

    def rec(v: int):
        if v == size:
            yield t.copy()
            return
        choices = [fixed[v]] if v in fixed else range(n)
        for val in choices:
            t[v] = val
            if ok(v):
                yield from rec(v + 1)

    yield from rec(0)


def pol(
    sigma: Relation,
    arity: int,
    max_candidates: int | None = MAX_CANDIDATES,
    max_tables: int | None = MAX_TABLES,
    force: bool = False,
) -> list[Operation]:
    """Every ``arity``-ary operation preserving sigma, in lexicographic table order."""
    n = sigma.n
    if not force:
        check_cap("pol_candidates", max_candidates, n ** (n**arity))
    size = n**arity
    cons = _constraints(sigma, n, arity)
    out = []
    prefix = {0: "c", 1: "u", 2: "b"}.get(arity, f"p{arity}_")
    for t in _solve(n, size, cons, sigma.mask):
        if arity == 0:
            name = f"c{int(t[0])}"
        else:
            name = f"{prefix}{len(out)}"
        out.append(Operation(name, arity, n, t))
        check_cap("max_tables", max_tables, len(out))
    return out


def least_preserving(sigma: Relation, arity: int, fixed: dict[tuple[int, ...], int]) -> np.ndarray | None:
    """Lexicographically least sigma-preserving table agreeing with ``fixed`` (args → value)."""
    n = sigma.n
    fx = {}
    for args, val in fixed.items():
        i = 0
        for a in args:
            i = i * n + a
        if fx.get(i, val) != val:
            return None
        fx[i] = val
    cons = _constraints(sigma, n, arity)
    return next(_solve(n, n**arity, cons, sigma.mask, fx), None)


def discriminator(n: int) -> Operation:
    """t(x, y, z) = z if x = y else x."""
    return Operation.from_function("t", 3, n, lambda x, y, z: z if x == y else x)


@dataclass(frozen=True)
class PierceTerms:
    zero: int
    one: int
    plus: Operation
    times: Operation

    def u(self) -> Operation:
        return pierce_u(self.plus, self.times)


def pierce_u(plus: Operation, times: Operation, name: str = "U") -> Operation:
    """U(x, y, z, w) = (x × w) + (y × z)."""
    n = plus.n
    return Operation.from_function(name, 4, n, lambda x, y, z, w: plus(times(x, w), times(y, z)))


def find_pierce_terms(sigma: Relation) -> PierceTerms | None:
    """Least (0, 1, +, ×) with σ-preserving +, × and x×0 = 0×x = 0, x×1 = 1×x = x, x+0 = 0+x = x."""
    central, _ = is_central_relation(sigma)
    if sigma.arity != 2 or not central:
        raise ValueError("find_pierce_terms needs a binary central relation")
    n = sigma.n
    for zero, one in itertools.product(range(n), repeat=2):
        if zero == one:
            continue
        plus_fixed = {(x, zero): x for x in range(n)} | {(zero, x): x for x in range(n)}
        plus = least_preserving(sigma, 2, plus_fixed)
        if plus is None:
            continue
        times_fixed: dict[tuple[int, int], int] = {}
        clash = False
        for x in range(n):
            for args, val in (((x, zero), zero), ((zero, x), zero), ((x, one), x), ((one, x), x)):
                if times_fixed.setdefault(args, val) != val:
                    clash = True
        if clash:
            continue
        times = least_preserving(sigma, 2, times_fixed)
        if times is None:
            continue
        return PierceTerms(zero, one, Operation("plus", 2, n, plus), Operation("times", 2, n, times))
    return None


def build_f(sigma: Relation, zero: int, one: int) -> Operation:
    """f(x,y,z,w) = x if z~0 and w~1; y if z~1 and w~0; 0 otherwise (~ is sigma)."""
    if not is_equivalence(sigma):
        raise ValueError("build_f needs an equivalence relation")
    if (zero, one) in sigma:
        raise ValueError("0 and 1 must lie in different blocks")

    def f(x, y, z, w):
        if (z, zero) in sigma and (w, one) in sigma:
            return x
        if (z, one) in sigma and (w, zero) in sigma:
            return y
        return zero

    op = Operation.from_function("f", 4, sigma.n, f)
    res = preserves(op, sigma)
    if not res:
        raise AssertionError(f"f does not preserve sigma: {res.witness}")
    return op


@dataclass(frozen=True)
class RefutationWitness:
    """Rows (x, y, frame) whose forced U-values give a tuple outside sigma.

    Reading the matrix down a column gives an h-tuple that must lie in
    sigma; the forced outputs (first entry for the a-frame, second for the
    b-frame) form ``output_tuple``, which does not.
    """

    sigma: Relation
    a_vec: tuple[int, ...]
    b_vec: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]
    column_justifications: tuple[str, ...]
    output_tuple: tuple[int, ...]

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(row[j] for row in self.matrix) for j in range(len(self.matrix[0]))]

    def forced_outputs(self) -> tuple[int, ...]:
        out = []
        for row in self.matrix:
            frame = tuple(row[2:])
            if frame == self.a_vec:
                out.append(row[0])
            elif frame == self.b_vec:
                out.append(row[1])
            else:
                raise ValueError(f"row {row} uses neither frame")
        return tuple(out)

    def verify(self) -> bool:
        """Self-check using relation lookups only."""
        return (
            all(col in self.sigma for col in self.columns())
            and self.forced_outputs() == self.output_tuple
            and self.output_tuple not in self.sigma
        )


def refute_u_term(sigma: Relation, a_vec: Sequence[int], b_vec: Sequence[int]) -> RefutationWitness:
    """Witness that no sigma-preserving U has U(x,y,a⃗) = x and U(x,y,b⃗) = y (h ≥ 3)."""
    central, _ = is_central_relation(sigma)
    h = sigma.arity
    if not central or h < 3:
        raise ValueError("refute_u_term needs a central relation of arity >= 3")
    a_vec, b_vec = tuple(a_vec), tuple(b_vec)
    if len(a_vec) != len(b_vec) or a_vec == b_vec:
        raise ValueError("a_vec and b_vec must be distinct tuples of equal length")
    outside = next((t for t in itertools.product(range(sigma.n), repeat=h) if t not in sigma), None)
    if outside is None:
        raise ValueError("sigma is the full relation")
    rows = []
    for j in range(0, h - 1, 2):
        c1, c2 = outside[j], outside[j + 1]
        rows.append((c1, c2) + a_vec)
        rows.append((c1, c2) + b_vec)
    if h % 2:
        rows.append((outside[-1], outside[-1]) + a_vec)
    w = RefutationWitness(sigma, a_vec, b_vec, tuple(rows), (), outside)
    just = []
    for col in w.columns():
        if len(set(col)) < len(col):
            just.append("repeat => totally reflexive")
        elif col in sigma:
            just.append("member")
        else:
            raise AssertionError(f"column {col} is not in sigma")
    w = RefutationWitness(sigma, a_vec, b_vec, tuple(rows), tuple(just), outside)
    if not w.verify():
        raise AssertionError("refutation witness failed its self-check")
    return w


def apply_to_rows(op: Operation, rows: Sequence[Sequence[int]]) -> tuple[int, ...]:
    return tuple(op(*r) for r in rows)


@dataclass(frozen=True)
class TruncatedPreprimal:
    base: FiniteAlgebra
    sigma: Relation
    cap: int
    kind: str
    zero_elt: int | None
    one_elt: int | None
    extras: tuple[str, ...] = field(default=())

    @property
    def algebra(self) -> FiniteAlgebra:
        return self.base


def build_preprimal(
    sigma: Relation,
    cap: int = 2,
    with_terms: bool = True,
    max_candidates: int | None = MAX_CANDIDATES,
    max_tables: int | None = MAX_TABLES,
) -> TruncatedPreprimal:
    """All sigma-preserving operations of arity <= cap, plus the Pierce terms when ``with_terms``.

    The constants 0⃗ = (c{zero}), 1⃗ = (c{one}) are designated per kind:
    for an equivalence the least pair in different blocks, for a binary
    central relation the pair found by ``find_pierce_terms``, otherwise the
    least two constants available.
    """
    if sigma.is_full():
        raise ValueError("sigma is the full relation; nothing to designate")
    kind = classify(sigma).kind
    ops: list[Operation] = []
    for k in range(cap + 1):
        ops.extend(pol(sigma, k, max_candidates, max_tables))
    consts = sorted(int(op.table[0]) for op in ops if op.arity == 0)
    extras: list[Operation] = []
    zero = one = None
    if kind == "nontrivial_proper_equivalence":
        zero, one = next((x, y) for x in consts for y in consts if (x, y) not in sigma)
        if with_terms:
            extras.append(build_f(sigma, zero, one))
    elif kind == "central" and sigma.arity == 2:
        terms = find_pierce_terms(sigma)
        if terms is None:
            raise ValueError("no Pierce terms (+, ×, 0, 1) exist for this relation")
        zero, one = terms.zero, terms.one
        if with_terms:
            extras += [terms.plus, terms.times, terms.u()]
    elif len(consts) >= 2:
        zero, one = consts[0], consts[1]
    zero_names = (f"c{zero}",) if zero is not None else ()
    one_names = (f"c{one}",) if one is not None else ()
    base = FiniteAlgebra(sigma.n, ops + extras, zero_names, one_names)
    for op in base.operations:
        if not preserves(op, sigma):
            raise AssertionError(f"{op.name} does not preserve sigma")
    return TruncatedPreprimal(base, sigma, cap, kind, zero, one, tuple(op.name for op in extras))
