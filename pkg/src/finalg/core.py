"""Finite algebras given by operation tables.

Universe elements are the integers ``0..n-1``.  An operation of arity ``k``
stores its values in a flat table of length ``n**k``, indexed in mixed radix
with the first argument most significant.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

MAX_SIZE = 16
MAX_TABLES = 10**6
ISO_CAP = 12
_PRESERVE_BATCH = 1 << 16


class CapExceeded(RuntimeError):
    """A configured size cap would be exceeded."""

    def __init__(self, cap: str, limit: int, size: int):
        super().__init__(f"cap {cap}={limit} exceeded (size {size})")
        self.cap = cap
        self.limit = limit
        self.size = size


class SignatureMismatch(ValueError):
    pass


def check_cap(cap: str, limit: int | None, size: int) -> None:
    if limit is not None and size > limit:
        raise CapExceeded(cap, limit, size)


def arg_index(args: Sequence[int], n: int) -> int:
    idx = 0
    for a in args:
        idx = idx * n + a
    return idx


def all_args(n: int, k: int) -> np.ndarray:
    """Every argument tuple of length k, rows in table order."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((n,) * k).reshape(k, -1).T
    return grid.astype(np.int64)


class Operation:
    """A named k-ary operation on {0..n-1}, immutable."""

    __slots__ = ("name", "arity", "n", "table")

    def __init__(self, name: str, arity: int, n: int, table: Iterable[int]):
        t = np.array(list(table) if not isinstance(table, np.ndarray) else table, dtype=np.int64).ravel()
        if arity < 0 or n < 1:
            raise ValueError("arity must be >= 0 and n >= 1")
        if t.size != n**arity:
            raise ValueError(f"operation {name}: table length {t.size} != {n}**{arity}")
        if t.size and (t.min() < 0 or t.max() >= n):
            raise ValueError(f"operation {name}: table entry out of range [0, {n})")
        t.setflags(write=False)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "table", t)

    def __setattr__(self, key, value):
        raise AttributeError("Operation is immutable")

    def __eq__(self, other):
        if not isinstance(other, Operation):
            return NotImplemented
        return (self.name, self.arity, self.n) == (other.name, other.arity, other.n) and bool(
            np.array_equal(self.table, other.table)
        )

    def __hash__(self):
        return hash((self.name, self.arity, self.n, self.table.tobytes()))

    def __repr__(self):
        return f"Operation({self.name!r}, arity={self.arity}, n={self.n})"

    def __call__(self, *args: int) -> int:
        return evaluate(self, args)

    def renamed(self, name: str) -> "Operation":
        return Operation(name, self.arity, self.n, self.table)

    def same_table(self, other: "Operation") -> bool:
        return self.arity == other.arity and self.n == other.n and bool(np.array_equal(self.table, other.table))

    def cube(self) -> np.ndarray:
        """The table reshaped to an n x n x ... array (one axis per argument)."""
        return self.table.reshape((self.n,) * self.arity)

    @classmethod
    def from_function(cls, name: str, arity: int, n: int, fn) -> "Operation":
        return cls(name, arity, n, [fn(*args) for args in itertools.product(range(n), repeat=arity)])

    @classmethod
    def projection(cls, arity: int, i: int, n: int, name: str | None = None) -> "Operation":
        return cls(name or f"pr{arity}_{i}", arity, n, all_args(n, arity)[:, i])

    @classmethod
    def constant(cls, value: int, n: int, arity: int = 0, name: str | None = None) -> "Operation":
        return cls(name or f"c{value}", arity, n, np.full(n**arity, value))


def evaluate(op: Operation, args: Sequence[int]) -> int:
    if len(args) != op.arity:
        raise ValueError(f"{op.name}: expected {op.arity} arguments, got {len(args)}")
    for a in args:
        if not 0 <= a < op.n:
            raise ValueError(f"{op.name}: element {a} out of range [0, {op.n})")
    return int(op.table[arg_index(args, op.n)])


@dataclass(frozen=True)
class Relation:
    """An h-ary relation on {0..n-1}; tuples are kept sorted and duplicate free."""

    arity: int
    n: int
    tuples: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("relation arity must be positive")
        clean = set()
        for t in self.tuples:
            t = tuple(int(x) for x in t)
            if len(t) != self.arity:
                raise ValueError(f"tuple {t} has length != {self.arity}")
            if any(not 0 <= x < self.n for x in t):
                raise ValueError(f"tuple {t} has an entry outside [0, {self.n})")
            clean.add(t)
        object.__setattr__(self, "tuples", tuple(sorted(clean)))

    @classmethod
    def from_predicate(cls, n: int, h: int, pred) -> "Relation":
        return cls(h, n, tuple(t for t in itertools.product(range(n), repeat=h) if pred(*t)))

    @cached_property
    def mask(self) -> np.ndarray:
        """Boolean membership array over mixed-radix codes of h-tuples."""
        m = np.zeros(self.n**self.arity, dtype=bool)
        for t in self.tuples:
            m[arg_index(t, self.n)] = True
        m.setflags(write=False)
        return m

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.tuples, dtype=np.int64).reshape(len(self.tuples), self.arity)

    def __contains__(self, t) -> bool:
        t = tuple(t)
        if len(t) != self.arity or any(not 0 <= x < self.n for x in t):
            return False
        return bool(self.mask[arg_index(t, self.n)])

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def is_full(self) -> bool:
        return len(self.tuples) == self.n**self.arity


@dataclass(frozen=True)
class PreservationWitness:
    """k relation tuples whose coordinatewise image under the operation leaves rho."""

    rows: tuple[tuple[int, ...], ...]
    output: tuple[int, ...]


class PreservationResult:
    __slots__ = ("holds", "witness")

    def __init__(self, holds: bool, witness: PreservationWitness | None = None):
        self.holds = holds
        self.witness = witness

    def __bool__(self):
        return self.holds

    def __repr__(self):
        return f"PreservationResult({self.holds}, {self.witness})"


def preserves(op: Operation, rho: Relation) -> PreservationResult:
    """Does ``op`` map every k-tuple of rho-tuples (coordinatewise) into rho?

    On failure the lexicographically least witness (in rho's tuple order) is
    returned.
    """
    if op.n != rho.n:
        raise SignatureMismatch(f"operation on {op.n} elements vs relation on {rho.n}")
    k, n, h = op.arity, op.n, rho.arity
    R = rho.array
    m = len(R)
    if k == 0:
        out = (int(op.table[0]),) * h
        return PreservationResult(True) if out in rho else PreservationResult(False, PreservationWitness((), out))
    if m == 0:
        return PreservationResult(True)
    # Sweep the outermost choice in slices; the rest is vectorised.  Rows of
    # a slice are in lexicographic choice order, so the first bad row is the
    # least witness.
    inner = m ** (k - 1)
    inner_choice = all_args(m, k - 1)  # (inner, k-1) indices into R
    inner_code = np.zeros((inner, h), dtype=np.int64)
    for j in range(k - 1):
        inner_code = inner_code * n + R[inner_choice[:, j]]
    weight = n ** (k - 1)
    step = max(1, _PRESERVE_BATCH // inner)
    for lo in range(0, m, step):
        firsts = np.arange(lo, min(m, lo + step))
        codes = (R[firsts] * weight)[:, None, :] + inner_code[None, :, :]
        outs = op.table[codes].reshape(-1, h)
        out_code = np.zeros(len(outs), dtype=np.int64)
        for j in range(h):
            out_code = out_code * n + outs[:, j]
        bad = np.flatnonzero(~rho.mask[out_code])
        if bad.size:
            first, b = divmod(int(bad[0]), inner)
            first += lo
            rows = (R[first],) + tuple(R[inner_choice[b, j]] for j in range(k - 1))
            return PreservationResult(
                False,
                PreservationWitness(tuple(tuple(int(x) for x in r) for r in rows), tuple(int(x) for x in outs[bad[0]])),
            )
    return PreservationResult(True)


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """A finite algebra: universe {0..n-1} with an ordered list of named operations.

    ``constants_zero`` and ``constants_one`` name nullary operations making up
    the tuples 0⃗ and 1⃗ (both of length N).
    """

    n: int
    operations: tuple[Operation, ...]
    constants_zero: tuple[str, ...] = ()
    constants_one: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "operations", tuple(self.operations))
        object.__setattr__(self, "constants_zero", tuple(self.constants_zero))
        object.__setattr__(self, "constants_one", tuple(self.constants_one))
        if self.n < 1:
            raise ValueError("universe must be non-empty")
        names = set()
        for op in self.operations:
            if op.n != self.n:
                raise ValueError(f"operation {op.name} lives on {op.n} elements, algebra has {self.n}")
            if op.name in names:
                raise ValueError(f"duplicate operation name {op.name}")
            names.add(op.name)
        if len(self.constants_zero) != len(self.constants_one):
            raise ValueError("0⃗ and 1⃗ must have the same length")
        for c in self.constants_zero + self.constants_one:
            if c not in names:
                raise ValueError(f"constant {c} is not an operation")
            if self.op(c).arity != 0:
                raise ValueError(f"constant {c} is not nullary")

    def __eq__(self, other):
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return (self.n, self.operations, self.constants_zero, self.constants_one) == (
            other.n,
            other.operations,
            other.constants_zero,
            other.constants_one,
        )

    def __hash__(self):
        return hash((self.n, self.operations, self.constants_zero, self.constants_one))

    def __repr__(self):
        return f"FiniteAlgebra(n={self.n}, ops={len(self.operations)}, N={self.N})"

    def __len__(self):
        return self.n

    @cached_property
    def _by_name(self) -> dict[str, Operation]:
        return {op.name: op for op in self.operations}

    def op(self, name: str) -> Operation:
        return self._by_name[name]

    def has_op(self, name: str) -> bool:
        return name in self._by_name

    @property
    def N(self) -> int:
        return len(self.constants_zero)

    @property
    def signature(self) -> tuple[tuple[str, int], ...]:
        return tuple((op.name, op.arity) for op in self.operations)

    @property
    def zero(self) -> tuple[int, ...]:
        return tuple(int(self.op(c).table[0]) for c in self.constants_zero)

    @property
    def one(self) -> tuple[int, ...]:
        return tuple(int(self.op(c).table[0]) for c in self.constants_one)

    def with_operations(self, extra: Iterable[Operation]) -> "FiniteAlgebra":
        return FiniteAlgebra(self.n, self.operations + tuple(extra), self.constants_zero, self.constants_one)

    @cached_property
    def translations(self) -> "Translations":
        return Translations.of(self)


@dataclass(frozen=True)
class Translations:
    """Distinct basic translations x ↦ f(c₁..c_{i-1}, x, c_{i+1}..c_k).

    ``maps`` has one row per distinct translation; ``sources`` records, for
    each row, the operation, argument position and constant filling that
    first produced it.
    """

    maps: np.ndarray
    sources: tuple[tuple[str, int, tuple[int, ...]], ...]

    @classmethod
    def of(cls, a: FiniteAlgebra) -> "Translations":
        n = a.n
        rows, srcs = [], []
        for op in a.operations:
            k = op.arity
            if k == 0:
                continue
            cube = op.cube()
            fill = all_args(n, k - 1)
            for i in range(k):
                moved = np.moveaxis(cube, i, -1).reshape(-1, n)
                rows.append(moved)
                srcs.extend((op.name, i, tuple(int(x) for x in f)) for f in fill)
        if not rows:
            return cls(np.zeros((0, n), dtype=np.int64), ())
        allrows = np.concatenate(rows)
        _, first = np.unique(allrows, axis=0, return_index=True)
        first.sort()
        maps = allrows[first]
        maps.setflags(write=False)
        return cls(maps, tuple(srcs[i] for i in first))


def same_signature(a: FiniteAlgebra, b: FiniteAlgebra) -> bool:
    return a.signature == b.signature and (a.constants_zero, a.constants_one) == (b.constants_zero, b.constants_one)


def _require_signature(a: FiniteAlgebra, b: FiniteAlgebra) -> None:
    if a.signature != b.signature:
        raise SignatureMismatch("algebras have different signatures")


def encode_pair(x: int, y: int, nb: int) -> int:
    return x * nb + y


def decode_pair(z: int, nb: int) -> tuple[int, int]:
    return divmod(z, nb)


def product(a: FiniteAlgebra, b: FiniteAlgebra) -> FiniteAlgebra:
    """Direct product A×B on {0..|A||B|-1}, pairing (x, y) ↦ x·|B| + y."""
    _require_signature(a, b)
    na, nb = a.n, b.n
    n = na * nb
    ops = []
    for oa, ob in zip(a.operations, b.operations):
        k = oa.arity
        args = all_args(n, k)
        xa, xb = np.divmod(args, nb)
        ia = np.zeros(len(args), dtype=np.int64)
        ib = np.zeros(len(args), dtype=np.int64)
        for j in range(k):
            ia = ia * na + xa[:, j]
            ib = ib * nb + xb[:, j]
        ops.append(Operation(oa.name, k, n, oa.table[ia] * nb + ob.table[ib]))
    return FiniteAlgebra(n, ops, a.constants_zero, a.constants_one)


def power(a: FiniteAlgebra, k: int) -> FiniteAlgebra:
    out = a
    for _ in range(k - 1):
        out = product(out, a)
    return out


def induced(a: FiniteAlgebra, image: np.ndarray, size: int) -> list[Operation]:
    """Operations of ``a`` pushed along a surjection ``image`` onto {0..size-1}.

    Only meaningful when the surjection's kernel is a congruence.
    """
    image = np.asarray(image, dtype=np.int64)
    reps = np.zeros(size, dtype=np.int64)
    for x in range(a.n - 1, -1, -1):
        reps[image[x]] = x
    ops = []
    for op in a.operations:
        args = all_args(size, op.arity)
        idx = np.zeros(len(args), dtype=np.int64)
        for j in range(op.arity):
            idx = idx * a.n + reps[args[:, j]]
        ops.append(Operation(op.name, op.arity, size, image[op.table[idx]]))
    return ops


def quotient(a: FiniteAlgebra, theta) -> tuple[FiniteAlgebra, np.ndarray]:
    """A/θ with blocks numbered by their least element; returns (algebra, surjection)."""
    from .congruence import Congruence, compatibility_witness

    if not isinstance(theta, Congruence):
        theta = Congruence.from_labels(theta)
    w = compatibility_witness(a, theta)
    if w is not None:
        raise ValueError(f"not a congruence: {w}")
    surj = np.array(theta.block_id, dtype=np.int64)
    q = FiniteAlgebra(theta.num_blocks, induced(a, surj, theta.num_blocks), a.constants_zero, a.constants_one)
    return q, surj


def subuniverse(a: FiniteAlgebra, gens: Iterable[int]) -> list[int]:
    """Least subset containing ``gens`` and all constants, closed under every operation."""
    S = set(int(g) for g in gens)
    for g in S:
        if not 0 <= g < a.n:
            raise ValueError(f"generator {g} out of range")
    for op in a.operations:
        if op.arity == 0:
            S.add(int(op.table[0]))
    if not S:
        raise ValueError("empty generating set and no constants in the signature")
    ops = [op for op in a.operations if op.arity > 0]
    while True:
        cur = np.array(sorted(S), dtype=np.int64)
        new = set()
        for op in ops:
            args = cur[all_args(len(cur), op.arity)]
            idx = np.zeros(len(args), dtype=np.int64)
            for j in range(op.arity):
                idx = idx * a.n + args[:, j]
            new.update(np.unique(op.table[idx]).tolist())
        if new <= S:
            return sorted(S)
        S |= new


def restrict(a: FiniteAlgebra, universe: Sequence[int]) -> tuple[FiniteAlgebra, np.ndarray]:
    """The subalgebra on a closed subset, renumbered in increasing order; returns (algebra, inclusion)."""
    universe = np.array(sorted(universe), dtype=np.int64)
    pos = np.full(a.n, -1, dtype=np.int64)
    pos[universe] = np.arange(len(universe))
    m = len(universe)
    ops = []
    for op in a.operations:
        args = universe[all_args(m, op.arity)]
        idx = np.zeros(len(args), dtype=np.int64)
        for j in range(op.arity):
            idx = idx * a.n + args[:, j]
        vals = pos[op.table[idx]]
        if (vals < 0).any():
            raise ValueError(f"subset not closed under {op.name}")
        ops.append(Operation(op.name, op.arity, m, vals))
    return FiniteAlgebra(m, ops, a.constants_zero, a.constants_one), universe


def subalgebra_generated(a: FiniteAlgebra, gens: Iterable[int]) -> tuple[FiniteAlgebra, np.ndarray]:
    return restrict(a, subuniverse(a, gens))


def all_subuniverses(a: FiniteAlgebra, max_size: int | None = MAX_SIZE) -> list[tuple[int, ...]]:
    """Every non-empty subuniverse, found by closing every subset (small algebras only)."""
    check_cap("max_size", max_size, a.n)
    found = set()
    has_const = any(op.arity == 0 for op in a.operations)
    for r in range(0 if has_const else 1, a.n + 1):
        for gens in itertools.combinations(range(a.n), r):
            found.add(tuple(subuniverse(a, gens)))
    return sorted(found, key=lambda s: (len(s), s))


def is_homomorphism(f: Sequence[int], a: FiniteAlgebra, b: FiniteAlgebra) -> bool:
    _require_signature(a, b)
    f = np.asarray(f, dtype=np.int64)
    if f.shape != (a.n,) or (f < 0).any() or (f >= b.n).any():
        return False
    for oa, ob in zip(a.operations, b.operations):
        args = all_args(a.n, oa.arity)
        idx = np.zeros(len(args), dtype=np.int64)
        for j in range(oa.arity):
            idx = idx * b.n + f[args[:, j]]
        if not np.array_equal(f[oa.table], ob.table[idx]):
            return False
    return True


def find_isomorphism(a: FiniteAlgebra, b: FiniteAlgebra, max_size: int | None = ISO_CAP) -> tuple[int, ...] | None:
    """Backtracking search for a bijective homomorphism A → B."""
    _require_signature(a, b)
    if a.n != b.n:
        return None
    check_cap("iso", max_size, a.n)
    n = a.n
    pairs = [(oa, ob) for oa, ob in zip(a.operations, b.operations)]
    # Deduplicate identical table pairs; many large signatures repeat tables.
    seen, uniq = set(), []
    for oa, ob in pairs:
        key = (oa.arity, oa.table.tobytes(), ob.table.tobytes())
        if key not in seen:
            seen.add(key)
            uniq.append((oa, ob))
    arg_cache = {k: all_args(n, k) for k in {oa.arity for oa, _ in uniq}}

    def propagate(f: np.ndarray) -> np.ndarray | None:
        f = f.copy()
        while True:
            changed = False
            for oa, ob in uniq:
                args = arg_cache[oa.arity]
                img = f[args] if oa.arity else np.zeros((1, 0), dtype=np.int64)
                ok = (img >= 0).all(axis=1)
                if not ok.any():
                    continue
                idx = np.zeros(int(ok.sum()), dtype=np.int64)
                for j in range(oa.arity):
                    idx = idx * n + img[ok, j]
                src = oa.table[ok]
                dst = ob.table[idx]
                cur = f[src]
                clash = (cur >= 0) & (cur != dst)
                if clash.any():
                    return None
                unset = cur < 0
                if unset.any():
                    s, d = src[unset], dst[unset]
                    # conflicting demands on the same source
                    for x, y in zip(s.tolist(), d.tolist()):
                        if f[x] < 0:
                            f[x] = y
                        elif f[x] != y:
                            return None
                    changed = True
            used = f[f >= 0]
            if len(np.unique(used)) != len(used):
                return None
            if not changed:
                return f

    def search(f: np.ndarray) -> np.ndarray | None:
        f = propagate(f)
        if f is None:
            return None
        free = np.flatnonzero(f < 0)
        if free.size == 0:
            return f if is_homomorphism(f, a, b) else None
        x = int(free[0])
        taken = set(f[f >= 0].tolist())
        for y in range(n):
            if y in taken:
                continue
            g = f.copy()
            g[x] = y
            r = search(g)
            if r is not None:
                return r
        return None

    res = search(np.full(n, -1, dtype=np.int64))
    return None if res is None else tuple(int(x) for x in res)


def is_bijection(f: Sequence[int], n: int) -> bool:
    return sorted(int(x) for x in f) == list(range(n))


def compose_maps(f: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
    """x ↦ g(f(x))."""
    return tuple(int(g[x]) for x in f)


def algebra_from_ops(n: int, ops: Mapping[str, tuple[int, object]], zero=(), one=()) -> FiniteAlgebra:
    """Convenience builder: ``ops`` maps name → (arity, callable or constant value)."""
    built = []
    for name, (k, fn) in ops.items():
        if k == 0 and not callable(fn):
            built.append(Operation.constant(int(fn), n, name=name))
        else:
            built.append(Operation.from_function(name, k, n, fn))
    return FiniteAlgebra(n, built, tuple(zero), tuple(one))
