"""Congruences of finite algebras: principal congruences, Con(A), factor pairs, FHP, SI/DI."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .core import MAX_SIZE, FiniteAlgebra, check_cap, product


def canonical_labels(labels: Iterable[int]) -> tuple[int, ...]:
    """Renumber block labels in order of first occurrence."""
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(int(l), len(seen)) for l in labels)


@dataclass(frozen=True)
class Congruence:
    """A partition of {0..n-1} stored as canonical block ids."""

    block_id: tuple[int, ...]

    @classmethod
    def from_labels(cls, labels: Iterable[int]) -> "Congruence":
        return cls(canonical_labels(labels))

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Congruence":
        edges = [(x, x) for x in range(n)]
        for blk in blocks:
            blk = list(blk)
            edges += [(blk[0], x) for x in blk]
        return _components(n, edges)

    @classmethod
    def bottom(cls, n: int) -> "Congruence":
        return cls(tuple(range(n)))

    @classmethod
    def top(cls, n: int) -> "Congruence":
        return cls((0,) * n)

    @property
    def n(self) -> int:
        return len(self.block_id)

    @cached_property
    def num_blocks(self) -> int:
        return max(self.block_id) + 1 if self.block_id else 0

    @cached_property
    def labels(self) -> np.ndarray:
        a = np.array(self.block_id, dtype=np.int64)
        a.setflags(write=False)
        return a

    def blocks(self) -> list[tuple[int, ...]]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for x, b in enumerate(self.block_id):
            out[b].append(x)
        return [tuple(b) for b in out]

    def related(self, x: int, y: int) -> bool:
        return self.block_id[x] == self.block_id[y]

    def is_bottom(self) -> bool:
        return self.num_blocks == self.n

    def is_top(self) -> bool:
        return self.num_blocks <= 1

    @cached_property
    def matrix(self) -> np.ndarray:
        lab = self.labels
        return lab[:, None] == lab[None, :]

    def __le__(self, other: "Congruence") -> bool:
        """Refinement: every block of self lies inside a block of other."""
        return bool(np.all(other.matrix[self.matrix]))

    def __lt__(self, other: "Congruence") -> bool:
        return self != other and self <= other

    def pairs(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.n) for y in range(self.n) if self.block_id[x] == self.block_id[y]]

    def __str__(self):
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks())


def _components(n: int, edges: Sequence[tuple[int, int]] | np.ndarray) -> Congruence:
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    g = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
    _, lab = connected_components(g, directed=False)
    return Congruence.from_labels(lab)


def _block_reps(c: Congruence) -> np.ndarray:
    first = np.zeros(c.num_blocks, dtype=np.int64)
    for x in range(c.n - 1, -1, -1):
        first[c.block_id[x]] = x
    return first[c.labels]


def generate(a: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Congruence:
    """Least congruence containing the given pairs (closure under basic translations)."""
    n = a.n
    T = a.translations.maps
    idx = np.arange(n)
    cur = _components(n, [(x, x) for x in range(n)] + [tuple(p) for p in pairs])
    while True:
        rep = _block_reps(cur)
        if T.shape[0]:
            e = np.stack([T[:, idx].ravel(), T[:, rep].ravel()], axis=1)
            e = np.concatenate([e, np.stack([idx, rep], axis=1)])
        else:
            e = np.stack([idx, rep], axis=1)
        nxt = _components(n, e)
        if nxt == cur:
            return cur
        cur = nxt


def principal_congruence(a: FiniteAlgebra, x: int, y: int) -> Congruence:
    if not (0 <= x < a.n and 0 <= y < a.n):
        raise ValueError("elements out of range")
    return _cache(a, ("principal", min(x, y), max(x, y)), lambda: generate(a, [(x, y)]))


def tuple_congruence(a: FiniteAlgebra, xs: Sequence[int], ys: Sequence[int]) -> Congruence:
    """θ(x⃗, y⃗) = join of the principal congruences θ(x_k, y_k)."""
    out = Congruence.bottom(a.n)
    for x, y in zip(xs, ys):
        out = join(out, principal_congruence(a, x, y))
    return out


def join(c1: Congruence, c2: Congruence) -> Congruence:
    _same_universe(c1, c2)
    n = c1.n
    idx = np.arange(n)
    e = np.concatenate([np.stack([idx, _block_reps(c1)], 1), np.stack([idx, _block_reps(c2)], 1)])
    return _components(n, e)


def meet(c1: Congruence, c2: Congruence) -> Congruence:
    _same_universe(c1, c2)
    return Congruence.from_labels(a * c2.num_blocks + b for a, b in zip(c1.block_id, c2.block_id))


def compose(c1: Congruence, c2: Congruence) -> np.ndarray:
    """The relation c1∘c2 = {(x, z) : x c1 y c2 z for some y} as a boolean matrix."""
    _same_universe(c1, c2)
    return (c1.matrix.astype(np.int64) @ c2.matrix.astype(np.int64)) > 0


def _same_universe(c1: Congruence, c2: Congruence) -> None:
    if c1.n != c2.n:
        raise ValueError("congruences on different universes")


def compatibility_witness(a: FiniteAlgebra, c: Congruence) -> str | None:
    """None if c is compatible with every operation; otherwise a description of a failure."""
    if c.n != a.n:
        return f"partition on {c.n} elements, algebra has {a.n}"
    tr = a.translations
    if tr.maps.shape[0] == 0:
        return None
    rep = _block_reps(c)
    lab = c.labels
    bad = lab[tr.maps] != lab[tr.maps[:, rep]]
    if not bad.any():
        return None
    row, x = map(int, np.argwhere(bad)[0])
    name, pos, fill = tr.sources[row]
    return (
        f"operation {name} at argument {pos} with other arguments {fill} maps related "
        f"{x}~{int(rep[x])} to unrelated {int(tr.maps[row, x])},{int(tr.maps[row, rep[x]])}"
    )


def is_congruence(a: FiniteAlgebra, partition: Congruence | Sequence[int]) -> bool:
    if not isinstance(partition, Congruence):
        partition = Congruence.from_labels(partition)
    return compatibility_witness(a, partition) is None


class ConLattice:
    """Con(A) as a list ordered from Δ (first) to ∇ (last)."""

    def __init__(self, n: int, congruences: Iterable[Congruence]):
        cons = sorted(set(congruences), key=lambda c: (-c.num_blocks, c.block_id))
        self.n = n
        self.congruences: tuple[Congruence, ...] = tuple(cons)
        self.index = {c: i for i, c in enumerate(cons)}

    def __len__(self):
        return len(self.congruences)

    def __iter__(self):
        return iter(self.congruences)

    def __contains__(self, c):
        return c in self.index

    @property
    def bottom(self) -> Congruence:
        return self.congruences[0]

    @property
    def top(self) -> Congruence:
        return self.congruences[-1]

    def as_set(self) -> frozenset[Congruence]:
        return frozenset(self.congruences)

    @cached_property
    def order(self) -> np.ndarray:
        m = len(self)
        return np.array([[self.congruences[i] <= self.congruences[j] for j in range(m)] for i in range(m)])

    def hasse_edges(self) -> list[tuple[int, int]]:
        """Covering pairs (i, j) with congruence i covered by congruence j."""
        le = self.order
        m = len(self)
        out = []
        for i in range(m):
            for j in range(m):
                if i != j and le[i, j] and not any(k not in (i, j) and le[i, k] and le[k, j] for k in range(m)):
                    out.append((i, j))
        return out

    def atoms(self) -> list[Congruence]:
        return [self.congruences[j] for i, j in self.hasse_edges() if i == 0]


def all_congruences(a: FiniteAlgebra, max_size: int | None = MAX_SIZE) -> ConLattice:
    check_cap("max_size", max_size, a.n)
    return _cache(a, "con", lambda: _all_congruences(a))


def _all_congruences(a: FiniteAlgebra) -> ConLattice:
    n = a.n
    principals = {principal_congruence(a, x, y) for x in range(n) for y in range(x + 1, n)}
    principals.discard(Congruence.bottom(n))
    found = {Congruence.bottom(n)} | principals
    frontier = set(principals)
    while frontier:
        new = set()
        for c in frontier:
            for p in principals:
                j = join(c, p)
                if j not in found:
                    new.add(j)
        found |= new
        frontier = new
    return ConLattice(n, found)


@dataclass(frozen=True)
class FactorPair:
    theta: Congruence
    delta: Congruence

    def is_trivial(self) -> bool:
        return self.theta.is_bottom() or self.delta.is_bottom()


def complementary(theta: Congruence, delta: Congruence) -> bool:
    """θ∧δ = Δ and θ∘δ = ∇."""
    return meet(theta, delta).is_bottom() and bool(compose(theta, delta).all())


def is_factor_pair(a: FiniteAlgebra, theta: Congruence, delta: Congruence) -> bool:
    return is_congruence(a, theta) and is_congruence(a, delta) and complementary(theta, delta)


def factor_pairs(a: FiniteAlgebra, max_size: int | None = MAX_SIZE) -> list[FactorPair]:
    con = all_congruences(a, max_size)

    def build():
        return [
            FactorPair(t, d)
            for t in con
            for d in con
            if complementary(t, d)
        ]

    return _cache(a, "factor_pairs", build)


@dataclass(frozen=True)
class FHPResult:
    holds: bool
    product_congruences: int
    counterexample: Congruence | None = None

    def __bool__(self):
        return self.holds


def product_congruence(t1: Congruence, t2: Congruence) -> Congruence:
    """θ₁×θ₂ on A×B under the pairing (x, y) ↦ x·|B| + y."""
    nb = t2.n
    return Congruence.from_labels(
        t1.block_id[z // nb] * t2.num_blocks + t2.block_id[z % nb] for z in range(t1.n * nb)
    )


def check_fhp(a: FiniteAlgebra, b: FiniteAlgebra, max_size: int | None = MAX_SIZE) -> FHPResult:
    """Is every congruence of A×B a product congruence θ₁×θ₂?"""
    check_cap("max_size", max_size, a.n * b.n)
    ab = product(a, b)
    con_ab = all_congruences(ab, max_size)
    prods = {product_congruence(t1, t2) for t1 in all_congruences(a, max_size) for t2 in all_congruences(b, max_size)}
    for c in con_ab:
        if c not in prods:
            return FHPResult(False, len(con_ab), c)
    return FHPResult(True, len(con_ab))


def subdirectly_irreducible(a: FiniteAlgebra, max_size: int | None = MAX_SIZE) -> tuple[bool, Congruence | None]:
    """(is SI, monolith); the monolith is the meet of all nontrivial congruences."""
    con = all_congruences(a, max_size)
    nontrivial = [c for c in con if not c.is_bottom()]
    if not nontrivial:
        return False, None
    m = nontrivial[0]
    for c in nontrivial[1:]:
        m = meet(m, c)
    if m.is_bottom():
        return False, None
    return True, m


def is_subdirectly_irreducible(a: FiniteAlgebra, max_size: int | None = MAX_SIZE) -> bool:
    return subdirectly_irreducible(a, max_size)[0]


def is_simple(a: FiniteAlgebra, max_size: int | None = MAX_SIZE) -> bool:
    return a.n > 1 and len(all_congruences(a, max_size)) == 2


def is_directly_indecomposable(a: FiniteAlgebra, max_size: int | None = MAX_SIZE) -> bool:
    return a.n > 1 and all(fp.is_trivial() for fp in factor_pairs(a, max_size))


def kernel(f: Sequence[int]) -> Congruence:
    return Congruence.from_labels(f)


def _cache(a: FiniteAlgebra, key, fn):
    store = a.__dict__.setdefault("_finalg_cache", {})
    if key not in store:
        store[key] = fn()
    return store[key]

