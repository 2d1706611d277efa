"""Clone closure and term search over operation tables.

The m-ary part of the clone generated by a set of operations is the
subuniverse of A^(A^m) generated by the m-ary projections.  Term search
for identities works the same way on a smaller index set: only the rows
where the identities constrain the term are kept.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import MAX_TABLES, FiniteAlgebra, Operation, all_args, check_cap

_BATCH = 1 << 18


class _Store:
    """Deduplicated vectors over {0..n-1} kept in insertion order."""

    def __init__(self, n: int, length: int):
        self.n = n
        self.length = length
        self.rows: list[np.ndarray] = []
        self.index: dict = {}
        self._int = length * np.log2(max(n, 2)) < 62
        if self._int:
            self._w = n ** np.arange(length - 1, -1, -1, dtype=np.int64)

    def _keys(self, vecs: np.ndarray) -> np.ndarray:
        if self._int:
            return vecs @ self._w
        return np.ascontiguousarray(vecs, dtype=np.uint8).view(np.dtype((np.void, self.length))).ravel()

    def codes(self, vecs: np.ndarray) -> list:
        return self._keys(vecs).tolist()

    def add(self, vecs: np.ndarray) -> list[int]:
        """Insert rows; return the batch positions of genuinely new ones, in first-occurrence order."""
        keys = self._keys(vecs)
        uniq, first = np.unique(keys, return_index=True)
        new = []
        for code, i in sorted(zip(uniq.tolist(), first.tolist()), key=lambda p: p[1]):
            if code not in self.index:
                self.index[code] = len(self.rows)
                self.rows.append(vecs[i])
                new.append(i)
        return new

    def find(self, vec: np.ndarray) -> int | None:
        return self.index.get(self.codes(vec[None, :])[0])

    def array(self, positions: Sequence[int] | None = None) -> np.ndarray:
        if positions is None:
            positions = range(len(self.rows))
        if not len(positions):
            return np.zeros((0, self.length), dtype=np.int64)
        return np.stack([self.rows[i] for i in positions])

    def __len__(self):
        return len(self.rows)


def _seminaive(old: int, total: int, k: int) -> Iterator[np.ndarray]:
    """Batches of k-tuples of positions in [0, total) using at least one position >= old."""
    if k == 0:
        if old == 0:
            yield np.zeros((1, 0), dtype=np.int64)
        return
    new = total - old
    if new <= 0:
        return
    for p in range(k):
        # positions before p old, position p new, positions after p anything
        ranges = [np.arange(old)] * p + [np.arange(old, total)] + [np.arange(total)] * (k - 1 - p)
        if any(len(r) == 0 for r in ranges):
            continue
        head, rest = ranges[0], ranges[1:]
        rest_grid = (
            np.stack(np.meshgrid(*rest, indexing="ij"), -1).reshape(-1, k - 1)
            if rest
            else np.zeros((1, 0), dtype=np.int64)
        )
        step = max(1, _BATCH // max(1, len(rest_grid)))
        for s in range(0, len(head), step):
            h = head[s : s + step]
            block = np.concatenate(
                [np.repeat(h, len(rest_grid))[:, None], np.tile(rest_grid, (len(h), 1))], axis=1
            )
            yield block


def _apply(op: Operation, vecs: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    """Coordinatewise op applied to the vectors chosen by each row of ``tuples``."""
    if op.arity == 0:
        return np.full((1, vecs.shape[1]), op.table[0], dtype=np.int64)
    idx = np.zeros((len(tuples), vecs.shape[1]), dtype=np.int64)
    for j in range(op.arity):
        idx = idx * op.n + vecs[tuples[:, j]]
    return op.table[idx]


@dataclass
class CloneClosure:
    n: int
    max_arity: int
    tables: dict[int, np.ndarray]
    fixpoint: bool
    rounds: int

    def operations(self) -> set[Operation]:
        return {
            Operation(f"t{m}_{i}", m, self.n, t) for m, arr in self.tables.items() for i, t in enumerate(arr)
        }

    def count(self, arity: int) -> int:
        return len(self.tables[arity])

    def contains(self, op: Operation) -> bool:
        arr = self.tables.get(op.arity)
        return arr is not None and bool((arr == op.table[None, :]).all(axis=1).any())


def _distinct(gens: Iterable[Operation]) -> list[Operation]:
    seen, out = set(), []
    for g in gens:
        key = (g.arity, g.table.tobytes())
        if key not in seen:
            seen.add(key)
            out.append(g)
    return out


def clone_closure(
    gens: Iterable[Operation],
    max_arity: int,
    max_rounds: int = 64,
    max_tables: int | None = MAX_TABLES,
    n: int | None = None,
) -> CloneClosure:
    """Tables of arity <= max_arity in the clone generated by ``gens`` (those of arity <= max_arity)."""
    gens = [g for g in _distinct(gens) if g.arity <= max_arity]
    if n is None:
        if not gens:
            raise ValueError("universe size needed when there are no generators")
        n = gens[0].n
    tables = {}
    fixpoint = True
    rounds_used = 0
    for m in range(max_arity + 1):
        length = n**m
        store = _Store(n, length)
        start = [all_args(n, m)[:, i] for i in range(m)] + [g.table for g in gens if g.arity == m]
        if start:
            store.add(np.stack(start))
        old = 0
        done = False
        for r in range(max_rounds):
            total = len(store)
            vecs = store.array()
            added = 0
            for g in gens:
                for tup in _seminaive(old if g.arity else (0 if r == 0 else 1), total, g.arity):
                    added += len(store.add(_apply(g, vecs, tup)))
                    check_cap("max_tables", max_tables, len(store))
            old = total
            rounds_used = max(rounds_used, r + 1)
            if added == 0:
                done = True
                break
        fixpoint = fixpoint and done
        tables[m] = store.array()
    return CloneClosure(n, max_arity, tables, fixpoint, rounds_used)


def is_primal_upto(a: FiniteAlgebra, arity: int, max_tables: int | None = MAX_TABLES) -> bool:
    """Does the clone of ``a`` contain every table of arity <= ``arity``?"""
    cc = clone_closure(a.operations, arity, max_tables=max_tables, n=a.n)
    return all(cc.count(m) == a.n ** (a.n**m) for m in range(arity + 1))


@dataclass
class UTermSearch:
    """Outcome of a search for U with U(x, y, 0⃗) = x and U(x, y, 1⃗) = y."""

    found: Operation | None
    fixpoint: bool
    rounds: int
    vectors: int
    term: object = field(default=None, repr=False)


def search_u_term(
    a: FiniteAlgebra,
    max_arity: int = 6,
    max_rounds: int = 4,
    zero: Sequence[int] | None = None,
    one: Sequence[int] | None = None,
    operations: Sequence[str] | None = None,
    max_vectors: int | None = MAX_TABLES,
) -> UTermSearch:
    """Search the clone of ``a`` for a term U(x, y, z⃗) meeting both identities.

    Vectors are indexed by the identity rows (x, y, 0⃗) and (x, y, 1⃗); a
    term satisfies the identities iff its restriction to those rows is the
    target vector.  Each stored vector remembers how it was built so the
    full table of the first hit can be rebuilt.
    """
    zero = tuple(a.zero if zero is None else zero)
    one = tuple(a.one if one is None else one)
    if len(zero) != len(one) or not zero:
        raise ValueError("need a non-empty frame 0⃗, 1⃗ of equal length")
    N = len(zero)
    check_cap("max_arity", max_arity, N + 2)
    n = a.n
    ops = [op for op in a.operations if operations is None or op.name in operations]

    rows, target = [], []
    for frame, pick in ((zero, 0), (one, 1)):
        for x, y in itertools.product(range(n), repeat=2):
            rows.append((x, y) + frame)
            target.append((x, y)[pick])
    # identical rows with different demands: no term can exist
    demand: dict = {}
    for r, t in zip(rows, target):
        if demand.setdefault(r, t) != t:
            return UTermSearch(None, True, 0, 0)
    rows = list(demand)
    target_vec = np.array([demand[r] for r in rows], dtype=np.int64)
    R = np.array(rows, dtype=np.int64)

    store = _Store(n, len(rows))
    terms: list = []

    # generators: projections onto each coordinate of the rows
    for j in range(N + 2):
        if store.add(R[:, j][None, :]):
            terms.append(("var", j))
    hit = store.find(target_vec)
    old = 0
    fixpoint = False
    rounds = 0
    for r in range(max_rounds if hit is None else 0):
        rounds = r + 1
        total = len(store)
        vecs = store.array()
        added = 0
        for op in ops:
            for tup in _seminaive(old if op.arity else (0 if r == 0 else total), total, op.arity):
                out = _apply(op, vecs, tup)
                for i in store.add(out):
                    terms.append((op.name, tuple(tup[i].tolist())))
                    added += 1
                check_cap("max_vectors", max_vectors, len(store))
                hit = store.find(target_vec)
                if hit is not None:
                    break
            if hit is not None:
                break
        old = total
        if hit is not None:
            break
        if added == 0:
            fixpoint = True
            break
    if hit is None:
        return UTermSearch(None, fixpoint, rounds, len(store))
    table = _evaluate_term(a, terms, hit, N + 2)
    u = Operation("U", N + 2, n, table)
    return UTermSearch(u, fixpoint, rounds, len(store), term=_render(terms, hit))


def find_u_term(
    a: FiniteAlgebra,
    max_arity: int = 6,
    max_rounds: int = 4,
    zero: Sequence[int] | None = None,
    one: Sequence[int] | None = None,
    operations: Sequence[str] | None = None,
    max_vectors: int | None = MAX_TABLES,
) -> Operation | None:
    return search_u_term(a, max_arity, max_rounds, zero, one, operations, max_vectors).found


def _evaluate_term(a: FiniteAlgebra, terms: list, pos: int, arity: int) -> np.ndarray:
    args = all_args(a.n, arity)
    memo: dict[int, np.ndarray] = {}

    def ev(i: int) -> np.ndarray:
        if i in memo:
            return memo[i]
        t = terms[i]
        if t[0] == "var":
            val = args[:, t[1]]
        else:
            op = a.op(t[0])
            if op.arity == 0:
                val = np.full(len(args), op.table[0], dtype=np.int64)
            else:
                idx = np.zeros(len(args), dtype=np.int64)
                for c in t[1]:
                    idx = idx * a.n + ev(c)
                val = op.table[idx]
        memo[i] = val
        return val

    return ev(pos)


def _render(terms: list, pos: int) -> str:
    names = ["x", "y"] + [f"z{k}" for k in range(1, 64)]

    def rec(i):
        t = terms[i]
        if t[0] == "var":
            return names[t[1]]
        if not t[1]:
            return t[0]
        return f"{t[0]}(" + ",".join(rec(c) for c in t[1]) + ")"

    return rec(pos)
