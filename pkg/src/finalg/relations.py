"""Rosenberg-type classification of relations on a finite set.

Only the types with a usable definition are recognised: proper subsets,
prime permutations, bounded partial orders, central relations and
nontrivial proper equivalences.  Everything else is ``unclassified``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import Relation

KINDS = (
    "proper_subset",
    "prime_permutation",
    "bounded_partial_order",
    "central",
    "nontrivial_proper_equivalence",
    "unclassified",
)


@dataclass(frozen=True)
class RelationClassification:
    kind: str
    evidence: dict = field(default_factory=dict, compare=False)

    def __str__(self):
        return f"{self.kind} {format_evidence(self)}".rstrip()


def _fmt_set(xs) -> str:
    return "{" + ",".join(map(str, sorted(xs))) + "}"


def format_evidence(c: RelationClassification) -> str:
    ev = c.evidence
    if c.kind == "proper_subset":
        return f"subset={_fmt_set(ev['subset'])}"
    if c.kind == "prime_permutation":
        cycles = "".join("(" + " ".join(map(str, cyc)) + ")" for cyc in ev["cycles"])
        return f"p={ev['p']} cycles={cycles}"
    if c.kind == "bounded_partial_order":
        return f"bottom={ev['bottom']} top={ev['top']}"
    if c.kind == "central":
        return f"h={ev['h']} center={_fmt_set(ev['center'])}"
    if c.kind == "nontrivial_proper_equivalence":
        return "blocks=" + "".join(_fmt_set(b) for b in ev["blocks"])
    return ""


def is_totally_symmetric(rho: Relation) -> bool:
    """Closed under every coordinate permutation (checked on a transposition and a full cycle)."""
    h = rho.arity
    if h == 1:
        return True
    swap = list(range(h))
    swap[0], swap[1] = 1, 0
    cycle = list(range(1, h)) + [0]
    return all(tuple(t[i] for i in perm) in rho for t in rho for perm in (swap, cycle))


def is_totally_reflexive(rho: Relation) -> bool:
    """Contains every h-tuple with a repeated entry."""
    return all(
        t in rho for t in itertools.product(range(rho.n), repeat=rho.arity) if len(set(t)) < rho.arity
    )


def center_of(rho: Relation, position: int = 0) -> frozenset[int]:
    """Elements a such that every tuple with a in the given coordinate belongs to rho."""
    h, n = rho.arity, rho.n
    out = set()
    for a in range(n):
        ok = True
        for rest in itertools.product(range(n), repeat=h - 1):
            t = rest[:position] + (a,) + rest[position:]
            if t not in rho:
                ok = False
                break
        if ok:
            out.add(a)
    return frozenset(out)


def is_central_relation(rho: Relation) -> tuple[bool, frozenset[int]]:
    c = center_of(rho)
    ok = is_totally_symmetric(rho) and is_totally_reflexive(rho) and bool(c) and not rho.is_full()
    return ok, c


def is_equivalence(rho: Relation) -> bool:
    if rho.arity != 2:
        return False
    n = rho.n
    if any((x, x) not in rho for x in range(n)):
        return False
    if any((y, x) not in rho for x, y in rho):
        return False
    succ = {x: {y for (u, y) in rho if u == x} for x in range(n)}
    return all((x, z) in rho for x, y in rho for z in succ[y])


def equivalence_blocks(rho: Relation) -> list[tuple[int, ...]]:
    seen, blocks = set(), []
    for x in range(rho.n):
        if x in seen:
            continue
        blk = tuple(y for y in range(rho.n) if (x, y) in rho)
        seen.update(blk)
        blocks.append(blk)
    return blocks


def _permutation_cycles(rho: Relation) -> list[tuple[int, ...]] | None:
    """Cycles of rho if it is the graph of a permutation, else None."""
    if rho.arity != 2 or len(rho) != rho.n:
        return None
    img = {}
    for x, y in rho:
        if x in img:
            return None
        img[x] = y
    if sorted(img) != list(range(rho.n)) or sorted(img.values()) != list(range(rho.n)):
        return None
    seen, cycles = set(), []
    for x in range(rho.n):
        if x in seen:
            continue
        cyc = [x]
        seen.add(x)
        y = img[x]
        while y != x:
            cyc.append(y)
            seen.add(y)
            y = img[y]
        cycles.append(tuple(cyc))
    return cycles


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def _partial_order_bounds(rho: Relation) -> tuple[int, int] | None:
    if rho.arity != 2:
        return None
    n = rho.n
    if any((x, x) not in rho for x in range(n)):
        return None
    if any(x != y and (y, x) in rho for x, y in rho):
        return None
    succ = {x: {y for (u, y) in rho if u == x} for x in range(n)}
    if any((x, z) not in rho for x, y in rho for z in succ[y]):
        return None
    bottoms = [x for x in range(n) if all((x, y) in rho for y in range(n))]
    tops = [y for y in range(n) if all((x, y) in rho for x in range(n))]
    if not bottoms or not tops:
        return None
    return bottoms[0], tops[0]


def classify(rho: Relation) -> RelationClassification:
    """First matching kind, tested in the order of ``KINDS``."""
    n, h = rho.n, rho.arity
    if h == 1 and 0 < len(rho) < n:
        return RelationClassification("proper_subset", {"subset": frozenset(t[0] for t in rho)})
    cycles = _permutation_cycles(rho)
    if cycles is not None:
        lengths = {len(c) for c in cycles}
        if len(lengths) == 1 and _is_prime(lengths.pop()):
            return RelationClassification("prime_permutation", {"p": len(cycles[0]), "cycles": cycles})
    bounds = _partial_order_bounds(rho)
    if bounds is not None:
        return RelationClassification("bounded_partial_order", {"bottom": bounds[0], "top": bounds[1]})
    central, c = is_central_relation(rho)
    if central:
        return RelationClassification("central", {"h": h, "center": c})
    if is_equivalence(rho):
        blocks = equivalence_blocks(rho)
        if 1 < len(blocks) < n:
            return RelationClassification("nontrivial_proper_equivalence", {"blocks": blocks})
    return RelationClassification("unclassified", {})


# Canonical relations used throughout the tests and demos.


def sigma_E() -> Relation:
    """Equivalence on {0,1,2} with blocks {0,1}, {2}."""
    return Relation.from_predicate(3, 2, lambda x, y: (x < 2) == (y < 2))


def central_relation(n: int, h: int) -> Relation:
    """h-tuples on {0..n-1} with a repeated entry or containing n-1 (center {n-1})."""
    return Relation.from_predicate(n, h, lambda *t: len(set(t)) < h or (n - 1) in t)


def sigma_C2() -> Relation:
    return central_relation(3, 2)


def sigma_C3() -> Relation:
    return central_relation(4, 3)


def sigma_C4() -> Relation:
    return central_relation(5, 4)
