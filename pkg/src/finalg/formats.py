"""Canonical text formats for algebras and relations.

Algebra::

    algebra n=3 N=1
    op c0 arity=0 table=0
    op m arity=2 table=0,1,2,1,1,2,2,2,2
    zero=c0
    one=c2

Relation::

    relation n=3 h=2
    0,0
    0,1

Writers emit canonical text (fixed field order, sorted tuples), so
``parse(dump(x)) == x`` holds for every value.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .core import FiniteAlgebra, Operation, Relation


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int, source: str = "<string>"):
        super().__init__(f"{source}:{line}:{col}: {msg}")
        self.line = line
        self.col = col
        self.source = source


_KV = re.compile(r"(\w+)=(\S*)")


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.rstrip()
        if s and not s.lstrip().startswith("#"):
            yield i, s


def _fields(line: str, lineno: int, src: str, head: str, keys: tuple[str, ...]) -> dict[str, tuple[str, int]]:
    """Parse ``head k1=v1 k2=v2 ...`` requiring exactly ``keys`` in order; values keep their column."""
    if not line.startswith(head + " ") and line != head:
        raise ParseError(f"expected '{head}'", lineno, 1, src)
    out = {}
    pos = len(head)
    for key in keys:
        spaced = pos < len(line) and line[pos] == " "
        m = _KV.match(line, pos + 1) if spaced else None
        if m is None or m.group(1) != key:
            raise ParseError(f"expected '{key}=...'", lineno, pos + 2 if spaced else pos + 1, src)
        out[key] = (m.group(2), m.start(2) + 1)
        pos = m.end()
    if pos != len(line):
        raise ParseError("unexpected trailing text", lineno, pos + 1, src)
    return out


def _int(tok: str, lineno: int, col: int, src: str, lo: int = 0, hi: int | None = None) -> int:
    if not re.fullmatch(r"\d+", tok):
        raise ParseError(f"expected a non-negative integer, got {tok!r}", lineno, col, src)
    v = int(tok)
    if v < lo or (hi is not None and v >= hi):
        bound = f"[{lo}, {hi})" if hi is not None else f">= {lo}"
        raise ParseError(f"value {v} out of range {bound}", lineno, col, src)
    return v


def _csv(s: str, lineno: int, col: int, src: str, hi: int) -> list[int]:
    vals, c = [], col
    for tok in s.split(","):
        vals.append(_int(tok, lineno, c, src, 0, hi))
        c += len(tok) + 1
    return vals


def parse_relation(text: str, source: str = "<string>") -> Relation:
    lines = list(_lines(text))
    if not lines:
        raise ParseError("empty relation file", 1, 1, source)
    lineno, head = lines[0]
    f = _fields(head, lineno, source, "relation", ("n", "h"))
    n = _int(f["n"][0], lineno, f["n"][1], source, 1)
    h = _int(f["h"][0], lineno, f["h"][1], source, 1)
    tuples = []
    for lineno, s in lines[1:]:
        t = _csv(s.strip(), lineno, len(s) - len(s.lstrip()) + 1, source, n)
        if len(t) != h:
            raise ParseError(f"tuple has {len(t)} entries, expected {h}", lineno, 1, source)
        tuples.append(tuple(t))
    return Relation(h, n, frozenset(tuples))


def dump_relation(rho: Relation) -> str:
    body = "".join(",".join(map(str, t)) + "\n" for t in rho.tuples)
    return f"relation n={rho.n} h={rho.arity}\n" + body


def parse_algebra(text: str, source: str = "<string>") -> FiniteAlgebra:
    lines = list(_lines(text))
    if not lines:
        raise ParseError("empty algebra file", 1, 1, source)
    lineno, head = lines[0]
    f = _fields(head, lineno, source, "algebra", ("n", "N"))
    n = _int(f["n"][0], lineno, f["n"][1], source, 1)
    N = _int(f["N"][0], lineno, f["N"][1], source, 0)
    ops: list[Operation] = []
    frame: dict[str, tuple[str, ...]] = {}
    for lineno, s in lines[1:]:
        if s.startswith("op "):
            if frame:
                raise ParseError("operation after zero=/one= lines", lineno, 1, source)
            parts = s.split(" ")
            if len(parts) != 4 or not re.fullmatch(r"[A-Za-z_][\w]*", parts[1]):
                raise ParseError("expected 'op <name> arity=<k> table=<csv>'", lineno, 1, source)
            name = parts[1]
            col_a = len("op ") + len(name) + 2
            if not parts[2].startswith("arity="):
                raise ParseError("expected 'arity=<k>'", lineno, col_a, source)
            k = _int(parts[2][6:], lineno, col_a + 6, source, 0)
            col_t = col_a + len(parts[2]) + 1
            if not parts[3].startswith("table="):
                raise ParseError("expected 'table=<csv>'", lineno, col_t, source)
            table = _csv(parts[3][6:], lineno, col_t + 6, source, n)
            if len(table) != n**k:
                raise ParseError(f"table has {len(table)} entries, expected {n}^{k} = {n**k}", lineno, col_t + 6, source)
            if any(op.name == name for op in ops):
                raise ParseError(f"duplicate operation name {name!r}", lineno, 4, source)
            ops.append(Operation(name, k, n, np.array(table, dtype=np.int64)))
        elif s.startswith("zero=") or s.startswith("one="):
            key, _, val = s.partition("=")
            if key in frame:
                raise ParseError(f"duplicate '{key}=' line", lineno, 1, source)
            names = tuple(val.split(",")) if val else ()
            col = len(key) + 2
            for nm in names:
                op = next((o for o in ops if o.name == nm), None)
                if op is None or op.arity != 0:
                    raise ParseError(f"{nm!r} is not a nullary operation", lineno, col, source)
                col += len(nm) + 1
            if len(names) != N:
                raise ParseError(f"{key} lists {len(names)} constants, expected N={N}", lineno, len(key) + 2, source)
            frame[key] = names
        else:
            raise ParseError("expected 'op', 'zero=' or 'one='", lineno, 1, source)
    for key in ("zero", "one"):
        if key not in frame:
            if N:
                raise ParseError(f"missing '{key}=' line", lines[-1][0] + 1, 1, source)
            frame[key] = ()
    return FiniteAlgebra(n, tuple(ops), frame["zero"], frame["one"])


def dump_algebra(a: FiniteAlgebra) -> str:
    out = [f"algebra n={a.n} N={a.N}"]
    for op in a.operations:
        out.append(f"op {op.name} arity={op.arity} table=" + ",".join(map(str, op.table.tolist())))
    out.append("zero=" + ",".join(a.constants_zero))
    out.append("one=" + ",".join(a.constants_one))
    return "\n".join(out) + "\n"


def read_relation(path) -> Relation:
    p = Path(path)
    return parse_relation(p.read_text(), str(p))


def read_algebra(path) -> FiniteAlgebra:
    p = Path(path)
    return parse_algebra(p.read_text(), str(p))
