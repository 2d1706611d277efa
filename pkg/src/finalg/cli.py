"""Command-line front end.

Every subcommand produces a Report: a human-readable body followed by one
machine line per clause::

    CLAUSE<TAB><id><TAB>PASS|FAIL<TAB><evidence>

Exit status is 0 when every clause passes, 1 when any fails (including a
cap violation) and 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from . import formats
from .center import NoConstantFrame, center
from .clones import is_primal_upto, search_u_term
from .congruence import (
    MAX_SIZE,
    Congruence,
    all_congruences,
    check_fhp,
    factor_pairs,
    is_simple,
    subdirectly_irreducible,
)
from .core import MAX_TABLES, CapExceeded, Relation, preserves, quotient
from .pierce import reassembles, pierce_stalks, search_di_not_si
from .preprimal import (
    build_f,
    build_preprimal,
    discriminator,
    find_pierce_terms,
    pol,
    refute_u_term,
)
from .relations import classify, equivalence_blocks, is_central_relation


@dataclass
class Verdict:
    clause: str
    ok: bool
    evidence: str = ""

    @property
    def status(self) -> str:
        return "PASS" if self.ok else "FAIL"


@dataclass
class Report:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)  # path -> sha256
    verdicts: list[Verdict] = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)
    body: list[str] = field(default_factory=list)

    def check(self, clause: str, ok: bool, evidence: str = "") -> bool:
        self.verdicts.append(Verdict(clause, bool(ok), evidence))
        return bool(ok)

    def say(self, *lines: str) -> None:
        self.body.extend(lines)

    @contextmanager
    def phase(self, name: str):
        t = time.perf_counter()
        try:
            yield
        finally:
            self.timing[name] = self.timing.get(name, 0.0) + time.perf_counter() - t

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def machine_lines(self) -> list[str]:
        return [f"CLAUSE\t{v.clause}\t{v.status}\t{v.evidence}" for v in self.verdicts]

    def render(self) -> str:
        out = list(self.body)
        out.append(f"# command: {self.command}")
        for path, digest in self.inputs.items():
            out.append(f"# input: {path} sha256={digest}")
        if self.timing:
            out.append("# timing: " + " ".join(f"{k}={v:.3f}s" for k, v in self.timing.items()))
        out.extend(self.machine_lines())
        return "\n".join(out) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "inputs": self.inputs,
                "verdicts": [{"clause": v.clause, "status": v.status, "evidence": v.evidence} for v in self.verdicts],
                "timing": self.timing,
                "body": self.body,
                "ok": self.ok,
            },
            indent=2,
        )


class UsageError(Exception):
    pass


def _load(report: Report, path: str, kind: str):
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    report.inputs[path] = hashlib.sha256(data).hexdigest()
    with report.phase("parse"):
        if kind == "relation":
            return formats.parse_relation(data.decode(), path)
        return formats.parse_algebra(data.decode(), path)


def _tuple_arg(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _fmt_table(op) -> str:
    return ",".join(map(str, op.table.tolist()))


# -- subcommands ------------------------------------------------------------


def cmd_classify(args, r: Report) -> None:
    rho = _load(r, args.relation, "relation")
    with r.phase("classify"):
        c = classify(rho)
    r.say(str(c))
    r.check("classified", True, c.kind)


def cmd_pol(args, r: Report) -> None:
    rho = _load(r, args.relation, "relation")
    with r.phase("pol"):
        ops = pol(rho, args.arity, max_tables=args.max_tables)
    r.say(f"{len(ops)} operations of arity {args.arity} preserve the relation")
    r.say(*(f"op {op.name} arity={op.arity} table={_fmt_table(op)}" for op in ops))
    with r.phase("verify"):
        bad = next((op for op in ops if not preserves(op, rho)), None)
    r.check("all-preserve", bad is None, f"count={len(ops)}" if bad is None else f"op={bad.name}")


def _print_lattice(r: Report, con) -> None:
    r.say(f"|Con| = {len(con)}")
    for i, c in enumerate(con):
        r.say(f"  [{i}] {c}")
    r.say("hasse: " + " ".join(f"{i}<{j}" for i, j in con.hasse_edges()))


def cmd_con(args, r: Report) -> None:
    a = _load(r, args.algebra, "algebra")
    with r.phase("congruences"):
        con = all_congruences(a, args.max_size)
    _print_lattice(r, con)
    r.check("bounds", con.bottom.is_bottom() and con.top.is_top(), f"size={len(con)}")


def cmd_fhp(args, r: Report) -> None:
    a = _load(r, args.first, "algebra")
    b = _load(r, args.second, "algebra")
    with r.phase("fhp"):
        res = check_fhp(a, b, args.max_size)
    r.say(f"FHP {'holds' if res else 'fails'}; |Con(AxB)| = {res.product_congruences}")
    r.check("fhp", res.holds, f"counterexample={res.counterexample}" if res.counterexample else "")


def cmd_center(args, r: Report) -> None:
    a = _load(r, args.algebra, "algebra")
    with r.phase("center"):
        try:
            z = center(a)
        except NoConstantFrame as e:
            raise UsageError(str(e)) from None
    fmt = lambda e: "(" + ",".join(map(str, e)) + ")"
    r.say(f"|Z(A)| = {len(z)}" + (" (degenerate: 0=1)" if z.degenerate else ""))
    r.say("elements: " + " ".join(f"[{i}]{fmt(c.e)}" for i, c in enumerate(z.elements)))
    r.say("atoms: " + " ".join(fmt(c.e) for c in z.atoms()))
    r.say("complement: " + " ".join(map(str, z.complement)))
    r.say("meet:", *("  " + " ".join(map(str, row)) for row in z.meet.tolist()))
    r.say("join:", *("  " + " ".join(map(str, row)) for row in z.join.tolist()))
    r.check("boolean", True, f"size={len(z)}")


def cmd_stalks(args, r: Report) -> None:
    a = _load(r, args.algebra, "algebra")
    with r.phase("stalks"):
        rep = pierce_stalks(a, args.max_size)
    r.say(f"{len(rep.stalks)} stalks, sizes {rep.sizes()}")
    for i, s in enumerate(rep.stalks):
        r.say(
            f"  stalk {i}: size={s.algebra.n} atom={s.atom} complement={s.complement} "
            f"DI={s.directly_indecomposable} SI={s.subdirectly_irreducible} simple={s.simple} monolith={s.monolith}"
        )
    prod = 1
    for n in rep.sizes():
        prod *= n
    r.check("size-product", prod == a.n, f"{prod} vs |A|={a.n}")
    r.check("stalks-di", all(s.directly_indecomposable for s in rep.stalks))
    if a.n <= 12:
        with r.phase("reassembly"):
            iso = reassembles(rep)
        r.check("reassembly", iso is not None, "isomorphism found" if iso is not None else "no isomorphism")


def cmd_build_preprimal(args, r: Report) -> None:
    rho = _load(r, args.relation, "relation")
    with r.phase("build"):
        tp = build_preprimal(rho, args.cap, max_tables=args.max_tables)
    a = tp.algebra
    text = formats.dump_algebra(a)
    if args.output:
        Path(args.output).write_text(text)
        r.say(f"wrote {args.output}")
    r.say(
        f"kind={tp.kind} n={a.n} operations={len(a.operations)} cap={tp.cap} "
        f"zero={tp.zero_elt} one={tp.one_elt} extras={','.join(tp.extras) or '-'}"
    )
    r.check("all-preserve", all(preserves(op, rho) for op in a.operations), f"operations={len(a.operations)}")
    r.check("round-trip", formats.parse_algebra(text) == a)


def _pierce_identity_failure(u, zero: int, one: int, n: int):
    for x, y in itertools.product(range(n), repeat=2):
        if u(x, y, zero, one) != x:
            return (x, y, zero, one)
        if u(x, y, one, zero) != y:
            return (x, y, one, zero)
    return None


def cmd_find_pierce_terms(args, r: Report) -> None:
    rho = _load(r, args.relation, "relation")
    central, _ = is_central_relation(rho)
    if rho.arity != 2 or not central:
        raise UsageError("find-pierce-terms needs a binary central relation")
    with r.phase("search"):
        pt = find_pierce_terms(rho)
    if not r.check("found", pt is not None, "" if pt else "no (0,1,+,x) solution"):
        return
    r.say(f"zero={pt.zero} one={pt.one}", f"plus table={_fmt_table(pt.plus)}", f"times table={_fmt_table(pt.times)}")
    u = pt.u()
    bad = _pierce_identity_failure(u, pt.zero, pt.one, rho.n)
    r.check("u-identities", bad is None, f"U{bad}" if bad else "")
    res = preserves(u, rho)
    r.check("u-preserves", res.holds, str(res.witness) if res.witness else "")


def cmd_refute_u(args, r: Report) -> None:
    rho = _load(r, args.relation, "relation")
    try:
        with r.phase("refute"):
            w = refute_u_term(rho, args.a, args.b)
    except ValueError as e:
        raise UsageError(str(e)) from None
    r.say("rows:", *("  " + ",".join(map(str, row)) for row in w.matrix))
    for col, why in zip(w.columns(), w.column_justifications):
        r.say(f"column {col}: {why}")
    r.say(f"forced outputs {w.forced_outputs()} not in relation")
    r.check("witness-verified", w.verify(), f"output={w.output_tuple}")


def cmd_search_di_not_si(args, r: Report) -> None:
    a = _load(r, args.algebra, "algebra")
    with r.phase("search"):
        found = search_di_not_si(a, args.cap, max_size=args.max_size)
    r.say(f"{len(found)} DI-not-SI algebras up to size {args.cap}")
    r.check("search", True, f"witnesses={len(found)}")
    for i, w in enumerate(found):
        r.say(f"# witness {i}: {w.origin}; universe={list(w.universe)}; |Con|={len(w.congruences)}"
              + (f"; |Z|={len(w.center)}" if w.center is not None else ""))
        for c in w.congruences:
            r.say(f"#   congruence {c}")
        r.say(formats.dump_algebra(w.algebra).rstrip("\n"))
        with r.phase("reverify"):
            pairs = factor_pairs(w.algebra, args.max_size)
            di = w.algebra.n > 1 and all(fp.is_trivial() for fp in pairs)
            si, _ = subdirectly_irreducible(w.algebra, args.max_size)
        r.check(f"witness-{i}-di", di, f"factor_pairs={len(pairs)}")
        r.check(f"witness-{i}-not-si", not si)


# -- verify-proposition -------------------------------------------------------


def _verify_equivalence(rho: Relation, r: Report, args) -> None:
    c = classify(rho)
    if not r.check("kind", c.kind == "nontrivial_proper_equivalence", str(c)):
        return
    with r.phase("build"):
        tp = build_preprimal(rho, 2, max_tables=args.max_tables)
    a = tp.algebra
    sigma = Congruence.from_blocks(rho.n, equivalence_blocks(rho))
    with r.phase("congruences"):
        con = all_congruences(a, args.max_size)
    expected = {Congruence.bottom(rho.n), sigma, Congruence.top(rho.n)}
    r.check("con-is-delta-sigma-nabla", con.as_set() == expected, " ".join(map(str, con)))
    f = build_f(rho, tp.zero_elt, tp.one_elt)
    r.check("f-preserves", preserves(f, rho).holds)
    bad = _pierce_identity_failure(f, tp.zero_elt, tp.one_elt, rho.n)
    r.check("f-identities", bad is None, f"f{bad}" if bad else f"zero={tp.zero_elt} one={tp.one_elt}")
    with r.phase("primality"):
        q, _ = quotient(a, sigma)
        primal = is_primal_upto(q, 2, max_tables=args.max_tables)
    r.check("quotient-primal-upto-2", primal, f"|A/sigma|={q.n}")
    si, mono = subdirectly_irreducible(a, args.max_size)
    r.check("si-monolith-sigma", si and mono == sigma, f"monolith={mono}")
    r.check("not-simple", not is_simple(a, args.max_size))
    with r.phase("u-search"):
        found = search_u_term(a, zero=(tp.zero_elt, tp.one_elt), one=(tp.one_elt, tp.zero_elt), operations=["f"])
    r.check("u-term-found", found.found is not None and found.found.same_table(f), f"term={found.term}")


def _verify_central_binary(rho: Relation, r: Report, args) -> None:
    central, cen = is_central_relation(rho)
    if not r.check("kind", central and rho.arity == 2, str(classify(rho))):
        return
    with r.phase("pierce-terms"):
        pt = find_pierce_terms(rho)
    if not r.check("pierce-terms-found", pt is not None):
        return
    u = pt.u()
    bad = _pierce_identity_failure(u, pt.zero, pt.one, rho.n)
    r.check("u-identities", bad is None, f"U{bad}" if bad else f"zero={pt.zero} one={pt.one}")
    r.check("u-preserves", preserves(u, rho).holds)
    if rho.n >= 3:
        res = preserves(discriminator(rho.n), rho)
        ev = ""
        if res.witness is not None:
            t = discriminator(rho.n)
            cols = list(zip(*res.witness.rows))
            recomputed = tuple(t(*col) for col in cols)
            ok = all(row in rho for row in res.witness.rows) and recomputed == res.witness.output and recomputed not in rho
            ev = f"rows={res.witness.rows} output={res.witness.output} verified={ok}"
        r.check("discriminator-not-preserved", not res.holds and "verified=True" in ev, ev)
    with r.phase("build"):
        tp = build_preprimal(rho, 2, max_tables=args.max_tables)
    pairs = factor_pairs(tp.algebra, args.max_size)
    r.check("di", all(fp.is_trivial() for fp in pairs), f"factor_pairs={len(pairs)}")
    si, mono = subdirectly_irreducible(tp.algebra, args.max_size)
    r.check("si", si, f"monolith={mono}")


def _verify_central_h3(rho: Relation, r: Report, args) -> None:
    central, _ = is_central_relation(rho)
    if not r.check("kind", central and rho.arity >= 3, str(classify(rho))):
        return
    with r.phase("refute"):
        w = refute_u_term(rho, (0,), (1,))
    r.check("refutation-witness", w.verify(), f"rows={w.matrix} output={w.output_tuple}")
    for cap in (1, 2):
        try:
            with r.phase(f"u-search-cap{cap}"):
                tp = build_preprimal(rho, cap, max_tables=args.max_tables)
                frames = (
                    list(itertools.permutations(range(rho.n), 2))
                    if args.all_frames
                    else [(tp.zero_elt, tp.one_elt)]
                )
                hits = []
                for z, o in frames:
                    res = search_u_term(tp.algebra, zero=(z,), one=(o,), max_rounds=8)
                    if res.found is not None:
                        hits.append((z, o))
            r.check(f"no-u-term-cap{cap}", not hits, f"hits={hits}" if hits else f"frames={len(frames)}")
        except CapExceeded as e:
            r.check(f"no-u-term-cap{cap}", False, f"cap {e.cap}={e.limit} exceeded (size {e.size})")


_PROPOSITIONS = {
    "equivalence": _verify_equivalence,
    "central-binary": _verify_central_binary,
    "central-h3": _verify_central_h3,
}


def cmd_verify(args, r: Report) -> None:
    rho = _load(r, args.relation, "relation")
    _PROPOSITIONS[args.proposition](rho, r, args)


# -- entry points ---------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-size", type=int, default=argparse.SUPPRESS, help=f"congruence-lattice cap (default {MAX_SIZE})")
    common.add_argument("--max-tables", type=int, default=argparse.SUPPRESS, help=f"table-count cap (default {MAX_TABLES})")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="structured report")

    p = argparse.ArgumentParser(prog="finalg", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        s = sub.add_parser(name, help=help, parents=[common])
        s.set_defaults(fn=fn)
        return s

    add("classify", cmd_classify, "classify a relation").add_argument("relation")
    s = add("pol", cmd_pol, "operations preserving a relation")
    s.add_argument("relation")
    s.add_argument("--arity", type=int, required=True)
    add("con", cmd_con, "congruence lattice").add_argument("algebra")
    s = add("fhp", cmd_fhp, "Fraser-Horn check for a product")
    s.add_argument("first")
    s.add_argument("second")
    add("center", cmd_center, "central elements").add_argument("algebra")
    add("stalks", cmd_stalks, "Pierce stalks").add_argument("algebra")
    s = add("build-preprimal", cmd_build_preprimal, "truncated preprimal algebra")
    s.add_argument("relation")
    s.add_argument("--cap", type=int, default=2)
    s.add_argument("-o", "--output")
    add("find-pierce-terms", cmd_find_pierce_terms, "search for 0, 1, +, x").add_argument("relation")
    s = add("refute-u", cmd_refute_u, "witness that no U-term preserves a central relation")
    s.add_argument("relation")
    s.add_argument("--a", type=_tuple_arg, required=True)
    s.add_argument("--b", type=_tuple_arg, required=True)
    s = add("search-di-not-si", cmd_search_di_not_si, "DI-but-not-SI algebras in the square")
    s.add_argument("algebra")
    s.add_argument("--cap", type=int, required=True)
    s = add("verify-proposition", cmd_verify, "run a full verification pipeline")
    s.add_argument("proposition", choices=sorted(_PROPOSITIONS))
    s.add_argument("relation")
    s.add_argument("--all-frames", action="store_true", help="central-h3: try every constant frame (a), (b)")
    return p


def run(argv=None, stdout=None, stderr=None) -> tuple[int, Report | None]:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return (e.code if isinstance(e.code, int) else 2), None
    args.max_size = getattr(args, "max_size", MAX_SIZE)
    args.max_tables = getattr(args, "max_tables", MAX_TABLES)
    as_json = getattr(args, "json", False)
    report = Report(args.command)
    try:
        args.fn(args, report)
    except (formats.ParseError, UsageError) as e:
        print(f"error: {e}", file=stderr)
        return 2, report
    except CapExceeded as e:
        report.check("caps", False, f"cap {e.cap}={e.limit} exceeded (size {e.size})")
    stdout.write(report.to_json() + "\n" if as_json else report.render())
    return (0 if report.ok else 1), report


def main(argv=None) -> None:
    sys.exit(run(argv)[0])


if __name__ == "__main__":
    main()
