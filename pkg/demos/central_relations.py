"""Binary versus ternary central relations.

For the binary relation a (0, 1, +, x) system exists and U = (x*w)+(y*z)
is a Pierce term.  For the ternary one no operation preserving it can
satisfy both identities; the refutation matrix shows why.
"""
from finalg.preprimal import discriminator, find_pierce_terms, refute_u_term
from finalg.core import preserves
from finalg.relations import sigma_C2, sigma_C3


def show_table(op):
    n = op.n
    for x in range(n):
        print("   ", " ".join(str(op(x, y)) for y in range(n)))


def main():
    t = find_pierce_terms(sigma_C2())
    print(f"binary central relation: zero={t.zero} one={t.one}")
    print("  plus:")
    show_table(t.plus)
    print("  times:")
    show_table(t.times)
    print("  U preserves the relation:", bool(preserves(t.u(), sigma_C2())))
    res = preserves(discriminator(3), sigma_C2())
    print(f"  discriminator preserves it: {bool(res)} (rows {res.witness.rows} -> {res.witness.output})")

    w = refute_u_term(sigma_C3(), (0,), (1,))
    print("ternary central relation, frames (0) and (1):")
    for row in w.matrix:
        print("   ", row)
    for col, why in zip(w.columns(), w.column_justifications):
        print(f"  column {col}: {why}")
    print(f"  forced outputs {w.output_tuple} lie outside the relation: {w.verify()}")


if __name__ == "__main__":
    main()
