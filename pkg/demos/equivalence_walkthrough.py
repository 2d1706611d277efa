"""Walk through the preprimal algebra of the equivalence {0,1}{2}.

Builds the truncated algebra, prints its congruences, shows that the
quotient by the equivalence is primal in low arity, and checks the 4-ary
term f against both Pierce identities.
"""
import itertools

from finalg import build_f, build_preprimal, is_primal_upto, quotient
from finalg.congruence import Congruence, all_congruences, subdirectly_irreducible
from finalg.relations import sigma_E


def main():
    rho = sigma_E()
    tp = build_preprimal(rho, cap=2)
    a = tp.algebra
    print(f"|A| = {a.n}, {len(a.operations)} operations (cap {tp.cap}, extras {tp.extras})")

    con = all_congruences(a)
    print("Con:", ", ".join(str(c) for c in con))
    si, mono = subdirectly_irreducible(a)
    print(f"subdirectly irreducible: {si}, monolith {mono}")

    theta = Congruence.from_blocks(3, [(0, 1), (2,)])
    q, _ = quotient(a, theta)
    print(f"quotient has {q.n} elements; primal up to arity 2: {is_primal_upto(q, 2)}")

    f = build_f(rho, tp.zero_elt, tp.one_elt)
    z, o = tp.zero_elt, tp.one_elt
    ok = all(f(x, y, z, o) == x and f(x, y, o, z) == y for x, y in itertools.product(range(3), repeat=2))
    print(f"f(x,y,{z},{o}) = x and f(x,y,{o},{z}) = y for all x, y: {ok}")


if __name__ == "__main__":
    main()
