"""Pierce stalks of a product, and the finite DI-not-SI search."""
from finalg.corpus import p_sigma_e, p_sigma_e_mod_sigma
from finalg.core import product
from finalg.pierce import pierce_stalks, reassembles, search_di_not_si


def main():
    a, q = p_sigma_e(), p_sigma_e_mod_sigma()
    rep = pierce_stalks(product(a, q))
    for s in rep.stalks:
        print(
            f"stalk of size {s.algebra.n}: DI={s.directly_indecomposable} "
            f"SI={s.subdirectly_irreducible} simple={s.simple}"
        )
    print("reassembles to the input:", reassembles(rep) is not None)

    for w in search_di_not_si(a, 9):
        print(f"{w.origin}: universe {list(w.universe)}, {len(w.congruences)} congruences, |Z| = {len(w.center)}")


if __name__ == "__main__":
    main()
