import pytest

from finalg.congruence import Congruence, all_congruences, factor_pairs, meet
from finalg.core import find_isomorphism, power, product, restrict
from finalg.corpus import chain, p_sigma_e, p_sigma_e_mod_sigma, ring_mod, trivial
from finalg.pierce import (
    check_patchwork_discrete,
    decode,
    encode,
    pierce_stalks,
    reassembles,
    search_di_not_si,
)
from finalg.relations import sigma_E

from oracles import brute_congruences, brute_factor_pairs


def _multiset_iso(xs, ys):
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        return False
    for x in xs:
        match = next((y for y in ys if y.n == x.n and find_isomorphism(x, y) is not None), None)
        if match is None:
            return False
        ys.remove(match)
    return True


def test_di_algebra_is_its_own_stalk():
    rep = pierce_stalks(p_sigma_e())
    assert len(rep.stalks) == 1
    assert rep.stalks[0].algebra.n == 3
    assert find_isomorphism(rep.stalks[0].algebra, p_sigma_e()) is not None


def test_stalks_of_mixed_product():
    a, q = p_sigma_e(), p_sigma_e_mod_sigma()
    rep = pierce_stalks(product(a, q))
    assert sorted(rep.sizes()) == [2, 3]
    by_size = {s.algebra.n: s for s in rep.stalks}
    big, small = by_size[3], by_size[2]
    assert (big.directly_indecomposable, big.subdirectly_irreducible, big.simple) == (True, True, False)
    assert (small.directly_indecomposable, small.subdirectly_irreducible, small.simple) == (True, True, True)
    assert find_isomorphism(big.algebra, a) is not None
    assert find_isomorphism(small.algebra, q) is not None
    assert reassembles(rep) is not None
    assert set(rep.atom_map) == {s.atom for s in rep.stalks}


def test_stalks_of_cube_of_two_element_algebra():
    q = p_sigma_e_mod_sigma()
    rep = pierce_stalks(power(q, 3))
    assert rep.sizes() == [2, 2, 2]
    assert all(find_isomorphism(s.algebra, q) is not None for s in rep.stalks)


def test_trivial_algebra_has_no_stalks():
    rep = pierce_stalks(trivial())
    assert rep.stalks == () and reassembles(rep) == ()


@pytest.mark.parametrize(
    "a",
    [ring_mod(6), chain(3), product(chain(2), chain(3)), product(ring_mod(2), product(ring_mod(2), ring_mod(3))), p_sigma_e()],
)
def test_stalk_invariants(a):
    rep = pierce_stalks(a)
    prod = 1
    for n in rep.sizes():
        prod *= n
    assert prod == a.n
    assert all(s.algebra.n >= 2 for s in rep.stalks)
    for s in rep.stalks:
        assert all(p.is_trivial() for p in factor_pairs(s.algebra))
        assert s.directly_indecomposable
    assert reassembles(rep) is not None


@pytest.mark.parametrize(
    "a,b", [(p_sigma_e(), p_sigma_e_mod_sigma()), (ring_mod(2), ring_mod(3)), (chain(2), chain(3))]
)
def test_stalks_do_not_depend_on_factor_order(a, b):
    left = [s.algebra for s in pierce_stalks(product(a, b)).stalks]
    right = [s.algebra for s in pierce_stalks(product(b, a)).stalks]
    assert _multiset_iso(left, right)


# patchwork


def test_full_product_patchwork():
    fam = [p_sigma_e(), p_sigma_e_mod_sigma()]
    everything = [(x, y) for x in range(3) for y in range(2)]
    assert check_patchwork_discrete(fam, everything)


def test_graph_subalgebra_fails_patchwork():
    fam = [p_sigma_e(), p_sigma_e()]
    res = check_patchwork_discrete(fam, sigma_E().tuples)
    assert not res
    x, y, U, z = res.witness
    assert z not in sigma_E()
    assert z == tuple(x[i] if i in U else y[i] for i in range(2))
    # the spelled-out instance
    assert (0, 2) not in sigma_E() and (0, 0) in sigma_E() and (2, 2) in sigma_E()


def test_single_factor_patchwork():
    assert check_patchwork_discrete([chain(3)], [(0,), (1,), (2,)])


def test_patchwork_requires_subdirect():
    with pytest.raises(ValueError, match="not subdirect"):
        check_patchwork_discrete([chain(2), chain(2)], [(0, 0), (1, 1), (0, 1)][:1])
    with pytest.raises(ValueError, match="not a subuniverse"):
        check_patchwork_discrete([ring_mod(2), ring_mod(2)], [(0, 1), (1, 0)])


def test_mixed_radix_helpers():
    sizes = [3, 2, 4]
    for z in range(24):
        assert encode(decode(z, sizes), sizes) == z
    assert decode(5, [3, 2]) == (2, 1)


# DI-not-SI search


def test_simple_primal_base_has_no_witnesses_at_cap_4():
    assert search_di_not_si(p_sigma_e_mod_sigma(), 4) == []


def test_empty_at_cap_1():
    assert search_di_not_si(p_sigma_e(), 1) == []


def test_graph_subalgebra_reported_iff_di():
    a = p_sigma_e()
    sq = power(a, 2)
    graph = sorted(x * 3 + y for x, y in sigma_E().tuples)
    b, _ = restrict(sq, graph)
    cons = brute_congruences(b)
    fps = brute_factor_pairs(b.n, cons)
    di = all(len(set(t)) == b.n or len(set(d)) == b.n for t, d in fps)
    # not SI: the two projection kernels are nontrivial and meet at Δ
    k1 = Congruence.from_labels([z // 3 for z in graph])
    k2 = Congruence.from_labels([z % 3 for z in graph])
    assert k1 in all_congruences(b) and k2 in all_congruences(b)
    assert not k1.is_bottom() and not k2.is_bottom() and meet(k1, k2).is_bottom()
    found = search_di_not_si(a, 9)
    reported = any(tuple(w.universe) == tuple(graph) and w.algebra.n == 5 for w in found)
    assert reported == di
    for w in found:
        cons_w = brute_congruences(w.algebra)
        nontrivial = [c for c in cons_w if len(set(c)) < w.algebra.n]
        mono = [all(x == y or not all(c[x] == c[y] for c in nontrivial) for x in range(w.algebra.n) for y in range(w.algebra.n))]
        assert mono == [True]  # the nontrivial congruences meet at Δ: not SI
        assert all(len(set(t)) == w.algebra.n or len(set(d)) == w.algebra.n for t, d in brute_factor_pairs(w.algebra.n, cons_w))
