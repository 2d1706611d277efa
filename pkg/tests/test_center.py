import itertools

import pytest

from finalg.center import NoConstantFrame, center, decompose, image_map, is_boolean_homomorphism, is_central
from finalg.congruence import all_congruences, factor_pairs, is_directly_indecomposable
from finalg.core import all_subuniverses, find_isomorphism, product, quotient, restrict
from finalg.corpus import (
    center_corpus,
    chain,
    cyclic_unary,
    p_sigma_e,
    p_sigma_e_mod_sigma,
    ring_mod,
    trivial,
)
from finalg.pierce import check_patchwork_discrete, decode, encode, pierce_stalks, product_of

from oracles import lambda_centrals


def test_zero_is_central_with_bottom_theta0():
    for a in (p_sigma_e(), ring_mod(6), chain(3)):
        c = is_central(a, a.zero)
        assert c is not None and c.theta0.is_bottom()
    c = is_central(p_sigma_e(), p_sigma_e().zero)
    assert c.theta1.is_top()


def test_mixed_pair_is_central_in_product():
    a, b = p_sigma_e(), p_sigma_e_mod_sigma()
    ab = product(a, b)
    e = a.zero[0] * b.n + b.one[0]
    assert is_central(ab, (e,)) is not None


def test_middle_element_of_p_sigma_e_is_not_central():
    assert is_central(p_sigma_e(), (1,)) is None


def test_frame_required():
    with pytest.raises(NoConstantFrame):
        center(cyclic_unary(3))
    with pytest.raises(ValueError):
        is_central(ring_mod(3), (0, 1))


def test_center_examples():
    assert len(center(p_sigma_e())) == 2
    assert len(center(product(p_sigma_e(), p_sigma_e()))) == 4
    z = center(trivial())
    assert len(z) == 1 and z.degenerate


def test_idempotents_of_z6():
    assert [c.e for c in center(ring_mod(6)).elements] == [(0,), (1,), (3,), (4,)]


@pytest.mark.parametrize("name", sorted(center_corpus()))
def test_center_matches_lambda_display(name):
    a = center_corpus()[name]
    assert {c.e for c in center(a).elements} == lambda_centrals(a)


@pytest.mark.parametrize("name", sorted(center_corpus()))
def test_lambda_is_a_bijection(name):
    a = center_corpus()[name]
    z = center(a)
    theta0s = [c.theta0 for c in z.elements]
    assert len(set(theta0s)) == len(theta0s)
    assert set(theta0s) == {p.theta for p in factor_pairs(a)}
    for c in z.elements:
        assert z.elements[z.complement[z.index(c.e)]].theta0 == c.theta1


def test_decompose_zero():
    a = p_sigma_e()
    d = decompose(a, is_central(a, a.zero))
    assert d.first.n == 3 and d.second.n == 1


def test_decompose_mixed_pair():
    a, b = p_sigma_e(), p_sigma_e_mod_sigma()
    ab = product(a, b)
    d = decompose(ab, is_central(ab, (a.zero[0] * b.n + b.one[0],)))
    assert find_isomorphism(d.first, a) is not None
    assert find_isomorphism(d.second, b) is not None


@pytest.mark.parametrize("a", [product(p_sigma_e(), p_sigma_e_mod_sigma()), ring_mod(6), product(chain(2), product(chain(2), chain(2)))])
def test_decomposing_at_atoms_gives_the_stalks(a):
    z = center(a)
    stalks = pierce_stalks(a).stalks
    factors = [decompose(a, c).second for c in z.atoms()]
    assert sorted(f.n for f in factors) == sorted(s.algebra.n for s in stalks)
    for f in factors:
        assert any(s.algebra.n == f.n and find_isomorphism(f, s.algebra) is not None for s in stalks)


def _center_pairs():
    algs = [center_corpus()[k] for k in ("chain2", "chain3", "M3", "N5")]
    rings = [ring_mod(n) for n in (2, 3, 4, 6)]
    pre = [p_sigma_e(), p_sigma_e_mod_sigma()]
    out = []
    for group in (algs, rings, pre):
        out.extend((a, b) for a, b in itertools.product(group, repeat=2) if a.n * b.n <= 16)
    return out


@pytest.mark.parametrize("a,b", _center_pairs())
def test_center_of_product_is_product_of_centers(a, b):
    za, zb, zab = center(a), center(b), center(product(a, b))
    expected = {tuple(x * b.n + y for x, y in zip(ea.e, eb.e)) for ea in za.elements for eb in zb.elements}
    assert {c.e for c in zab.elements} == expected
    # Boolean operations are componentwise
    for ca, cb, da, db in itertools.product(za.elements, zb.elements, za.elements, zb.elements):
        enc = lambda u, v: tuple(x * b.n + y for x, y in zip(u.e, v.e))
        i, j = zab.index(enc(ca, cb)), zab.index(enc(da, db))
        m = zab.elements[zab.meet[i, j]].e
        assert m == enc(za.elements[za.meet[za.index(ca.e), za.index(da.e)]], zb.elements[zb.meet[zb.index(cb.e), zb.index(db.e)]])


@pytest.mark.parametrize("name", sorted(center_corpus()))
def test_quotient_maps_send_centrals_to_centrals(name):
    a = center_corpus()[name]
    za = center(a)
    for theta in all_congruences(a):
        q, surj = quotient(a, theta)
        zq = center(q)
        m = image_map(za, zq, surj)
        assert m is not None
        assert is_boolean_homomorphism(za, zq, m)


def _hereditarily_di(a):
    return all(is_directly_indecomposable(restrict(a, s)[0]) for s in all_subuniverses(a))


@pytest.mark.parametrize(
    "factors",
    [(chain(2), chain(3)), (chain(3), chain(3)), (ring_mod(2), ring_mod(3)), (p_sigma_e(), p_sigma_e_mod_sigma())],
)
def test_centrals_of_subalgebras_are_central_in_the_product(factors):
    assert all(_hereditarily_di(f) for f in factors)
    b = product_of(factors)
    zb = center(b)
    for s in all_subuniverses(b):
        sub, inc = restrict(b, s)
        for c in center(sub).elements:
            assert tuple(int(inc[x]) for x in c.e) in zb


@pytest.mark.parametrize(
    "family", [(chain(2), chain(2), chain(2)), (ring_mod(2), ring_mod(3)), (p_sigma_e(), p_sigma_e_mod_sigma())]
)
def test_patchwork_subdirect_products_have_coordinatewise_centrals(family):
    sizes = [f.n for f in family]
    prod = product_of(family)
    zeros = [f.zero[0] for f in family]
    ones = [f.one[0] for f in family]
    checked = 0
    for s in all_subuniverses(prod):
        coords = [decode(z, sizes) for z in s]
        if any({c[i] for c in coords} != set(range(sizes[i])) for i in range(len(family))):
            continue
        res = check_patchwork_discrete(family, coords)
        if not res:
            x, y, U, z = res.witness
            assert z not in coords
            continue
        checked += 1
        sub, inc = restrict(prod, s)
        pos = {int(v): i for i, v in enumerate(inc)}
        for pick in itertools.product((0, 1), repeat=len(family)):
            e = encode([ones[i] if p else zeros[i] for i, p in enumerate(pick)], sizes)
            assert is_central(sub, (pos[e],)) is not None
    assert checked >= 1
