import itertools

import pytest
from hypothesis import given, settings, strategies as st

from nablaops.finite_cats import FinCategory, Functor, check_isomorphism, product
from nablaops.interval_cat import NEG_INF, IntervalMorphism, enumerate_morphisms, mu, rho
from nablaops.segal_demo import (
    FinMonoid,
    all_monoids,
    check_discrete_fibration,
    check_equivariance,
    check_nerve,
    commutativity_check,
    cyclic,
    grothendieck,
    interval_nerve,
    left_zero_with_unit,
    nabla_category,
    trivial_monoid,
)


def brute_monoid_count(n):
    """Unit 0 fixed; every table on the non-unit cells, filtered by associativity."""
    cells = [(x, y) for x in range(1, n) for y in range(1, n)]
    count = 0
    for vals in itertools.product(range(n), repeat=len(cells)):
        t = {(x, 0): x for x in range(n)} | {(0, x): x for x in range(n)} | dict(zip(cells, vals))
        r = range(1, n)
        if all(t[t[x, y], z] == t[x, t[y, z]] for x in r for y in r for z in r):
            count += 1
    return count


class TestMonoids:
    def test_validate(self):
        for M in (cyclic(3), left_zero_with_unit(), trivial_monoid()):
            assert M.validate().passed

    def test_invalid(self):
        M = FinMonoid((0, 1), 0, {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 2}, "bad")
        assert not M.validate().get("monoid:closure").passed
        els = (0, 1, 2)
        # 1*1 = 2, 1*2 = 0, 2*1 = 1 is not associative
        t = {(x, 0): x for x in els} | {(0, x): x for x in els}
        t |= {(1, 1): 2, (1, 2): 0, (2, 1): 1, (2, 2): 2}
        assert not FinMonoid(els, 0, t).validate().get("monoid:assoc").passed

    def test_enumeration_matches_brute_force(self):
        got = [0] * 5
        for M in all_monoids(4):
            got[len(M.elements)] += 1
            assert M.validate().passed
        assert got[1:] == [brute_monoid_count(n) for n in range(1, 5)] == [1, 2, 11, 156]


class TestNerve:
    def test_rho1_example(self):
        N = interval_nerve(cyclic(5), 2)
        assert N.push(rho(1, 2), (3, 4)) == (3,)
        assert N.push(rho(2, 2), (3, 4)) == (4,)
        assert N.push(mu(2), (3, 4)) == (2,)

    def test_order_of_products(self):
        N = interval_nerve(left_zero_with_unit(), 2)
        assert N.push(mu(2), ("a", "b")) == ("a",)
        assert N.push(mu(2), ("b", "a")) == ("b",)
        assert N.push(mu(0), ()) == ("e",)
        # entries sent to the ends are dropped
        assert N.push(IntervalMorphism(2, 1, [NEG_INF, 1]), ("a", "b")) == ("b",)

    @pytest.mark.parametrize("M", [cyclic(2), left_zero_with_unit(), trivial_monoid()], ids=lambda M: M.name)
    def test_functor_and_equivariance(self, M):
        nerve = interval_nerve(M, 3 if len(M.elements) < 3 else 2)
        assert check_nerve(nerve).passed
        assert check_equivariance(nerve).passed

    @given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.data())
    @settings(max_examples=100, deadline=None)
    def test_composition(self, l, m, n, data):
        nerve = interval_nerve(left_zero_with_unit(), 3)
        phi = data.draw(st.sampled_from(enumerate_morphisms(l, m)))
        psi = data.draw(st.sampled_from(enumerate_morphisms(m, n)))
        xs = data.draw(st.sampled_from(nerve.sets[l]))
        assert nerve.push(psi * phi, xs) == nerve.push(psi, nerve.push(phi, xs))


class TestGrothendieck:
    def test_z2_sizes(self):
        cat, proj = grothendieck(interval_nerve(cyclic(2), 2))
        assert len(cat.objects) == 1 + 2 + 4
        assert sum(1 for X in cat.objects if proj.obj_map[X] == 2) == 4
        assert check_discrete_fibration(cat, proj).passed

    def test_trivial_monoid_is_base(self):
        cat, proj = grothendieck(interval_nerve(trivial_monoid(), 3))
        assert check_isomorphism(proj).passed

    def test_not_a_fibration(self):
        # two lifts of everything: the projection from a product with a chaotic category
        base = nabla_category(1)
        chaotic = FinCategory(range(2), {(i, j): [(i, j)] for i in range(2) for j in range(2)},
                              {i: (i, i) for i in range(2)}, lambda g, f: (f[0], g[1]), "chaotic")
        P = product(base, chaotic)
        proj = Functor.from_callables(P, base, lambda o: o[0], lambda m: m[0], "pr1")
        assert not check_discrete_fibration(P, proj).passed


class TestVerdicts:
    def test_z2(self):
        rep = commutativity_check(cyclic(2), 3)
        assert rep.passed and rep.get("commutativity").detail == "COMMUTATIVE"

    def test_left_zero(self):
        c = commutativity_check(left_zero_with_unit(), 3).get("commutativity")
        assert not c.passed
        assert c.detail == "NOT COMMUTATIVE n=2 sigma=(2,1)"
        assert c.witness == ("a", "b")

    def test_agrees_with_pairwise(self):
        for M in all_monoids(3):
            assert commutativity_check(M, 3).get("commutativity:agrees").passed
            assert commutativity_check(M, 3).get("commutativity").passed == (M.is_commutative() is None)

    def test_low_level_sees_nothing(self):
        # twists need at least two entries
        assert commutativity_check(left_zero_with_unit(), 1).get("commutativity").passed
