import math

import pytest
from hypothesis import given, strategies as st

from nablaops.congruence import (
    FamilyKind,
    builtin_family,
    closure,
    closure_oracle,
    fiber_tuple,
    generated_subgroup,
    morphisms_up_to,
    rst_members,
    rst_oracle,
    table_family,
    verify_closure_laws,
    verify_family,
    verify_inert_bijection,
    verify_inr_normal,
    verify_pair,
)
from nablaops.group_operads import SymmetricOperad
from nablaops.interval_cat import IntervalMorphism, diamond, mu

I = float("-inf")
RHO = IntervalMorphism(3, 1, [I, I, 1])
ALL3 = morphisms_up_to(3)

# hypothesis tests cannot take function-scoped fixtures
fam_cache = {k.value: builtin_family(SymmetricOperad(6), k) for k in FamilyKind}


def fam(G, kind):
    return builtin_family(G, kind)


class TestExamples:
    def test_rst_mu2(self, S):
        assert fam(S, "RSt").members(mu(2)) == frozenset(S.elements(2))

    def test_dec_blocks(self, S):
        got = fam(S, "Dec").members(diamond([mu(2), mu(2)]))
        assert got == {(1, 2, 3, 4), (2, 1, 3, 4), (1, 2, 4, 3), (2, 1, 4, 3)}

    @pytest.mark.parametrize("f", ALL3[::7])
    def test_kec_trivial(self, S, f):
        assert fam(S, "Kec").members(f) == {S.unit(f.dom_n)}

    def test_inr_at_rho(self, S):
        assert fam(S, "Inr").members(RHO) == {(1, 2, 3), (2, 1, 3)}

    def test_closure_dec_at_rho(self, S):
        got = closure(fam(S, "Dec")).members(RHO)
        assert got == frozenset(rst_members(S, RHO)) and len(got) == 2

    def test_closure_triv_is_inr(self, S):
        bar, inr = closure(fam(S, "Triv")), fam(S, "Inr")
        assert all(bar.members(f) == inr.members(f) for f in morphisms_up_to(4))


@pytest.mark.parametrize("f", ALL3)
def test_rst_matches_oracle(S, f):
    assert frozenset(rst_members(S, f)) == rst_oracle(S, f)


@pytest.mark.parametrize("kind", ["Triv", "Dec", "Kec"])
def test_closure_matches_oracle(S, kind):
    K = fam(S, kind)
    for f in ALL3:
        assert closure(K).members(f) == closure_oracle(K, f)


@given(st.sampled_from(morphisms_up_to(4)))
def test_family_chain(f):
    chain = ["Triv", "Inr", "KecBar", "DecBar", "RSt"]
    sets = [fam_cache[k].members(f) for k in chain]
    assert all(a <= b for a, b in zip(sets, sets[1:]))
    assert fam_cache["Kec"].members(f) <= fam_cache["Dec"].members(f) <= sets[-1]
    kn, ks, kp = fiber_tuple(f)
    order = math.factorial(kn) * math.prod(map(math.factorial, ks)) * math.factorial(kp)
    assert len(fam_cache["Dec"].members(f)) == order == len(sets[-1])


@pytest.mark.parametrize("kind", [k.value for k in FamilyKind])
def test_builtin_families_verify(S, kind):
    rep = verify_family(fam(S, kind), 4)
    assert rep.passed, rep.failures()


def test_trivial_operad_families(T):
    for kind in FamilyKind:
        K = fam(T, kind)
        assert all(K.members(f) == {T.unit(f.dom_n)} for f in ALL3)
        assert verify_family(K, 3).passed


def test_ad_hoc_family_fails(S):
    K = table_family(S, "adhoc", {mu(3): [(2, 1, 3)]})
    rep = verify_family(K, 3)
    post = rep.get("adhoc:postcomposition")
    assert not post.passed and post.witness[0] == mu(3)


def test_generated_subgroup(S):
    assert len(generated_subgroup(S, 3, [(2, 1, 3), (1, 3, 2)])) == 6
    assert generated_subgroup(S, 3, []) == {(1, 2, 3)}


class TestPairs:
    def test_inr_kecbar(self, S):
        assert verify_pair(fam(S, "Inr"), fam(S, "KecBar"), 3).passed

    def test_decbar_kecbar(self, S):
        rep = verify_pair(fam(S, "DecBar"), fam(S, "KecBar"), 3)
        assert rep.passed, rep.failures()
        assert {c.id for c in rep.checks} == {"pair:proper", "pair:normalizer", "pair:commutator"}


def test_synthetic_pair_fails_normalizer(S):
    K = table_family(S, "K", {mu(3): [(1, 3, 2)]})
    L = table_family(S, "L", {mu(3): [(2, 1, 3)]})
    rep = verify_pair(K, L, 3, check_proper=False)
    c = rep.get("pair:normalizer")
    assert not c.passed and c.witness == (mu(3), (1, 3, 2))
    # (23)(12)(23) = (13) lies outside L
    assert S.mul(S.mul((1, 3, 2), (2, 1, 3)), (1, 3, 2)) == (3, 2, 1)


def test_closure_laws(S):
    rep = verify_closure_laws([fam(S, "Triv"), fam(S, "Dec"), fam(S, "Kec")], 4)
    assert rep.passed, rep.failures()


def test_inr_normal_and_inert_bijection(S):
    assert verify_inr_normal(S, 4).passed
    for kind in ("DecBar", "KecBar", "Inr"):
        assert verify_inert_bijection(fam(S, kind), 4).passed
