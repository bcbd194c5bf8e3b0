import pytest

from nablaops import multicats as mc
from nablaops.finite_cats import validate_functor
from nablaops.interval_cat import identity, mu, rho
from nablaops.operators import (
    OperatorError,
    Variant,
    WMor,
    base_candidate,
    bases,
    is_cocartesian,
    phi_iso,
    reconstruct,
    roundtrip,
    std_cocart_lift,
    target_words,
    thickened_candidate,
    upper_candidate,
    validate_operator_category,
    verify_phi_iso,
    wreath,
    wreath_candidate,
)

SWAP = (2, 1)
E2 = (1, 2)


def size(C):
    return sum(1 for _ in C.morphisms())


@pytest.fixture(scope="module")
def sample():
    return mc.two_object_sample(3)


class TestWreath:
    @pytest.mark.parametrize("variant, base", [("E", "E"), ("TildeE", "Et"), ("GPull", "Gcat"),
                                               ("TildeGPull", "Gt")])
    def test_terminal_matches_base(self, S, variant, base):
        # one multimorphism per arity: the wreath is its own base
        W = wreath(mc.terminal(3), S, variant, 3)
        assert len(W.cat.objects) == 4
        assert size(W.cat) == size(getattr(bases(S, 3), base))

    def test_frozen_sizes(self, S, sample):
        B = bases(S, 3)
        assert (size(B.E), size(B.Et)) == (392, 222)
        W, Wt = wreath(sample, S, Variant.E, 3), wreath(sample, S, Variant.TILDE_E, 3)
        assert len(W.cat.objects) == 1 + 2 + 4 + 8
        assert (size(W.cat), size(Wt.cat)) == (794, 472)

    def test_hom_over_mu2(self, S, sample):
        W = wreath(sample, S, Variant.E, 3)
        B = W.bases
        over = [m for m in W.cat.hom(("a", "b"), ("a",)) if m.base[0] == mu(2)]
        assert sorted((m.base[1], m.fs) for m in over) == [(E2, ("f",)), (SWAP, ("g",))]
        assert all(B.E.src(m.base) == 2 for m in over)

    def test_target_words(self, S):
        assert target_words(S, ("a", "b"), mu(2), SWAP) == [("b", "a")]
        assert target_words(S, ("a", "b"), rho(1, 2), E2) == [("a",)]
        assert target_words(S, ("a", "b"), rho(1, 2), SWAP) == [("b",)]

    def test_anchor_is_functor(self, S, sample):
        for v in Variant:
            assert validate_functor(wreath(sample, S, v, 2).anchor).passed


class TestPhi:
    @pytest.mark.parametrize("tilde", [False, True])
    def test_iso(self, S, sample, tilde):
        assert verify_phi_iso(phi_iso(sample, S, tilde, 3)).passed

    def test_iso_terminal(self, S):
        assert verify_phi_iso(phi_iso(mc.terminal(3), S, True, 3)).passed


class TestLifts:
    def test_rho1_identity(self, S, sample):
        W = wreath(sample, S, Variant.E, 3)
        m = std_cocart_lift(W, W.bases.label(rho(1, 2), E2), ("a", "b"))
        assert m == WMor(("a", "b"), ("a",), W.bases.label(rho(1, 2), E2), ("id_a",))
        assert is_cocartesian(m, W.cat, W.anchor, 3).passed

    def test_rho1_swap_targets_b(self, S, sample):
        W = wreath(sample, S, Variant.E, 3)
        m = std_cocart_lift(W, W.bases.label(rho(1, 2), SWAP), ("a", "b"))
        assert m.tgt == ("b",) and m.fs == ("id_b",)

    def test_active_is_not_a_standard_lift(self, S, sample):
        W = wreath(sample, S, Variant.E, 3)
        with pytest.raises(OperatorError):
            std_cocart_lift(W, W.bases.label(mu(2), E2), ("a", "b"))

    def test_mu2_not_cocartesian(self, S, sample):
        # h: a -> a is not invertible, so maps out of ab through f do not all factor
        W = wreath(sample, S, Variant.E, 3)
        m = WMor(("a", "b"), ("a",), W.bases.label(mu(2), E2), ("f",))
        assert not is_cocartesian(m, W.cat, W.anchor, 3).passed

    def test_identity_is_cocartesian(self, S, sample):
        Wt = wreath(sample, S, Variant.TILDE_E, 2)
        m = std_cocart_lift(Wt, Wt.bases.label(identity(2), E2), ("b", "a"))
        assert is_cocartesian(m, Wt.cat, Wt.anchor, 2).passed


class TestOperatorCategories:
    def test_base_candidate(self, S):
        assert validate_operator_category(base_candidate(S, 3)).passed

    def test_upper_candidate(self, S):
        assert validate_operator_category(upper_candidate(S, 3)).passed

    def test_wreath_candidate(self, S, sample):
        rep = validate_operator_category(wreath_candidate(sample, mc.swap_action(sample, S), 3))
        assert rep.passed
        assert rep.get("operator:fibers").detail.startswith("0:iso 1:iso 2:iso 3:iso")

    def test_thickened_fails(self, S):
        rep = validate_operator_category(thickened_candidate(base_candidate(S, 3)), check_presheaf=False)
        assert not rep.passed
        assert rep.get("operator:fibers").detail.startswith("0:neither 1:iso 2:neither 3:neither")


class TestReconstruct:
    def test_base_gives_terminal(self, S):
        M, A = reconstruct(base_candidate(S, 3))
        (o,) = M.objects
        assert [len(M.hom((o,) * k, o)) for k in range(4)] == [1, 1, 1, 1]
        assert mc.validate_gsym(M, A).passed

    def test_upper_gives_operad(self, S):
        M, A = reconstruct(upper_candidate(S, 3))
        (o,) = M.objects
        assert [len(M.hom((o,) * k, o)) for k in range(4)] == [1, 1, 2, 6]
        assert mc.validate_multicat(M).passed

    def test_sample_homs(self, S, sample):
        M, A = reconstruct(wreath_candidate(sample, mc.swap_action(sample, S), 3))
        assert len(M.objects) == 2
        assert len(M.morphisms) == len(sample.morphisms)

    def test_level_mismatch(self, S):
        with pytest.raises(ValueError):
            reconstruct(base_candidate(S, 2), 3)


class TestRoundtrip:
    def test_sample(self, S, sample):
        T = mc.terminal(3)
        F = mc.Multifunctor(sample, T, {"a": "o", "b": "o"},
                            {f: sample.arity(f) for f in sample.morphisms}, "to-terminal")
        rep = roundtrip(sample, mc.swap_action(sample, S), 3, [(F, mc.trivial_action(T, S))])
        assert rep.passed, rep.failures()

    def test_parity(self, S):
        P = mc.parity_operad(2)
        assert roundtrip(P, mc.trivial_action(P, S), 2).passed

    def test_higher_arities_are_dropped(self, S, sample):
        # the sample reaches arity 3; at level 2 those operations are invisible
        assert roundtrip(sample, mc.swap_action(sample, S), 2).passed
