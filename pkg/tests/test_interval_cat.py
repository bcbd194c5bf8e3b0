import itertools
import math

import pytest
from hypothesis import given, strategies as st

from nablaops.interval_cat import (
    NEG_INF,
    POS_INF,
    IntervalError,
    IntervalMorphism,
    MorphismClass,
    block_rho,
    canonical,
    classify_and_factorize,
    compose,
    count_morphisms,
    delta_fiber,
    diamond,
    enumerate_morphisms,
    fiber_tuple,
    identity,
    is_active,
    is_inert,
    mu,
    rho,
)

I, P = NEG_INF, POS_INF


def brute_maps(m, n):
    """Every monotone map {0..m+1} -> {0..n+1} fixing the ends, as dicts."""
    out = []
    for vals in itertools.product(range(n + 2), repeat=m):
        ext = (0,) + vals + (n + 1,)
        if all(a <= b for a, b in zip(ext, ext[1:])):
            out.append(dict(enumerate(ext)))
    return out


def as_dict(f):
    return dict(enumerate(f.ext))


def _from(draw, m, max_n):
    n = draw(st.integers(0, max_n))
    vals = sorted(draw(st.lists(st.integers(0, n + 1), min_size=m, max_size=m)))
    return IntervalMorphism.from_ext(n, (0,) + tuple(vals) + (n + 1,))


@st.composite
def morphisms(draw, max_n=4):
    return _from(draw, draw(st.integers(0, max_n)), max_n)


@st.composite
def chains(draw, length, max_n=4):
    """Composable f1, f2, ... with f_{i+1} after f_i."""
    fs = [draw(morphisms(max_n))]
    for _ in range(length - 1):
        fs.append(_from(draw, fs[-1].cod_n, max_n))
    return fs


class TestConstruction:
    def test_values_round_trip(self):
        f = IntervalMorphism(3, 2, [I, 1, 1])
        assert f.ext == (0, 0, 1, 1, 3)
        assert f.values == (I, 1, 1)

    @pytest.mark.parametrize("vals", [[2, 1], [3, 1], [0, 1], [1.5, 2]])
    def test_rejects_bad_values(self, vals):
        with pytest.raises(IntervalError):
            IntervalMorphism(2, 2, vals)

    def test_rejects_wrong_length(self):
        with pytest.raises(IntervalError):
            IntervalMorphism(2, 2, [1])

    def test_compose_mismatch(self):
        with pytest.raises(IntervalError):
            compose(identity(2), identity(3))


class TestExamples:
    def test_identity_left_unit(self):
        phi = IntervalMorphism(3, 2, [I, 1, 1])
        assert identity(2) * phi == phi

    def test_mu2_after_juxtaposition(self):
        assert mu(2) * diamond([mu(2), mu(1)]) == mu(3)

    def test_rho_section(self):
        fac = classify_and_factorize(rho(1, 1))
        assert fac.rho * fac.delta == identity(1)

    def test_fiber_tuples(self):
        assert fiber_tuple(identity(2)) == (0, (1, 1), 0)
        assert fiber_tuple(IntervalMorphism(3, 2, [I, 1, 1])) == (1, (2, 0), 0)
        assert fiber_tuple(mu(3)) == (0, (3,), 0)

    def test_factorizations(self):
        assert classify_and_factorize(mu(3)) == (MorphismClass.ACTIVE, identity(3), mu(3), identity(3))
        r2 = IntervalMorphism(3, 1, [I, 1, P])
        fac = classify_and_factorize(r2)
        assert fac.kind is MorphismClass.INERT
        assert fac.rho == r2 and fac.mu == identity(1)
        assert fac.delta == IntervalMorphism(1, 3, [2])
        fac = classify_and_factorize(IntervalMorphism(3, 2, [I, 1, 1]))
        assert fac.kind is MorphismClass.MIXED
        assert fac.rho == IntervalMorphism(3, 2, [I, 1, 2])
        assert fac.mu == IntervalMorphism(2, 2, [1, 1])
        assert fac.delta == IntervalMorphism(2, 3, [2, 3])

    def test_canonical(self):
        assert canonical("Mu", 3).values == (1, 1, 1)
        assert canonical("BlockRho", (1, 2), 2) == IntervalMorphism(3, 2, [I, 1, 2])
        assert canonical("DeltaFiber", IntervalMorphism(3, 2, [I, 1, 1]), 1) == IntervalMorphism(2, 3, [2, 3])
        assert canonical("Id", 2) == identity(2)
        assert canonical("Rho", 2, 3) == IntervalMorphism(3, 1, [I, 1, P])

    def test_diamond(self):
        assert diamond([identity(1), identity(1)]) == identity(2)
        assert diamond([mu(2), mu(1)]).values == (1, 1, 2)
        assert diamond([mu(2), mu(2)]).values == (1, 1, 2, 2)
        with pytest.raises(IntervalError):
            diamond([rho(1, 2)])

    def test_small_counts(self):
        assert len(enumerate_morphisms(0, 3)) == 1
        assert enumerate_morphisms(1, 1) == [IntervalMorphism(1, 1, [v]) for v in (I, 1, P)]
        assert len(enumerate_morphisms(2, 1)) == 6


@pytest.mark.parametrize("m,n", [(m, n) for m in range(5) for n in range(5)])
def test_enumeration_matches_brute_force(m, n):
    got = [as_dict(f) for f in enumerate_morphisms(m, n)]
    want = brute_maps(m, n)
    assert sorted(map(lambda d: tuple(d.values()), got)) == sorted(map(lambda d: tuple(d.values()), want))
    assert len(set(enumerate_morphisms(m, n))) == count_morphisms(m, n) == math.comb(m + n + 1, m)


@given(chains(2))
def test_composition_is_pointwise(fs):
    f, g = fs
    h = compose(g, f)
    assert h.ext == tuple(g.ext[v] for v in f.ext)


@given(chains(3))
def test_associativity(fs):
    f, g, h = fs
    assert (h * g) * f == h * (g * f)


@given(morphisms())
def test_identities(f):
    assert identity(f.cod_n) * f == f == f * identity(f.dom_n)


@given(morphisms())
def test_factorization_laws(f):
    fac = classify_and_factorize(f)
    assert fac.mu * fac.rho == f
    assert is_inert(fac.rho) and is_active(fac.mu)
    assert fac.rho * fac.delta == identity(fac.rho.cod_n)
    assert (fac.kind is MorphismClass.ACTIVE) == (fac.rho == identity(f.dom_n))
    # identities are both; the active label wins
    inert_only = fac.mu == identity(f.cod_n) and fac.rho != identity(f.dom_n)
    assert (fac.kind is MorphismClass.INERT) == inert_only


@pytest.mark.parametrize("m,n", [(m, n) for m in range(4) for n in range(4)])
def test_factorization_unique(m, n):
    # exhaustive search over all inert-then-active factorizations
    for f in enumerate_morphisms(m, n):
        hits = [(r, a) for k in range(m + 1) for r in enumerate_morphisms(m, k) if is_inert(r)
                for a in enumerate_morphisms(k, n) if is_active(a) and a * r == f]
        assert len(hits) == 1
        fac = classify_and_factorize(f)
        assert hits[0] == (fac.rho, fac.mu)


def test_block_rho_and_delta():
    for ks in [(1, 2), (2, 0, 1), (3,)]:
        total = sum(ks)
        for i in range(1, len(ks) + 1):
            r = block_rho(ks, i)
            assert r.dom_n == total and r.cod_n == ks[i - 1] and is_inert(r)
    phi = diamond([mu(2), mu(0), mu(1)])
    for j in range(1, 4):
        d = delta_fiber(phi, j)
        assert is_active(d)
        assert all(phi.ext[d.ext[i]] == j for i in range(1, d.dom_n + 1))
    with pytest.raises(IntervalError):
        rho(3, 2)


def test_hash_and_order_consistent():
    fs = enumerate_morphisms(2, 2)
    assert len(set(fs)) == len(fs)
    assert sorted(fs) == sorted(fs, key=lambda f: f.ext)
