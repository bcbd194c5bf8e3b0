"""Congruence families on a group operad and their closure.

A family assigns to every interval morphism f: <<m>> -> <<n>> a subgroup of
the arity-m group, stored as an explicit frozenset of elements.
"""

from __future__ import annotations

import enum
import itertools
from typing import Callable, Iterable

from . import kernels
from .group_operads import GroupOperad
from .interval_cat import (
    IntervalMorphism,
    classify_and_factorize,
    enumerate_morphisms,
    fiber_tuple,
    is_active,
)
from .report import Report

Subgroup = frozenset


class FamilyKind(enum.Enum):
    TRIV = "Triv"
    RST = "RSt"
    DEC = "Dec"
    KEC = "Kec"
    INR = "Inr"
    DECBAR = "DecBar"
    KECBAR = "KecBar"


class CongruenceFamily:
    """A family given by a membership rule; results are memoized per morphism."""

    def __init__(self, operad: GroupOperad, name: str, rule: Callable[[IntervalMorphism], Iterable]):
        self.operad = operad
        self.name = name
        self._rule = rule
        self._cache: dict[IntervalMorphism, Subgroup] = {}

    def members(self, f: IntervalMorphism) -> Subgroup:
        hit = self._cache.get(f)
        if hit is None:
            self.operad.check_arity(f.dom_n)
            hit = frozenset(self._rule(f))
            self._cache[f] = hit
        return hit

    def __contains__(self, item) -> bool:
        f, x = item
        return x in self.members(f)

    def __repr__(self):
        return f"CongruenceFamily({self.name!r}, {self.operad.name})"


def rst_members(G: GroupOperad, f: IntervalMorphism) -> list:
    """Elements whose underlying permutation preserves every fiber of f."""
    ext = f.ext
    out = []
    for x in G.elements(f.dom_n):
        p = G.to_perm(x)
        if all(ext[p[i]] == ext[i + 1] for i in range(f.dom_n)):
            out.append(x)
    return out


def rst_oracle(G: GroupOperad, f: IntervalMorphism, l_max: int | None = None) -> frozenset:
    """Right stabilizers by definition: f o g^x == f o g for every g: <<l>> -> <<m>>.

    ``l`` ranges up to ``l_max`` (default m + 1).
    """
    m = f.dom_n
    l_max = m + 1 if l_max is None else l_max
    gs = [g for l in range(l_max + 1) for g in enumerate_morphisms(l, m)]
    return frozenset(x for x in G.elements(m) if all(f * G.push(g, x) == f * g for g in gs))


def dec_members(G: GroupOperad, f: IntervalMorphism) -> set:
    kn, ks, kp = fiber_tuple(f)
    arities = (kn,) + ks + (kp,)
    e = G.unit(len(arities))
    return {G.gamma(e, list(xs)) for xs in itertools.product(*(G.elements(k) for k in arities))}


def triv(G: GroupOperad) -> CongruenceFamily:
    return CongruenceFamily(G, "Triv", lambda f: [G.unit(f.dom_n)])


def rst(G: GroupOperad) -> CongruenceFamily:
    return CongruenceFamily(G, "RSt", lambda f: rst_members(G, f))


def dec(G: GroupOperad) -> CongruenceFamily:
    return CongruenceFamily(G, "Dec", lambda f: dec_members(G, f))


def kec(G: GroupOperad) -> CongruenceFamily:
    d = dec(G)

    def rule(f):
        e = G.unit(f.dom_n)
        return [x for x in d.members(f) if G.to_perm(x) == e]

    return CongruenceFamily(G, "Kec", rule)


def closure(K: CongruenceFamily, name: str | None = None) -> CongruenceFamily:
    """Least closure-fixed family containing K.

    Uses the factorization f = mu o rho: an element x stabilizing f belongs
    iff its pullback along the section of rho lies in K at mu.
    """
    G = K.operad

    def rule(f):
        fac = classify_and_factorize(f)
        if fac.rho.dom_n == fac.rho.cod_n:
            return K.members(f)
        target = K.members(fac.mu)
        return [x for x in rst_members(G, f) if G.pullback(fac.delta, x) in target]

    return CongruenceFamily(G, name or f"{K.name}Bar", rule)


def closure_oracle(K: CongruenceFamily, f: IntervalMorphism, l_max: int | None = None) -> frozenset:
    """Closure by definition, quantifying g: <<l>> -> <<m>> with f o g active, l <= m + 1."""
    G = K.operad
    m = f.dom_n
    l_max = m + 1 if l_max is None else l_max
    gs = [g for l in range(l_max + 1) for g in enumerate_morphisms(l, m) if is_active(f * g)]
    return frozenset(x for x in rst_oracle(G, f)
                     if all(G.pullback(g, x) in K.members(f * g) for g in gs))


def builtin_family(G: GroupOperad, kind: FamilyKind | str) -> CongruenceFamily:
    kind = FamilyKind(kind)
    if kind is FamilyKind.TRIV:
        return triv(G)
    if kind is FamilyKind.RST:
        return rst(G)
    if kind is FamilyKind.DEC:
        return dec(G)
    if kind is FamilyKind.KEC:
        return kec(G)
    if kind is FamilyKind.INR:
        return closure(triv(G), "Inr")
    if kind is FamilyKind.DECBAR:
        return closure(dec(G), "DecBar")
    return closure(kec(G), "KecBar")


def table_family(G: GroupOperad, name: str, table: dict, default: CongruenceFamily | None = None) -> CongruenceFamily:
    """Ad-hoc family: explicit generators per morphism, ``default`` elsewhere."""
    default = default or triv(G)

    def rule(f):
        if f in table:
            return generated_subgroup(G, f.dom_n, table[f])
        return default.members(f)

    return CongruenceFamily(G, name, rule)


def generated_subgroup(G: GroupOperad, n: int, gens: Iterable) -> frozenset:
    out = {G.unit(n)}
    frontier = list(out)
    gens = list(gens)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = G.mul(a, g)
                if b not in out:
                    out.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(out)


def morphisms_up_to(N: int) -> list[IntervalMorphism]:
    return [f for m in range(N + 1) for n in range(N + 1) for f in enumerate_morphisms(m, n)]


def conj(G: GroupOperad, a, x):
    return G.mul(G.mul(a, x), G.inv(a))


# -- verification -----------------------------------------------------------

def verify_family(K: CongruenceFamily, n_max: int) -> Report:
    """Check the four family axioms on every morphism with m, n <= n_max."""
    G = K.operad
    rep = Report()
    fs = morphisms_up_to(n_max)
    into = {m: [g for l in range(n_max + 1) for g in enumerate_morphisms(l, m)] for m in range(n_max + 1)}
    out_of = {n: [c for k in range(n_max + 1) for c in enumerate_morphisms(n, k)] for n in range(n_max + 1)}
    bad = {"subgroup": None, "postcomposition": None, "precomposition": None, "conjugation": None}
    for f in fs:
        S = K.members(f)
        e = G.unit(f.dom_n)
        stab = frozenset(rst_members(G, f))
        if e not in S or not S <= stab or any(G.mul(a, b) not in S or G.inv(a) not in S for a in S for b in S):
            bad["subgroup"] = bad["subgroup"] or (f,)
        for c in out_of[f.cod_n]:
            if not S <= K.members(c * f):
                bad["postcomposition"] = bad["postcomposition"] or (f, c)
                break
        for g in into[f.dom_n]:
            T = K.members(f * g)
            w = next((x for x in S if G.pullback(g, x) not in T), None)
            if w is not None:
                bad["precomposition"] = bad["precomposition"] or (f, g, w)
                break
        for y in G.elements(f.cod_n):
            a, fy = G.crossed_action(f, y)
            if frozenset(conj(G, a, x) for x in S) != K.members(fy):
                bad["conjugation"] = bad["conjugation"] or (f, y)
                break
    for key, w in bad.items():
        rep.add(f"{K.name}:{key}", w is None, f"m,n<={n_max}", w)
    return rep


def inr_of(K: CongruenceFamily) -> CongruenceFamily:
    return builtin_family(K.operad, FamilyKind.INR)


def verify_pair(K: CongruenceFamily, L: CongruenceFamily, n_max: int, check_proper: bool = True) -> Report:
    """Check the normalizer condition (1) and the commutator condition (2).

    Properness (both families closure-fixed) is reported as its own check;
    pass ``check_proper=False`` for synthetic pairs that are not.
    """
    G = K.operad
    inr = inr_of(K)
    rep = Report()
    fs = morphisms_up_to(n_max)
    if check_proper:
        bad = None
        for F in (K, L):
            Fb = closure(F)
            bad = bad or next(((F.name, f) for f in fs if F.members(f) != Fb.members(f)), None)
        rep.add("pair:proper", bad is None, f"m,n<={n_max}", bad)
    bad1 = None
    for f in fs:
        Lf = L.members(f)
        for x in K.members(f):
            if frozenset(conj(G, x, z) for z in Lf) != Lf:
                bad1 = (f, x)
                break
        if bad1:
            break
    rep.add("pair:normalizer", bad1 is None, f"m,n<={n_max}", bad1)
    bad2 = None
    for f in fs:
        Kf = K.members(f)
        for k in range(n_max + 1):
            for g in enumerate_morphisms(f.cod_n, k):
                I = inr.members(g * f)
                for u in L.members(g):
                    a = G.pullback(f, u)
                    for x in Kf:
                        if G.mul(conj(G, a, x), G.inv(x)) not in I:
                            bad2 = (f, g, u, x)
                            break
                    if bad2:
                        break
                if bad2:
                    break
            if bad2:
                break
        if bad2:
            break
    rep.add("pair:commutator", bad2 is None, f"m,n<={n_max}", bad2)
    return rep


def verify_closure_laws(families: list[CongruenceFamily], n_max: int) -> Report:
    """Extensive, monotone (on comparable pairs) and idempotent."""
    rep = Report()
    fs = morphisms_up_to(n_max)
    bars = [closure(K) for K in families]
    ext = next(((K.name, f) for K, Kb in zip(families, bars) for f in fs
                if not K.members(f) <= Kb.members(f)), None)
    rep.add("closure:extensive", ext is None, f"m,n<={n_max}", ext)
    mono = None
    for (K, Kb), (K2, K2b) in itertools.permutations(list(zip(families, bars)), 2):
        if all(K.members(f) <= K2.members(f) for f in fs):
            mono = mono or next(((K.name, K2.name, f) for f in fs
                                 if not Kb.members(f) <= K2b.members(f)), None)
    rep.add("closure:monotone", mono is None, f"m,n<={n_max}", mono)
    idem = next(((K.name, f) for Kb in bars for K in [Kb] for f in fs
                 if closure(Kb).members(f) != Kb.members(f)), None)
    rep.add("closure:idempotent", idem is None, f"m,n<={n_max}", idem)
    return rep


def verify_inr_normal(G: GroupOperad, n_max: int) -> Report:
    inr = builtin_family(G, FamilyKind.INR)
    bad = None
    for f in morphisms_up_to(n_max):
        I = inr.members(f)
        for a in rst_members(G, f):
            if frozenset(conj(G, a, x) for x in I) != I:
                bad = (f, a)
                break
        if bad:
            break
    rep = Report()
    rep.add("inr:normal", bad is None, f"m,n<={n_max}", bad)
    return rep


def verify_inert_bijection(K: CongruenceFamily, n_max: int) -> Report:
    """For active mu and inert rho, pulling back along rho induces a bijection
    K at mu -> (K at mu rho) / Inr at mu rho."""
    G = K.operad
    inr = inr_of(K)
    bad = None
    for f in morphisms_up_to(n_max):
        fac = classify_and_factorize(f)
        if fac.rho.dom_n == fac.rho.cod_n:
            continue
        I = inr.members(f)
        Kf = K.members(f)
        images = {kernels.coset_min(I, G.pullback(fac.rho, x)) for x in K.members(fac.mu)}
        cosets = {kernels.coset_min(I, x) for x in Kf}
        if len(images) != len(K.members(fac.mu)) or images != cosets:
            bad = (f,)
            break
    rep = Report()
    rep.add(f"{K.name}:inert-bijection", bad is None, f"m,n<={n_max}", bad)
    return rep
