"""Quotients of the total category of a group operad.

``build_quotal`` realizes a congruence family K as a category whose
morphisms <<m>> -> <<n>> are pairs (f, [x]) with [x] a right coset of K_f,
stored as the lexicographically least element of the coset.
``build_double`` assembles the two-level structure for a pair (K, L), and
``tilde_quotient`` identifies morphisms that agree after every composite
that lands on an active map.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .congruence import (
    CongruenceFamily,
    FamilyKind,
    builtin_family,
    verify_family,
    verify_pair,
)
from .finite_cats import (
    DoubleCategory,
    FinCategory,
    Functor,
    Pullback,
    Quotient,
    Report,
    check_isomorphism,
    lcancel_signatures,
    pullback,
    quotient,
    validate_functor,
)
from .group_operads import GroupOperad
from .interval_cat import (
    IntervalMorphism,
    classify_and_factorize,
    enumerate_morphisms,
    identity,
    is_active,
    is_inert,
    rho,
)


class FamilyError(ValueError):
    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report


class NotQuotalError(ValueError):
    def __init__(self, msg, witness):
        super().__init__(msg)
        self.witness = witness


class CriterionMismatch(RuntimeError):
    """The two-test-morphism criterion disagreed with the generic relation."""


@dataclass
class QuotalCategory:
    """Q_L (``inner is None``, labels ``(f, x)``) or the upper level of a
    double quotal (labels ``(f, u, x)`` with ``[u]`` an Inr-coset in ``inner``)."""
    cat: FinCategory
    operad: GroupOperad
    family: CongruenceFamily
    N: int
    inner: CongruenceFamily | None = None
    _inr: CongruenceFamily | None = field(default=None, repr=False)

    @property
    def inr(self) -> CongruenceFamily:
        if self._inr is None:
            self._inr = builtin_family(self.operad, FamilyKind.INR)
        return self._inr

    def triple(self, label) -> tuple:
        if self.inner is None:
            f, x = label
            return f, self.operad.unit(f.dom_n), x
        return label

    def coset(self, f: IntervalMorphism, x) -> tuple:
        return kernels.coset_min(self.family.members(f), x)

    def label(self, f: IntervalMorphism, x) -> tuple:
        return (f, self.coset(f, x))

    def projection_from_total(self, total: "QuotalCategory") -> Functor:
        """The functor from the total category (the Triv quotient) to this one."""
        if self.inner is not None:
            raise TypeError("projection is defined for single-level quotients")
        return Functor.from_callables(total.cat, self.cat, lambda a: a,
                                      lambda m: self.label(m[0], m[1]), f"q[{self.family.name}]")


def _cosets(group, elements) -> list:
    return sorted({kernels.coset_min(group, x) for x in elements})


def build_quotal(G: GroupOperad, K: CongruenceFamily, N: int, verify: bool = True) -> QuotalCategory:
    """Morphisms (f, [x]) with composition (g, [y]) o (f, [x]) = (g f^y, [f*(y) x])."""
    if verify:
        rep = verify_family(K, N)
        if not rep.passed:
            raise FamilyError(f"{K.name} is not a congruence family on the truncation {N}", rep)
    homs = {}
    for m in range(N + 1):
        els = G.elements(m)
        for n in range(N + 1):
            homs[(m, n)] = [(f, c) for f in enumerate_morphisms(m, n) for c in _cosets(K.members(f), els)]
    ids = {n: (identity(n), G.unit(n)) for n in range(N + 1)}

    def compose(g, f):
        (psi, y), (phi, x) = g, f
        pull, push = G.crossed_action(phi, y)
        h = psi * push
        return (h, kernels.coset_min(K.members(h), G.mul(pull, x)))

    cat = FinCategory(range(N + 1), homs, ids, compose, f"Q[{G.name},{K.name},N={N}]")
    return QuotalCategory(cat, G, K, N)


def recover_family(Q: QuotalCategory, total: QuotalCategory | None = None) -> CongruenceFamily:
    """K_f = {x : q(f, x) = q(f, e)}, read off the projection from the total category."""
    G = Q.operad
    total = total or build_quotal(G, builtin_family(G, FamilyKind.TRIV), Q.N, verify=False)
    proj = Q.projection_from_total(total)
    seen = {}
    for (f, x), img in proj.mor_map.items():
        prev = seen.setdefault(img, f)
        if prev != f:
            raise NotQuotalError("projection identifies different interval maps", (prev, f))
    table = defaultdict(set)
    for (f, x), img in proj.mor_map.items():
        if img == proj.mor_map[(f, G.unit(f.dom_n))]:
            table[f].add(x)
    return CongruenceFamily(G, f"recovered[{Q.family.name}]", lambda f: table[f])


@dataclass
class DoubleQuotal:
    double: DoubleCategory
    upper: QuotalCategory
    lower: QuotalCategory
    K: CongruenceFamily
    L: CongruenceFamily


def make_double(vertical: FinCategory, base: FinCategory, s: Functor, t: Functor,
                comp_obj, comp_mor, unit: Functor) -> DoubleCategory:
    pb = pullback(s, t, f"{vertical.name}x_{base.name}")
    comp = Functor.from_callables(pb.cat, vertical, comp_obj, comp_mor, "comp")
    return DoubleCategory(vertical, base, s, t, comp, unit, pb)


def build_double(G: GroupOperad, K: CongruenceFamily, L: CongruenceFamily, N: int,
                 verify: bool = True) -> DoubleQuotal:
    """Upper morphisms (f, [u], [x]) with [u] in Inr_f\\K_f and [x] in L_f\\G;
    source (f, [x]) and target (f, [u x]) in Q_L."""
    if verify:
        rep = verify_pair(K, L, N)
        if not rep.passed:
            raise FamilyError(f"({K.name}, {L.name}) fails the pair conditions", rep)
    lower = build_quotal(G, L, N, verify=verify)
    inr = builtin_family(G, FamilyKind.INR)
    homs = {}
    for m in range(N + 1):
        els = G.elements(m)
        for n in range(N + 1):
            homs[(m, n)] = [(f, u, x) for f in enumerate_morphisms(m, n)
                            for u in _cosets(inr.members(f), K.members(f))
                            for x in _cosets(L.members(f), els)]
    ids = {n: (identity(n), G.unit(n), G.unit(n)) for n in range(N + 1)}

    def compose(g, f):
        (psi, v, y), (phi, u, x) = g, f
        pull_y, push = G.crossed_action(phi, y)
        h = psi * push
        a = G.mul(G.mul(G.pullback(phi, G.mul(v, y)), u), G.inv(pull_y))
        return (h, kernels.coset_min(inr.members(h), a),
                kernels.coset_min(L.members(h), G.mul(pull_y, x)))

    vcat = FinCategory(range(N + 1), homs, ids, compose, f"Q[{G.name},{L.name}||{K.name},N={N}]")
    upper = QuotalCategory(vcat, G, L, N, inner=K, _inr=inr)
    B = lower.cat
    s = Functor.from_callables(vcat, B, lambda a: a, lambda m: (m[0], m[2]), "s")
    t = Functor.from_callables(vcat, B, lambda a: a, lambda m: (m[0], lower.coset(m[0], G.mul(m[1], m[2]))), "t")
    unit = Functor.from_callables(B, vcat, lambda a: a,
                                  lambda m: (m[0], kernels.coset_min(inr.members(m[0]), G.unit(m[0].dom_n)), m[1]),
                                  "unit")

    def comp_mor(p):
        (f, ua, _), (_, ub, xb) = p
        return (f, kernels.coset_min(inr.members(f), G.mul(ua, ub)), xb)

    D = make_double(vcat, B, s, t, lambda p: p[0], comp_mor, unit)
    return DoubleQuotal(D, upper, lower, K, L)


# -- tilde quotients --------------------------------------------------------

def _criterion_holds(Q: QuotalCategory, a, b, psi) -> bool:
    G = Q.operad
    f, u, x = Q.triple(a)
    f2, u2, x2 = Q.triple(b)
    pull, push = G.crossed_action(psi, x)
    pull2, push2 = G.crossed_action(psi, x2)
    A, A2 = f * push, f2 * push2
    if not (is_active(A) or is_active(A2)):
        return True
    if A != A2:
        return False
    L = Q.family.members(A)
    if kernels.coset_min(L, pull) != kernels.coset_min(L, pull2):
        return False
    if Q.inner is None:
        return True
    I = Q.inr.members(A)
    return kernels.coset_min(I, G.pullback(push, u)) == kernels.coset_min(I, G.pullback(push2, u2))


def _test_morphism(Q: QuotalCategory, label) -> IntervalMorphism:
    G = Q.operad
    f, _, x = Q.triple(label)
    delta = classify_and_factorize(f).delta
    return G.push(delta, G.inv(x))


def criterion_relation(Q: QuotalCategory, a, b) -> int:
    return all(_criterion_holds(Q, a, b, psi) for psi in (_test_morphism(Q, a), _test_morphism(Q, b)))


def _active_class(Q: QuotalCategory):
    return lambda m: is_active(m[0])


def criterion_partition(Q: QuotalCategory) -> dict:
    """Class index per label, from the two-test-morphism criterion.

    Raises ``CriterionMismatch`` if the relation is not an equivalence.
    """
    C = Q.cat
    cls = {}
    for (a, b), hs in C.homs.items():
        n = len(hs)
        tests = [_test_morphism(Q, h) for h in hs]
        R = np.eye(n, dtype=bool)
        for i in range(n):
            for j in range(i + 1, n):
                ok = _criterion_holds(Q, hs[i], hs[j], tests[i]) and _criterion_holds(Q, hs[i], hs[j], tests[j])
                R[i, j] = R[j, i] = ok
        Ri = R.astype(np.int64)
        if ((Ri @ Ri > 0) & ~R).any():
            i, j = (int(v[0]) for v in np.nonzero((Ri @ Ri > 0) & ~R))
            raise CriterionMismatch(f"criterion is not transitive on hom({a},{b}): {hs[i]!r}, {hs[j]!r}")
        label = [-1] * n
        nxt = 0
        for i in range(n):
            if label[i] < 0:
                for j in np.nonzero(R[i])[0]:
                    label[int(j)] = nxt
                nxt += 1
        for h, k in zip(hs, label):
            cls[h] = (a, b, k)
    return cls


def oracle_partition(Q: QuotalCategory) -> dict:
    """Class index per label from the generic bounded relation."""
    C = Q.cat
    act = _active_class(Q)
    inM = {k: np.array([act(f) for f in hs], dtype=bool) for k, hs in C.homs.items()}
    cls = {}
    for (a, b), hs in C.homs.items():
        ids: dict = {}
        for h, sig in zip(hs, lcancel_signatures(C, inM, a, b)):
            cls[h] = (a, b, ids.setdefault(sig, len(ids)))
    return cls


def _same_partition(p: dict, q: dict) -> tuple | None:
    fwd, bwd = {}, {}
    for h in p:
        if fwd.setdefault(p[h], q[h]) != q[h] or bwd.setdefault(q[h], p[h]) != p[h]:
            return h
    return None


@dataclass
class TildeQuotal:
    quotient: Quotient
    source: QuotalCategory

    @property
    def cat(self) -> FinCategory:
        return self.quotient.cat

    @property
    def proj(self) -> Functor:
        return self.quotient.proj


def tilde_quotient(Q: QuotalCategory, check_oracle: bool = True) -> TildeQuotal:
    """Quotient by the left-cancellative relation for the active class,
    computed by the two-test-morphism criterion and cross-checked against
    the generic relation on the truncation."""
    crit = criterion_partition(Q)
    if check_oracle:
        bad = _same_partition(crit, oracle_partition(Q))
        if bad is not None:
            raise CriterionMismatch(f"criterion and generic relation disagree at {bad!r}")
    q = quotient(Q.cat, lambda m: crit[m], f"~{Q.cat.name}")
    return TildeQuotal(q, Q)


def induced_functor(F: Functor, qa: Quotient, qb: Quotient, name: str = "") -> Functor:
    """The functor between quotients induced by F; raises if F does not
    respect the classes."""
    mor = {}
    for m in F.source.morphisms():
        c, img = qa.cls[m], qb.cls[F.mor_map[m]]
        if mor.setdefault(c, img) != img:
            raise ValueError(f"{F.name} does not respect classes at {m!r}")
    return Functor(qa.cat, qb.cat, dict(F.obj_map), mor, name or f"~{F.name}")


def induced_on_pullback(F: Functor, pb: Pullback, pb_tilde: Pullback, qa: Quotient, qb: Quotient,
                        q_out: Quotient, name: str = "") -> Functor:
    """Induce F: A x_C B -> X to the quotients, using every pair of
    representatives that is composable before quotienting; all must agree."""
    members_a, members_b = qa.members, qb.members
    mor = {}
    for (ca, cb) in pb_tilde.cat.morphisms():
        imgs = {q_out.cls[F.mor_map[(a, b)]]
                for a in members_a[ca] for b in members_b[cb] if (a, b) in pb.cat}
        if len(imgs) != 1:
            raise ValueError(f"{F.name} induces {len(imgs)} values at {(ca, cb)!r}")
        mor[(ca, cb)] = imgs.pop()
    obj = {o: F.obj_map[o] for o in pb_tilde.cat.objects}
    return Functor(pb_tilde.cat, q_out.cat, obj, mor, name or f"~{F.name}")


@dataclass
class TildeDouble:
    double: DoubleCategory
    upper: TildeQuotal
    lower: TildeQuotal
    source: DoubleQuotal


def tilde_double(DQ: DoubleQuotal, check_oracle: bool = True) -> TildeDouble:
    D = DQ.double
    up = tilde_quotient(DQ.upper, check_oracle)
    lo = tilde_quotient(DQ.lower, check_oracle)
    s = induced_functor(D.s, up.quotient, lo.quotient, "~s")
    t = induced_functor(D.t, up.quotient, lo.quotient, "~t")
    unit = induced_functor(D.unit, lo.quotient, up.quotient, "~unit")
    pb = pullback(s, t, f"{up.cat.name}x_{lo.cat.name}")
    comp = induced_on_pullback(D.comp, D.composable, pb, up.quotient, up.quotient, up.quotient, "~comp")
    return TildeDouble(DoubleCategory(up.cat, lo.cat, s, t, comp, unit, pb), up, lo, DQ)


# -- checks -----------------------------------------------------------------

def verify_pullback_squares(DQ: DoubleQuotal, TD: TildeDouble | None = None) -> Report:
    """The upper category is the pullback of its tilde quotient against the
    lower category, along both s and t."""
    TD = TD or tilde_double(DQ)
    rep = Report()
    D, Dt = DQ.double, TD.double
    pu, pl = TD.upper.proj, TD.lower.proj
    for nm, F, Ft in (("s", D.s, Dt.s), ("t", D.t, Dt.t)):
        # the square must commute, ~F o pu == pl o F, before comparing with the pullback
        comm = next(((m,) for m in D.vertical.morphisms() if Ft(pu(m)) != pl(F(m))), None)
        if comm is not None:
            rep.add(f"pullback-square:{nm}", False, f"N={DQ.lower.N} square does not commute", comm)
            continue
        pb = pullback(Ft, pl, f"pb[{nm}]")
        cmp_ = Functor.from_callables(D.vertical, pb.cat, lambda a: (a, a),
                                      lambda m, F=F: (pu(m), F(m)), f"compare[{nm}]")
        sub = validate_functor(cmp_)
        sub.extend(check_isomorphism(cmp_))
        w = next((c.witness for c in sub.failures()), None)
        rep.add(f"pullback-square:{nm}", sub.passed, f"N={DQ.lower.N}", w)
    return rep


def verify_icong_inert(T: TildeQuotal) -> Report:
    """(rho_{x(i)}, [x]) ~ (rho_i, [rho_i^* delta_i^*(x)]) in the tilde quotient."""
    Q = T.source
    G = Q.operad
    bad = None
    for n in range(1, Q.N + 1):
        for x in G.elements(n):
            p = G.to_perm(x)
            for i in range(1, n + 1):
                r_i = rho(i, n)
                d_i = classify_and_factorize(r_i).delta
                lhs = Q.label(rho(p[i - 1], n), x)
                rhs = Q.label(r_i, G.pullback(r_i, G.pullback(d_i, x)))
                if T.quotient.cls[lhs] != T.quotient.cls[rhs]:
                    bad = bad or (n, x, i)
    rep = Report()
    rep.add("icong-inert", bad is None, f"N={Q.N}", bad)
    return rep


def verify_quotal_faithful(Q: QuotalCategory) -> Report:
    """The composite from the plain interval category is faithful and conservative."""
    G = Q.operad
    rep = Report()
    faithful = None
    for (m, n), hs in Q.cat.homs.items():
        imgs = [Q.label(f, G.unit(m)) for f in enumerate_morphisms(m, n)]
        if len(set(imgs)) != len(imgs):
            faithful = (m, n)
    rep.add("quotal:faithful", faithful is None, f"N={Q.N}", faithful)
    # the only isomorphisms of the interval category are identities
    cons = None
    for n in range(Q.N + 1):
        for f in enumerate_morphisms(n, n):
            lab = Q.label(f, G.unit(n))
            has_inv = any(Q.cat.compose(g, lab) == Q.cat.identity(n) and Q.cat.compose(lab, g) == Q.cat.identity(n)
                          for g in Q.cat.hom(n, n))
            if has_inv and f != identity(n):
                cons = cons or f
    rep.add("quotal:conservative", cons is None, f"N={Q.N}", cons)
    return rep


def order_functor(Q: QuotalCategory, Q2: QuotalCategory) -> Functor:
    """For K contained in K', the functor Q_K -> Q_K' commuting with projections."""
    return Functor.from_callables(Q.cat, Q2.cat, lambda a: a, lambda m: Q2.label(m[0], m[1]),
                                  f"{Q.family.name}->{Q2.family.name}")


def inert_class(m) -> bool:
    return is_inert(m[0])


def active_class(m) -> bool:
    return is_active(m[0])
