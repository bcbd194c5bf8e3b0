"""Categories of operators built from multicategories, and back.

``wreath`` lays a multicategory M out over the symmetric-operator base:
objects are words in the objects of M, and a morphism is an interval map
with a coset of the base plus one multimorphism per output letter. The
tilde variant identifies morphisms whose bases agree in the tilde
quotient. ``presheaf_action`` turns a G-symmetric structure into an
action of the upper double level, and ``reconstruct`` recovers a
G-symmetric multicategory from any category satisfying the lifting
conditions checked by ``validate_operator_category``.

Universal properties are only checkable on the truncation to words of
length at most N, so the corresponding checks say "up to level N".
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Hashable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .congruence import FamilyKind, builtin_family
from .finite_cats import (
    FinCategory,
    Functor,
    InternalPresheaf,
    Pullback,
    Quotient,
    check_equivalence,
    check_internal_presheaf,
    check_isomorphism,
    power,
    product,
    pullback,
    quotient,
    validate_functor,
)
from .group_operads import GroupOperad, TruncationError, word_fiber
from .interval_cat import block_rho, classify_and_factorize, delta_fiber, diamond, identity, is_inert, mu, rho
from .multicats import (
    FinMulticategory,
    GSymAction,
    Multifunctor,
    identity_multifunctor,
    semidirect,
    semidirect_functor,
    truncate,
    truncate_multifunctor,
    validate_equivariant,
    validate_gsym,
    validate_multicat,
    validate_multifunctor,
)
from .quotal import (
    DoubleQuotal,
    TildeDouble,
    build_double,
    induced_functor,
    induced_on_pullback,
    tilde_double,
)
from .report import Report


class OperatorError(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class ReconstructionError(OperatorError):
    """A lift or fill required by the reconstruction is missing or not unique."""


class Variant(enum.Enum):
    E = "E"
    TILDE_E = "TildeE"
    G_PULL = "GPull"
    TILDE_G_PULL = "TildeGPull"


class WMor(NamedTuple):
    """A morphism ``src -> tgt`` of a wreath category; ``base`` is a label
    ``(phi, x)`` of the symmetric-operator base and ``fs`` has one
    multimorphism per letter of ``tgt``."""
    src: tuple
    tgt: tuple
    base: tuple
    fs: tuple


# -- the base double categories ---------------------------------------------

@dataclass
class Bases:
    """The double category G => E for (DecBar, KecBar) and its tilde quotient."""
    operad: GroupOperad
    N: int
    plain: DoubleQuotal
    tilde: TildeDouble

    @property
    def E(self) -> FinCategory:
        return self.plain.lower.cat

    @property
    def Et(self) -> FinCategory:
        return self.tilde.lower.cat

    @property
    def Gcat(self) -> FinCategory:
        return self.plain.upper.cat

    @property
    def Gt(self) -> FinCategory:
        return self.tilde.upper.cat

    def label(self, phi, x) -> tuple:
        return self.plain.lower.label(phi, x)

    def cls(self, phi, x=None) -> tuple:
        """The tilde class of (phi, [x]); ``x`` defaults to the unit."""
        if x is None:
            x = self.operad.unit(phi.dom_n)
        return self.tilde.lower.quotient.cls[self.label(phi, x)]

    def upper_cls(self, phi, u, x) -> tuple:
        lo = self.plain.lower
        lab = (phi, kernels.coset_min(self.plain.upper.inr.members(phi), u), lo.coset(phi, x))
        return self.tilde.upper.quotient.cls[lab]

    def inert_classes(self) -> set:
        members = self.tilde.lower.quotient.members
        return {c for c, ms in members.items() if any(is_inert(m[0]) for m in ms)}


_BASES: dict = {}


def bases(G: GroupOperad, N: int) -> Bases:
    key = (id(G), N)
    hit = _BASES.get(key)
    if hit is None or hit[0] is not G:
        K = builtin_family(G, FamilyKind.DECBAR)
        L = builtin_family(G, FamilyKind.KECBAR)
        DQ = build_double(G, K, L, N)
        hit = (G, Bases(G, N, DQ, tilde_double(DQ)))
        _BASES[key] = hit
    return hit[1]


# -- wreath categories ------------------------------------------------------

@dataclass
class WreathCategory:
    """``cat`` over ``base`` through ``anchor``. For the tilde variant
    ``plain`` is the untilded category and ``quotient`` the projection; for
    the pullback variants ``pb`` holds the projections."""
    multicat: FinMulticategory
    bases: Bases
    variant: Variant
    cat: FinCategory
    anchor: Functor
    plain: "WreathCategory | None" = None
    quotient: Quotient | None = None
    pb: Pullback | None = None

    @property
    def N(self) -> int:
        return self.bases.N

    @property
    def base(self) -> FinCategory:
        return self.anchor.target


def target_words(G: GroupOperad, word: tuple, phi, x) -> list[tuple]:
    """The fiber words (x_* word)^phi_j, j = 1..n."""
    moved = G.act_word(x, word)
    return [word_fiber(moved, phi, j) for j in range(1, phi.cod_n + 1)]


def _words(M: FinMulticategory, N: int) -> list[tuple]:
    return [w for n in range(N + 1) for w in itertools.product(M.objects, repeat=n)]


def _plain_wreath(M: FinMulticategory, B: Bases) -> WreathCategory:
    G, E, N = B.operad, B.E, B.N
    if M.arity_bound < N:
        raise TruncationError(f"multicategory bound {M.arity_bound} is below the level {N}")
    words = _words(M, N)
    homs = {}
    for a in words:
        for b in words:
            hs = []
            for base in E.hom(len(a), len(b)):
                phi, x = base
                slots = [M.hom(w, bj) for w, bj in zip(target_words(G, a, phi, x), b)]
                hs.extend(WMor(a, b, base, fs) for fs in itertools.product(*slots))
            homs[(a, b)] = hs
    ids = {a: WMor(a, a, E.identity(len(a)), tuple(M.identity(c) for c in a)) for a in words}

    def compose(g, f):
        (psi, y) = g.base
        moved = G.act_word(y, f.fs)
        fs = tuple(M.gamma(gs, word_fiber(moved, psi, s)) for s, gs in enumerate(g.fs, 1))
        return WMor(f.src, g.tgt, E.compose(g.base, f.base), fs)

    cat = FinCategory(words, homs, ids, compose, f"{M.name}~E[{G.name},N={N}]")
    anchor = Functor.from_callables(cat, E, len, lambda m: m.base, "p")
    return WreathCategory(M, B, Variant.E, cat, anchor)


def _tilde_wreath(W: WreathCategory) -> WreathCategory:
    B = W.bases
    cls = B.tilde.lower.quotient.cls
    q = quotient(W.cat, lambda m: (cls[m.base], m.fs), f"{W.multicat.name}~Et[{B.operad.name},N={B.N}]")
    anchor = Functor.from_callables(q.cat, B.Et, len, lambda m: cls[m.base], "p~")
    return WreathCategory(W.multicat, B, Variant.TILDE_E, q.cat, anchor, plain=W, quotient=q)


_WREATHS: dict = {}


def wreath(M: FinMulticategory, G: GroupOperad, variant: Variant | str, N: int) -> WreathCategory:
    """M wreath the base: E, its tilde quotient, or the pullbacks along the
    target functor of the upper level (labels ``(alpha, xi)``)."""
    variant = Variant(variant)
    key = (id(M), id(G), variant, N)
    hit = _WREATHS.get(key)
    if hit is not None and hit[0] is M:
        return hit[1]
    B = bases(G, N)
    if variant is Variant.E:
        W = _plain_wreath(M, B)
    elif variant is Variant.TILDE_E:
        W = _tilde_wreath(wreath(M, G, Variant.E, N))
    else:
        tilde = variant is Variant.TILDE_G_PULL
        low = wreath(M, G, Variant.TILDE_E if tilde else Variant.E, N)
        D = B.tilde.double if tilde else B.plain.double
        pb = pullback(D.t, low.anchor, f"{M.name}~{'Gt' if tilde else 'G'}[N={N}]")
        anchor = Functor.from_callables(pb.cat, D.vertical, lambda o: o[0], lambda m: m[0], "pG")
        W = WreathCategory(M, B, variant, pb.cat, anchor, plain=low, pb=pb)
    _WREATHS[key] = (M, W)
    return W


def wreath_functor(F: Multifunctor, G: GroupOperad, variant: Variant | str, N: int) -> Functor:
    """(phi; f; [x]) -> (phi; F f; [x]) on E or its tilde quotient."""
    variant = Variant(variant)
    S = wreath(F.source, G, Variant.E, N)
    T = wreath(F.target, G, Variant.E, N)

    def word(a):
        return tuple(F.obj_map[c] for c in a)

    plain = Functor.from_callables(
        S.cat, T.cat, word,
        lambda m: WMor(word(m.src), word(m.tgt), m.base, tuple(F.mor_map[f] for f in m.fs)),
        f"{F.name}~E")
    if variant is Variant.E:
        return plain
    if variant is not Variant.TILDE_E:
        raise ValueError(f"functor on variant {variant.value} is not provided")
    St = wreath(F.source, G, Variant.TILDE_E, N)
    Tt = wreath(F.target, G, Variant.TILDE_E, N)
    return induced_functor(plain, St.quotient, Tt.quotient, f"{F.name}~Et")


# -- comparison with the free symmetrization --------------------------------

_SEMIDIRECT: dict = {}


def semidirect_of(M: FinMulticategory, G: GroupOperad) -> FinMulticategory:
    """Memoized ``semidirect`` so that repeated wreaths share one object."""
    key = (id(M), id(G))
    hit = _SEMIDIRECT.get(key)
    if hit is None or hit[0] is not M:
        hit = (M, semidirect(M, G))
        _SEMIDIRECT[key] = hit
    return hit[1]


def fiber_elements(G: GroupOperad, phi, u) -> tuple:
    """(delta_j^* u)_j over the fibers of phi."""
    return tuple(G.pullback(delta_fiber(phi, j), u) for j in range(1, phi.cod_n + 1))


def phi_iso(M: FinMulticategory, G: GroupOperad, tilde: bool = False, N: int = 3,
            verify: bool = False) -> Functor:
    """(phi; f; [u], [x]) -> (phi; (f_j, delta_j^* u)_j; [x]) from the pullback
    variant into the wreath of the free symmetrization."""
    S = wreath(M, G, Variant.G_PULL, N)
    MG = semidirect_of(M, G)
    T = wreath(MG, G, Variant.E, N)

    def mor(m):
        (phi, u, x), xi = m
        return WMor(xi.src, xi.tgt, (phi, x), tuple(zip(xi.fs, fiber_elements(G, phi, u))))

    F = Functor.from_callables(S.cat, T.cat, lambda o: o[1], mor, "Phi")
    if tilde:
        St = wreath(M, G, Variant.TILDE_G_PULL, N)
        Tt = wreath(MG, G, Variant.TILDE_E, N)
        F = induced_on_pullback(F, S.pb, St.pb, S.bases.tilde.upper.quotient, St.plain.quotient,
                                Tt.quotient, "Phi~")
    if verify:
        rep = verify_phi_iso(F)
        if not rep.passed:
            raise OperatorError(f"{F.name} is not an isomorphism", rep.failures()[0].witness)
    return F


def verify_phi_iso(F: Functor) -> Report:
    rep = validate_functor(F)
    if rep.passed:
        rep.extend(check_isomorphism(F))
    return rep


def check_phi_naturality(F: Multifunctor, G: GroupOperad, N: int) -> Report:
    """Phi o (F wr G) == ((F x| G) wr E) o Phi on every morphism."""
    S = wreath(F.source, G, Variant.G_PULL, N)
    FE = wreath_functor(F, G, Variant.E, N)
    FG = semidirect_functor(F, G)
    # reuse the memoized free symmetrizations so that labels line up
    FG = Multifunctor(semidirect_of(F.source, G), semidirect_of(F.target, G), FG.obj_map, FG.mor_map, FG.name)
    FGE = wreath_functor(FG, G, Variant.E, N)
    phi_s, phi_t = phi_iso(F.source, G, False, N), phi_iso(F.target, G, False, N)
    bad = None
    for m in S.cat.morphisms():
        lhs = phi_t((m[0], FE(m[1])))
        rhs = FGE(phi_s(m))
        if lhs != rhs:
            bad = (m,)
            break
    rep = Report()
    rep.add("phi:natural", bad is None, F.name, bad)
    return rep


# -- internal presheaf actions ----------------------------------------------

def presheaf_action(M: FinMulticategory, A: GSymAction, N: int, tilde: bool = True) -> InternalPresheaf:
    """Act componentwise: ((phi; f; [u x]), (phi, [u], [x])) -> (phi; (f_j^{delta_j^* u}); [x])."""
    G = A.operad
    W = wreath(M, G, Variant.E, N)
    D = W.bases.plain.double
    dom = pullback(W.anchor, D.t, f"{W.cat.name}x_E G")

    def mor(p):
        xi, (phi, u, x) = p
        fs = tuple(A(f, y) for f, y in zip(xi.fs, fiber_elements(G, phi, u)))
        return WMor(xi.src, xi.tgt, (phi, x), fs)

    act = Functor.from_callables(dom.cat, W.cat, lambda o: o[0], mor, f"act[{A.name}]")
    if not tilde:
        return InternalPresheaf(W.cat, W.anchor, act, dom)
    Wt = wreath(M, G, Variant.TILDE_E, N)
    Dt = W.bases.tilde.double
    dom_t = pullback(Wt.anchor, Dt.t, f"{Wt.cat.name}x_Et Gt")
    act_t = induced_on_pullback(act, dom, dom_t, Wt.quotient, W.bases.tilde.upper.quotient, Wt.quotient,
                                f"act~[{A.name}]")
    return InternalPresheaf(Wt.cat, Wt.anchor, act_t, dom_t)


# -- coCartesian lifts ------------------------------------------------------

def std_cocart_lift(W: WreathCategory, beta: tuple, word: Sequence) -> Hashable:
    """[rho; id, ..., id; x]: word -> (x_* word) restricted along the inert rho."""
    phi, x = beta
    if not is_inert(phi):
        raise OperatorError(f"{phi!r} is not inert", beta)
    B, M = W.bases, W.multicat
    word = tuple(word)
    tgt = tuple(w[0] for w in target_words(B.operad, word, phi, x))
    label = WMor(word, tgt, B.label(phi, x), tuple(M.identity(c) for c in tgt))
    if W.variant is Variant.TILDE_E:
        return W.quotient.cls[label]
    if W.variant is not Variant.E:
        raise ValueError("standard lifts live in the E or TildeE variants")
    return label


class Anchored:
    """A finite category over a base, with anchor positions cached per hom."""

    def __init__(self, cat: FinCategory, anchor: Functor, level: int):
        self.cat = cat
        self.anchor = anchor
        self.base = anchor.target
        self.level = level
        self._q: dict = {}

    def qpos(self, a, b) -> np.ndarray:
        hit = self._q.get((a, b))
        if hit is None:
            hit = self.anchor.hom_indices(a, b)
            self._q[(a, b)] = hit
        return hit

    def p(self, a):
        return self.anchor.obj_map[a]

    def over(self, a, b, beta) -> list:
        """Morphisms a -> b whose anchor is ``beta``."""
        if self.base.src(beta) != self.p(a) or self.base.tgt(beta) != self.p(b):
            return []
        pos = self.base.position(beta)
        return [self.cat.hom(a, b)[i] for i in np.nonzero(self.qpos(a, b) == pos)[0]]

    def is_cocartesian(self, m) -> tuple | None:
        """None when every (g, chi) with chi o p(m) = p(g) factors uniquely
        through m; otherwise a witness."""
        C, E = self.cat, self.base
        X, Y = C.src(m), C.tgt(m)
        pX, pY = self.p(X), self.p(Y)
        beta = E.position(self.anchor(m))
        mi = C.position(m)
        for Z in C.objects:
            nX, nY = C.hom_size(X, Z), C.hom_size(Y, Z)
            if not nX and not nY:
                continue
            pZ = self.p(Z)
            if nY:
                T = C.table(X, Y, Z)[:, mi].astype(np.int64)
                keys = self.qpos(Y, Z).astype(np.int64) * max(nX, 1) + T
            else:
                keys = np.empty(0, dtype=np.int64)
            nE = E.hom_size(pY, pZ)
            if nE and nX:
                TE = E.table(pX, pY, pZ)[:, beta]
                chi, g = np.nonzero(TE[:, None] == self.qpos(X, Z)[None, :])
                required = chi.astype(np.int64) * nX + g
            else:
                required = np.empty(0, dtype=np.int64)
            uniq = np.unique(keys)
            if len(uniq) != len(keys):
                return (Z, "non-unique-fill")
            if not np.array_equal(uniq, np.unique(required)):
                return (Z, "missing-fill")
        return None


def is_cocartesian(m, cat: FinCategory, anchor: Functor, N: int) -> Report:
    """Universal property of m among all morphisms of the truncation."""
    w = Anchored(cat, anchor, N).is_cocartesian(m)
    rep = Report()
    rep.add("cocartesian", w is None, f"up to level {N}", None if w is None else (m,) + w)
    return rep


# -- operator candidates ----------------------------------------------------

@dataclass
class OperatorCandidate:
    """An internal presheaf over the tilde double category, with a cache of
    the chosen coCartesian lifts keyed by (object, base class)."""
    presheaf: InternalPresheaf
    bases: Bases
    name: str = ""
    lifts: dict = field(default_factory=dict, repr=False)
    _anchored: Anchored | None = field(default=None, repr=False)

    @property
    def cat(self) -> FinCategory:
        return self.presheaf.carrier

    @property
    def anchor(self) -> Functor:
        return self.presheaf.anchor

    @property
    def N(self) -> int:
        return self.bases.N

    @property
    def anchored(self) -> Anchored:
        if self._anchored is None:
            self._anchored = Anchored(self.cat, self.anchor, self.N)
        return self._anchored

    def objects_over(self, n: int) -> list:
        return [X for X in self.cat.objects if self.anchor.obj_map[X] == n]

    def lift(self, X, beta):
        """The first coCartesian morphism out of X over ``beta``, in object
        and hom order, or None."""
        key = (X, beta)
        if key not in self.lifts:
            A = self.anchored
            self.lifts[key] = next((m for Y in self.cat.objects for m in A.over(X, Y, beta)
                                    if A.is_cocartesian(m) is None), None)
        return self.lifts[key]

    def lift_to(self, X, beta, Y):
        """The first coCartesian morphism X -> Y over ``beta``, or None."""
        key = (X, beta, Y)
        if key not in self.lifts:
            A = self.anchored
            self.lifts[key] = next((m for m in A.over(X, Y, beta) if A.is_cocartesian(m) is None), None)
        return self.lifts[key]

    def rho_lifts(self, X) -> list:
        n = self.anchor.obj_map[X]
        return [self.lift(X, self.bases.cls(rho(i, n))) for i in range(1, n + 1)]


def base_candidate(G: GroupOperad, N: int) -> OperatorCandidate:
    """The tilde base over itself, acted on through the source functor."""
    B = bases(G, N)
    D = B.tilde.double
    anchor = Functor(B.Et, B.Et, {a: a for a in B.Et.objects}, {m: m for m in B.Et.morphisms()}, "id")
    dom = pullback(anchor, D.t, "Et x_Et Gt")
    act = Functor.from_callables(dom.cat, B.Et, lambda o: o[0], lambda p: D.s(p[1]), "s")
    return OperatorCandidate(InternalPresheaf(B.Et, anchor, act, dom), B, "Et")


def upper_candidate(G: GroupOperad, N: int) -> OperatorCandidate:
    """The tilde upper level over the base through its source, acted on by composition."""
    B = bases(G, N)
    D = B.tilde.double
    return OperatorCandidate(InternalPresheaf(D.vertical, D.s, D.comp, D.composable), B, "Gt")


def wreath_candidate(M: FinMulticategory, A: GSymAction, N: int) -> OperatorCandidate:
    return OperatorCandidate(presheaf_action(M, A, N, tilde=True), bases(A.operad, N), f"{M.name}~Et")


def thickened_candidate(C: OperatorCandidate, copies: int = 2) -> OperatorCandidate:
    """C times a discrete category: every fiber gets ``copies`` times as many
    objects, so the fiber comparison fails. A negative control."""
    D = FinCategory(range(copies), {(i, i): [("d", i)] for i in range(copies)},
                    {i: ("d", i) for i in range(copies)}, lambda g, f: g, "disc")
    P = product(C.cat, D, f"{C.cat.name}xdisc")
    anchor = Functor.from_callables(P, C.anchor.target, lambda o: C.anchor.obj_map[o[0]],
                                    lambda m: C.anchor(m[0]), "p")
    dom = pullback(anchor, C.bases.tilde.double.t)
    act = C.presheaf.action
    F = Functor.from_callables(dom.cat, P, lambda o: (act.obj_map[(o[0][0], o[1])], o[0][1]),
                               lambda p: (act((p[0][0], p[1])), p[0][1]), "act")
    return OperatorCandidate(InternalPresheaf(P, anchor, F, dom), C.bases, f"{C.name}xdisc")


def fiber_category(C: OperatorCandidate, n: int) -> FinCategory:
    """Objects over n and the morphisms over the identity class."""
    ident = C.bases.cls(identity(n))
    objs = C.objects_over(n)
    A = C.anchored
    homs = {(a, b): A.over(a, b, ident) for a in objs for b in objs}
    return FinCategory(objs, homs, {a: C.cat.identity(a) for a in objs}, C.cat.compose,
                       f"{C.cat.name}_{n}")


def fiber_functor(C: OperatorCandidate, n: int, fibers: dict | None = None) -> Functor:
    """((rho_1)_!, ..., (rho_n)_!) from the fiber over n to the n-th power of
    the fiber over 1, induced by the chosen lifts."""
    fibers = fibers if fibers is not None else {}
    Cn = fibers.get(n) or fiber_category(C, n)
    C1 = fibers.get(1) or fiber_category(C, 1)
    target = power(C1, n)
    lifts = {X: C.rho_lifts(X) for X in Cn.objects}
    obj = {X: tuple(C.cat.tgt(l) for l in lifts[X]) for X in Cn.objects}
    mor = {}
    for f in Cn.morphisms():
        X, Y = Cn.src(f), Cn.tgt(f)
        comps = []
        for i in range(n):
            want = C.cat.compose(lifts[Y][i], f)
            hits = [g for g in C1.hom(obj[X][i], obj[Y][i]) if C.cat.compose(g, lifts[X][i]) == want]
            if len(hits) != 1:
                raise OperatorError(f"{len(hits)} fills for component {i + 1} of {f!r}", (f, i + 1))
            comps.append(hits[0])
        mor[f] = tuple(comps)
    return Functor(Cn, target, obj, mor, f"rho_!^{n}")


def validate_operator_category(C: OperatorCandidate, N: int | None = None,
                               check_presheaf: bool = True) -> Report:
    """Lifting conditions: (i) coCartesian lifts of inert morphisms out of
    every object, (ii) hom sets into an object over n are the pullback of
    hom sets into its rho_i-lifts, (iii) the fiber comparison is an
    equivalence."""
    N = C.N if N is None else N
    level = f"up to level {N}"
    rep = Report()
    rep.extend(validate_functor(C.anchor), prefix="operator:anchor:")
    if check_presheaf:
        rep.extend(check_internal_presheaf(C.presheaf, C.bases.tilde.double), prefix="operator:")
    if not rep.passed:
        return rep
    B, cat, A = C.bases, C.cat, C.anchored
    Et = B.Et
    inert = B.inert_classes()
    missing = None
    for X in cat.objects:
        pX = A.p(X)
        for k in Et.objects:
            for beta in Et.hom(pX, k):
                if beta in inert and C.lift(X, beta) is None:
                    missing = missing or (X, beta)
    rep.add("operator:lifts", missing is None, level, missing)
    if missing is not None:
        return rep

    bad = None
    for X0 in cat.objects:
        n = A.p(X0)
        if n > N:
            continue
        lifts = C.rho_lifts(X0)
        targets = [cat.tgt(l) for l in lifts]
        rhos = [Et.position(B.cls(rho(i, n))) for i in range(1, n + 1)]
        for W in cat.objects:
            pW = A.p(W)
            nE = Et.hom_size(pW, n)
            hs = cat.hom_size(W, X0)
            cols = [A.qpos(W, X0).astype(np.int64)]
            for l, Xi in zip(lifts, targets):
                if hs:
                    cols.append(cat.table(W, X0, Xi)[cat.position(l)].astype(np.int64))
            if hs:
                keys = np.stack(cols, axis=1)
                if len(np.unique(keys, axis=0)) != hs:
                    bad = bad or (X0, W, "not-injective")
            expected = 0
            if nE:
                per = np.ones(nE, dtype=np.int64)
                for r, Xi in zip(rhos, targets):
                    cnt = np.bincount(A.qpos(W, Xi), minlength=Et.hom_size(pW, 1))
                    per *= cnt[Et.table(pW, n, 1)[r]]
                expected = int(per.sum())
            if expected != hs:
                bad = bad or (X0, W, f"homs={hs},families={expected}")
    rep.add("operator:pullback", bad is None, level, bad)

    fibers = {n: fiber_category(C, n) for n in range(N + 1)}
    kinds, bad = [], None
    for n in range(N + 1):
        try:
            F = fiber_functor(C, n, fibers)
        except OperatorError as exc:
            bad = bad or (n, str(exc))
            continue
        sub = check_equivalence(F)
        kind = sub.get("equivalence").detail.split("=", 1)[1]
        kinds.append(f"{n}:{kind}")
        if not sub.passed:
            bad = bad or (n, next(c.id for c in sub.failures()))
    rep.add("operator:fibers", bad is None, f"{' '.join(kinds)} {level}", bad)
    return rep


def check_free_cocart(C: OperatorCandidate) -> Report:
    """The unit C -> C x_Et Gt, xi -> (xi, unit(p xi)), sends the chosen lifts
    of inert morphisms to coCartesian morphisms over the source."""
    D = C.bases.tilde.double
    dom = C.presheaf.domain
    anchor = Functor.from_callables(dom.cat, D.base, lambda o: D.s.obj_map[o[1]], lambda p: D.s(p[1]), "s")
    A = Anchored(dom.cat, anchor, C.N)
    inert = C.bases.inert_classes()
    bad = None
    for (X, beta), m in list(C.lifts.items()):
        if len((X, beta)) != 2 or m is None or beta not in inert:
            continue
        img = (m, D.unit(C.anchor(m)))
        w = A.is_cocartesian(img)
        if w is not None:
            bad = bad or (m,) + w
    rep = Report()
    rep.add("free-cocart", bad is None, f"up to level {C.N}", bad)
    return rep


# -- reconstruction ---------------------------------------------------------

def _unique(cands: list, what: str):
    if len(cands) != 1:
        raise ReconstructionError(f"{len(cands)} candidates for {what}", what)
    return cands[0]


class Reconstruction:
    """The multicategory of an operator candidate.

    Objects are the objects over 1. For a word W, ``varpi(W)`` is the first
    object over len(W), in object order, having coCartesian lifts to each
    letter over the rho_i; the lift chosen for letter i is the first such
    morphism in hom order. Multimorphisms W -> X are the morphisms
    varpi(W) -> X over the class of mu, labelled ``(W, X, morphism)``.
    """

    def __init__(self, C: OperatorCandidate):
        self.C = C
        self.B = C.bases
        self.G = self.B.operad
        self.N = C.N
        self.anchored = C.anchored
        self.objects = C.objects_over(1)
        self._varpi: dict = {}
        self.multicat = self._build_multicat()
        self.action = GSymAction(self.multicat, self.G, self._act, f"transfer[{C.name}]")

    # choices

    def varpi(self, word: tuple):
        word = tuple(word)
        if word not in self._varpi:
            m, C = len(word), self.C
            rhos = [self.B.cls(rho(i, m)) for i in range(1, m + 1)]
            self._varpi[word] = next(
                (Y for Y in C.objects_over(m)
                 if all(C.lift_to(Y, r, w) is not None for r, w in zip(rhos, word))), None)
            if self._varpi[word] is None:
                raise ReconstructionError(f"no object over {m} lifts to {word!r} up to level {self.N}", word)
        return self._varpi[word]

    def word_lift(self, word: tuple, i: int):
        """The chosen lift varpi(word) -> word[i-1] over rho_i."""
        return self.C.lift_to(self.varpi(word), self.B.cls(rho(i, len(word))), word[i - 1])

    def fill(self, src, tgt, beta, conds: list, what: str):
        """The unique morphism g: src -> tgt over ``beta`` with post o g == want
        for every ``(post, want)`` in ``conds``."""
        comp = self.C.cat.compose
        cands = [g for g in self.anchored.over(src, tgt, beta)
                 if all(comp(post, g) == want for post, want in conds)]
        return _unique(cands, what)

    def comparison(self, word: tuple, beta_cls, src):
        """The unique morphism src -> varpi(word) over ``beta_cls`` whose
        composite with each chosen lift is the chosen lift out of src."""
        C, Et = self.C, self.B.Et
        tgt = self.varpi(word)
        conds = []
        for i, w in enumerate(word, 1):
            r = Et.compose(self.B.cls(rho(i, len(word))), beta_cls)
            want = C.lift_to(src, r, w)
            if want is None:
                raise ReconstructionError(f"no lift from {src!r} to {w!r}", (src, w))
            conds.append((self.word_lift(word, i), want))
        return self.fill(src, tgt, beta_cls, conds, f"comparison into {word!r}")

    # the multicategory

    def _build_multicat(self) -> FinMulticategory:
        C, B = self.C, self.B
        morphisms = {}
        for m in range(self.N + 1):
            mu_m = B.cls(mu(m))
            for word in itertools.product(self.objects, repeat=m):
                Y = self.varpi(word)
                for X in self.objects:
                    for c in self.anchored.over(Y, X, mu_m):
                        morphisms[(word, X, c)] = (word, X)
        ids = {X: ((X,), X, self.word_lift((X,), 1)) for X in self.objects}
        return FinMulticategory(self.objects, morphisms, ids, self._gamma, self.N, f"M[{C.name}]")

    def _gamma(self, f, gs):
        C, B = self.C, self.B
        comp = C.cat.compose
        outer, X, c = f
        ks = [len(g[0]) for g in gs]
        V = tuple(a for g in gs for a in g[0])
        YV = self.varpi(V)
        hs, off = [], 0
        for i, (Wi, Xi, ci) in enumerate(gs, 1):
            beta = B.cls(block_rho(ks, i))
            conds = [(self.word_lift(Wi, j), self.word_lift(V, off + j)) for j in range(1, ks[i - 1] + 1)]
            hs.append(self.fill(YV, self.varpi(Wi), beta, conds, f"block {i} of {V!r}"))
            off += ks[i - 1]
        conds = [(self.word_lift(outer, i), comp(ci, hi)) for i, ((_, _, ci), hi) in enumerate(zip(gs, hs), 1)]
        g = self.fill(YV, self.varpi(outer), B.cls(diamond([mu(k) for k in ks])), conds, f"gamma over {V!r}")
        return (V, X, comp(c, g))

    def _act(self, f, x):
        C, B, G = self.C, self.B, self.G
        word, X, c = f
        m = len(word)
        if m <= 1:
            return f
        p = G.to_perm(x)
        moved = tuple(word[p[i] - 1] for i in range(m))
        theta = self.comparison(word, B.cls(identity(m), x), self.varpi(moved))
        xi = C.cat.compose(c, theta)
        alpha = B.upper_cls(mu(m), x, G.unit(m))
        return (moved, X, C.presheaf.action((xi, alpha)))

    # the connecting functor

    def connecting_functor(self) -> Functor:
        """P: M_C wr Et -> C, objects W -> varpi(W); a morphism [phi; f; x]
        goes to the unique fill over [phi, x] whose rho_j-components are
        f_j composed with the comparison into the j-th fiber word."""
        C, B, G = self.C, self.B, self.G
        W = wreath(self.multicat, G, Variant.TILDE_E, self.N)
        E = B.E
        comp = C.cat.compose

        def mor(m):
            phi, x = m.base
            beta = B.cls(phi, x)
            src = self.varpi(m.src)
            conds = []
            for j, (Uj, Vj, cj) in enumerate(m.fs, 1):
                # rho_j o [phi, x] = [mu, e] o [inert part, x]
                r_j = E.compose(B.label(rho(j, phi.cod_n), G.unit(phi.cod_n)), B.label(phi, x))
                iota = B.cls(classify_and_factorize(r_j[0]).rho, x)
                to_fiber = self.comparison(Uj, iota, src)
                conds.append((self.word_lift(m.tgt, j), comp(cj, to_fiber)))
            return self.fill(src, self.varpi(m.tgt), beta, conds, f"P at {m!r}")

        return Functor.from_callables(W.cat, C.cat, self.varpi, mor, "P")


def reconstruct(C: OperatorCandidate, N: int | None = None) -> tuple[FinMulticategory, GSymAction]:
    if N is not None and N != C.N:
        raise ValueError(f"candidate is built at level {C.N}, not {N}")
    R = Reconstruction(C)
    return R.multicat, R.action


# -- the round trip ---------------------------------------------------------

def _as_tilde(W: WreathCategory, label: WMor):
    return W.quotient.cls[label]


def adapters(H: Functor, S: WreathCategory, T: WreathCategory, word: tuple):
    """lambda_word: H(a_1)...H(a_m) -> H(a_1...a_m), assembled from the unique
    lambda_i with std-lift_i o H(std-lift_i) restricted accordingly."""
    B, G = S.bases, S.bases.operad
    Hw = H.obj_map[word]
    comps = []
    for i, a in enumerate(word, 1):
        r = B.label(rho(i, len(word)), G.unit(len(word)))
        want = std_cocart_lift(T, r, Hw)
        src = H.obj_map[(a,)]
        image = H(std_cocart_lift(S, r, word))
        hits = [l for l in T.cat.hom(src, (Hw[i - 1],)) if T.cat.compose(l, image) == want]
        comps.append(_unique(hits, f"adapter {i} of {word!r}").fs[0])
    src = tuple(H.obj_map[(a,)][0] for a in word)
    return _as_tilde(T, WMor(src, Hw, B.E.identity(len(word)), tuple(comps)))


def theta(H: Functor, S: WreathCategory, T: WreathCategory) -> Multifunctor:
    """The multifunctor recovered from a map of operator categories:
    f -> the component of H([mu; f; e]) o lambda."""
    M, Mt = S.multicat, T.multicat
    B, G = S.bases, S.bases.operad
    obj = {}
    for a in M.objects:
        img = H.obj_map[(a,)]
        if len(img) != 1:
            raise OperatorError(f"{H.name} sends the letter {a!r} to {img!r}", a)
        obj[a] = img[0]
    mor = {}
    for f, (ins, out) in M.morphisms.items():
        m = len(ins)
        top = H(_as_tilde(S, WMor(ins, (out,), B.label(mu(m), G.unit(m)), (f,))))
        res = T.cat.compose(top, adapters(H, S, T, ins))
        if T.anchor(res) != B.cls(mu(m)):
            raise OperatorError(f"{H.name} moves {f!r} off the active class", f)
        mor[f] = res.fs[0]
    return Multifunctor(M, Mt, obj, mor, f"Theta[{H.name}]")


def check_adapters(H: Functor, S: WreathCategory, T: WreathCategory) -> Report:
    """lambda commutes with the standard lifts along every inert class."""
    B = S.bases
    Et = B.Et
    inert = B.inert_classes()
    bad = None
    for word in S.cat.objects:
        lam = adapters(H, S, T, word)
        letters = T.cat.src(lam)
        for k in Et.objects:
            for beta in Et.hom(len(word), k):
                if beta not in inert or bad:
                    continue
                rep = next(m for m in B.tilde.lower.quotient.members[beta] if is_inert(m[0]))
                lift = std_cocart_lift(S, rep, word)
                lhs = T.cat.compose(H(lift), lam)
                rhs = T.cat.compose(adapters(H, S, T, S.cat.tgt(lift)), std_cocart_lift(T, rep, letters))
                if lhs != rhs:
                    bad = (word, beta)
    rep = Report()
    rep.add("roundtrip:adapters", bad is None, f"{H.name} up to level {S.N}", bad)
    return rep


def comparison_multifunctor(R: Reconstruction, W: WreathCategory) -> Multifunctor:
    """M -> M_C: a -> (a), f -> [mu; f; e] o lambda with lambda the comparison
    from varpi((a_1)...(a_m)) to a_1...a_m over the identity."""
    M, B, G = W.multicat, W.bases, W.bases.operad
    C = R.C
    obj = {a: (a,) for a in M.objects}
    mor = {}
    for f, (ins, out) in M.morphisms.items():
        m = len(ins)
        word = tuple((a,) for a in ins)
        Y = R.varpi(word)
        conds = [(std_cocart_lift(W, B.label(rho(i, m), G.unit(m)), ins), R.word_lift(word, i))
                 for i in range(1, m + 1)]
        lam = R.fill(Y, ins, B.cls(identity(m)), conds, f"comparison at {ins!r}")
        top = _as_tilde(W, WMor(ins, (out,), B.label(mu(m), G.unit(m)), (f,)))
        mor[f] = (word, (out,), C.cat.compose(top, lam))
    return Multifunctor(M, R.multicat, obj, mor, "K")


def check_multicat_isomorphism(K: Multifunctor) -> Report:
    S, T = K.source, K.target
    rep = Report()
    objs = set(K.obj_map.values())
    rep.add("multicat-iso:objects", len(objs) == len(S.objects) == len(T.objects), K.name)
    imgs = list(K.mor_map.values())
    ok = len(set(imgs)) == len(imgs) == len(T.morphisms) and set(imgs) == set(T.morphisms)
    rep.add("multicat-iso:multihoms", ok, f"{len(set(imgs))}/{len(T.morphisms)}")
    return rep


def roundtrip(M: FinMulticategory, A: GSymAction, N: int,
              functors: Sequence[tuple[Multifunctor, GSymAction]] = ()) -> Report:
    """Build M wr Et, reconstruct, compare with M, and recover each sample
    multifunctor F from its induced functor on wreaths. Operations above
    arity N are dropped first, since the wreath cannot see them."""
    G = A.operad
    if M.arity_bound > max(N, 1):
        M = truncate(M, N)
        A = GSymAction(M, G, A.act, A.name)
        cut = []
        for F, B in functors:
            T = truncate(F.target, N)
            cut.append((truncate_multifunctor(F, M, T), GSymAction(T, B.operad, B.act, B.name)))
        functors = cut
    rep = Report()
    C = wreath_candidate(M, A, N)
    rep.extend(validate_operator_category(C), prefix="roundtrip:")
    if not rep.passed:
        return rep
    R = Reconstruction(C)
    rep.extend(validate_multicat(R.multicat), prefix="roundtrip:")
    rep.extend(validate_gsym(R.multicat, R.action), prefix="roundtrip:")
    P = R.connecting_functor()
    rep.extend(validate_functor(P), prefix="roundtrip:P:")
    rep.extend(check_equivalence(P), prefix="roundtrip:P:")
    W = wreath(M, G, Variant.TILDE_E, N)
    K = comparison_multifunctor(R, W)
    rep.extend(validate_multifunctor(K), prefix="roundtrip:K:")
    rep.extend(check_multicat_isomorphism(K), prefix="roundtrip:K:")
    rep.extend(validate_equivariant(K, A, R.action), prefix="roundtrip:K:")
    for F, B_act in [(identity_multifunctor(M), A), *functors]:
        T = wreath(F.target, G, Variant.TILDE_E, N)
        H = wreath_functor(F, G, Variant.TILDE_E, N)
        Th = theta(H, W, T)
        same = Th.obj_map == F.obj_map and Th.mor_map == F.mor_map
        w = None if same else next(((f,) for f in F.mor_map if Th.mor_map[f] != F.mor_map[f]), ("objects",))
        rep.add(f"roundtrip:theta[{F.name}]", same, f"up to level {N}", w)
        rep.extend(check_adapters(H, W, T))
    return rep
