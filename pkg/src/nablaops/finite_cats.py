"""Explicit finite categories, functors, quotients, pullbacks, double
categories and internal presheaves, with exhaustive validators.

Composition is given by a callable and materialized lazily into numpy
tables, one per object triple (a, b, c): ``table[g, f]`` is the index in
``hom(a, c)`` of ``g o f`` for ``f`` in ``hom(a, b)`` and ``g`` in ``hom(b, c)``.
Validators work on those tables.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Mapping

import numpy as np

from .report import Report

Label = Hashable

# above this many entries the associativity check is chunked along the outer index
_CHUNK = 2_000_000


class CompositionError(ValueError):
    pass


class LeftCancellationError(ValueError):
    def __init__(self, msg, witness):
        super().__init__(msg)
        self.witness = witness


class FinCategory:
    """A finite category with globally unique, hashable morphism labels."""

    def __init__(self, objects: Iterable, homs: Mapping, identities: Mapping,
                 compose: Callable[[Label, Label], Label], name: str = ""):
        self.objects = list(objects)
        self.name = name
        self.homs: dict[tuple, list] = {}
        self._index: dict[Label, tuple] = {}
        for a in self.objects:
            for b in self.objects:
                hs = list(homs.get((a, b), ()))
                self.homs[(a, b)] = hs
                for i, f in enumerate(hs):
                    if f in self._index:
                        raise ValueError(f"label {f!r} appears twice")
                    self._index[f] = (a, b, i)
        self.identities = dict(identities)
        self._compose = compose
        self._tables: dict[tuple, np.ndarray] = {}

    def __repr__(self):
        return f"FinCategory({self.name!r}, objects={len(self.objects)}, morphisms={len(self._index)})"

    def hom(self, a, b) -> list:
        return self.homs.get((a, b), [])

    def src(self, f) -> Hashable:
        return self._index[f][0]

    def tgt(self, f) -> Hashable:
        return self._index[f][1]

    def position(self, f) -> int:
        return self._index[f][2]

    def __contains__(self, f) -> bool:
        return f in self._index

    def identity(self, a) -> Label:
        return self.identities[a]

    def morphisms(self) -> Iterator[Label]:
        for hs in self.homs.values():
            yield from hs

    @property
    def n_morphisms(self) -> int:
        return len(self._index)

    def compose(self, g: Label, f: Label) -> Label:
        a, b, i = self._index[f]
        b2, c, j = self._index[g]
        if b != b2:
            raise CompositionError(f"{g!r} o {f!r}: target {b!r} != source {b2!r}")
        t = self._tables.get((a, b, c))
        if t is not None:
            return self.homs[(a, c)][t[j, i]]
        return self._compose(g, f)

    def table(self, a, b, c) -> np.ndarray:
        key = (a, b, c)
        t = self._tables.get(key)
        if t is None:
            fs, gs = self.homs[(a, b)], self.homs[(b, c)]
            t = np.empty((len(gs), len(fs)), dtype=np.int32)
            idx = self._index
            for j, g in enumerate(gs):
                for i, f in enumerate(fs):
                    h = self._compose(g, f)
                    loc = idx.get(h)
                    if loc is None or loc[0] != a or loc[1] != c:
                        raise CompositionError(f"{g!r} o {f!r} = {h!r} is not in hom({a!r}, {c!r})")
                    t[j, i] = loc[2]
            self._tables[key] = t
        return t

    def hom_size(self, a, b) -> int:
        return len(self.homs[(a, b)])

    def identity_index(self, a) -> int:
        return self._index[self.identities[a]][2]


def category_from_table(objects, homs, identities, table: Mapping, name: str = "") -> FinCategory:
    """Category whose composition is an explicit dict ``(g, f) -> g o f``."""
    return FinCategory(objects, homs, identities, lambda g, f: table[(g, f)], name)


def monoid_category(elements, unit, mul: Callable, name: str = "") -> FinCategory:
    """One-object category of a monoid; labels are ``(name, element)``."""
    return FinCategory(["*"], {("*", "*"): [(name, x) for x in elements]}, {"*": (name, unit)},
                       lambda g, f: (name, mul(g[1], f[1])), name)


# -- validation -------------------------------------------------------------

def validate_category(C: FinCategory) -> Report:
    rep = Report()
    objs = C.objects
    bad_ident = None
    for a in objs:
        ida = C.identities.get(a)
        if ida is None or ida not in C or C.src(ida) != a or C.tgt(ida) != a:
            bad_ident = bad_ident or (a,)
    rep.add("category:identities", bad_ident is None, C.name, bad_ident)
    if bad_ident is not None:
        return rep
    bad_closure = None
    try:
        for a in objs:
            for b in objs:
                for c in objs:
                    C.table(a, b, c)
    except CompositionError as exc:
        bad_closure = str(exc)
    rep.add("category:closure", bad_closure is None, C.name, bad_closure)
    if bad_closure is not None:
        return rep
    bad_unit = None
    for a in objs:
        ia = C.identity_index(a)
        for b in objs:
            n = C.hom_size(a, b)
            if n == 0:
                continue
            ar = np.arange(n)
            if not np.array_equal(C.table(a, a, b)[:, ia], ar):
                k = int(np.nonzero(C.table(a, a, b)[:, ia] != ar)[0][0])
                bad_unit = bad_unit or ("right", C.hom(a, b)[k])
            if not np.array_equal(C.table(a, b, b)[C.identity_index(b), :], ar):
                k = int(np.nonzero(C.table(a, b, b)[C.identity_index(b), :] != ar)[0][0])
                bad_unit = bad_unit or ("left", C.hom(a, b)[k])
    rep.add("category:units", bad_unit is None, C.name, bad_unit)
    bad_assoc = _check_assoc(C)
    rep.add("category:assoc", bad_assoc is None, C.name, bad_assoc)
    return rep


def _check_assoc(C: FinCategory):
    objs = C.objects
    nonempty = {k for k, v in C.homs.items() if v}
    for a in objs:
        for b in objs:
            if (a, b) not in nonempty:
                continue
            for c in objs:
                if (b, c) not in nonempty:
                    continue
                t_abc = C.table(a, b, c)
                for d in objs:
                    if (c, d) not in nonempty:
                        continue
                    t_bcd, t_abd, t_acd = C.table(b, c, d), C.table(a, b, d), C.table(a, c, d)
                    nh = t_bcd.shape[0]
                    step = max(1, _CHUNK // max(1, t_abc.size))
                    for h0 in range(0, nh, step):
                        sl = slice(h0, h0 + step)
                        lhs = t_abd[t_bcd[sl, :, None], np.arange(t_abc.shape[1])[None, None, :]]
                        rhs = t_acd[np.arange(h0, min(nh, h0 + step))[:, None, None], t_abc[None, :, :]]
                        if not np.array_equal(lhs, rhs):
                            h, g, f = (int(v[0]) for v in np.nonzero(lhs != rhs))
                            return (C.hom(c, d)[h0 + h], C.hom(b, c)[g], C.hom(a, b)[f])
    return None


@dataclass
class Functor:
    source: FinCategory
    target: FinCategory
    obj_map: dict
    mor_map: dict
    name: str = ""

    def __call__(self, f):
        return self.mor_map[f]

    def on_object(self, a):
        return self.obj_map[a]

    @classmethod
    def from_callables(cls, source, target, obj_fn, mor_fn, name=""):
        return cls(source, target, {a: obj_fn(a) for a in source.objects},
                   {f: mor_fn(f) for f in source.morphisms()}, name)

    def hom_indices(self, a, b) -> np.ndarray:
        T = self.target
        fa, fb = self.obj_map[a], self.obj_map[b]
        out = np.empty(self.source.hom_size(a, b), dtype=np.int64)
        for i, f in enumerate(self.source.hom(a, b)):
            g = self.mor_map[f]
            if T.src(g) != fa or T.tgt(g) != fb:
                raise CompositionError(f"{f!r} maps to {g!r} outside hom({fa!r}, {fb!r})")
            out[i] = T.position(g)
        return out


def identity_functor(C: FinCategory) -> Functor:
    return Functor(C, C, {a: a for a in C.objects}, {f: f for f in C.morphisms()}, f"id[{C.name}]")


def compose_functors(G: Functor, F: Functor) -> Functor:
    return Functor(F.source, G.target, {a: G.obj_map[F.obj_map[a]] for a in F.source.objects},
                   {f: G.mor_map[F.mor_map[f]] for f in F.source.morphisms()}, f"{G.name}.{F.name}")


def validate_functor(F: Functor) -> Report:
    rep = Report()
    S, T = F.source, F.target
    bad = next(((a,) for a in S.objects if F.obj_map.get(a) not in set(T.objects)), None)
    bad = bad or next(((f,) for f in S.morphisms() if F.mor_map.get(f) not in T), None)
    if bad is None:
        try:
            idx = {(a, b): F.hom_indices(a, b) for a in S.objects for b in S.objects}
        except CompositionError as exc:
            bad = str(exc)
    rep.add("functor:typed", bad is None, F.name, bad)
    if bad is not None:
        return rep
    bad_id = next(((a,) for a in S.objects
                   if F.mor_map[S.identities[a]] != T.identities[F.obj_map[a]]), None)
    rep.add("functor:identities", bad_id is None, F.name, bad_id)
    bad_comp = None
    for a in S.objects:
        for b in S.objects:
            if not S.hom_size(a, b):
                continue
            for c in S.objects:
                if not S.hom_size(b, c):
                    continue
                t = S.table(a, b, c)
                fa, fb, fc = (F.obj_map[x] for x in (a, b, c))
                lhs = idx[(a, c)][t]
                rhs = T.table(fa, fb, fc)[idx[(b, c)][:, None], idx[(a, b)][None, :]]
                if not np.array_equal(lhs, rhs):
                    g, f = (int(v[0]) for v in np.nonzero(lhs != rhs))
                    bad_comp = (S.hom(b, c)[g], S.hom(a, b)[f])
                    break
            if bad_comp:
                break
        if bad_comp:
            break
    rep.add("functor:composition", bad_comp is None, F.name, bad_comp)
    return rep


# -- quotients --------------------------------------------------------------

@dataclass
class Quotient:
    cat: FinCategory
    proj: Functor
    cls: dict          # original label -> class label (a representative)
    members: dict      # class label -> list of original labels


def quotient(C: FinCategory, key: Callable[[Label], Hashable], name: str = "") -> Quotient:
    """Quotient identifying morphisms in the same hom with equal ``key``.

    Class labels are the first member in hom order. Composition goes through
    representatives; validate ``proj`` to confirm the relation is a congruence.
    """
    cls, members, homs = {}, {}, {}
    for (a, b), hs in C.homs.items():
        first: dict = {}
        out = []
        for f in hs:
            k = key(f)
            r = first.get(k)
            if r is None:
                first[k] = r = f
                out.append(f)
                members[f] = []
            cls[f] = r
            members[r].append(f)
        homs[(a, b)] = out
    ids = {a: cls[C.identities[a]] for a in C.objects}
    Q = FinCategory(C.objects, homs, ids, lambda g, f: cls[C.compose(g, f)], name or f"{C.name}/~")
    proj = Functor(C, Q, {a: a for a in C.objects}, dict(cls), f"proj[{Q.name}]")
    return Quotient(Q, proj, cls, members)


def _class_membership(C: FinCategory, M) -> dict:
    pred = M if callable(M) else (lambda f, S=frozenset(M): f in S)
    return {k: np.array([bool(pred(f)) for f in hs], dtype=bool) for k, hs in C.homs.items()}


def check_left_cancellative(C: FinCategory, M) -> tuple | None:
    """Return a witness (d, e) with d o e in M but e not in M, or None.

    This is the direction that makes the relation compatible with
    postcomposition: (g a) b in M forces a b in M.
    """
    inM = _class_membership(C, M)
    for a in C.objects:
        for b in C.objects:
            if not C.hom_size(a, b):
                continue
            for c in C.objects:
                if not C.hom_size(b, c):
                    continue
                hit = inM[(a, c)][C.table(a, b, c)]
                bad = hit & ~inM[(a, b)][None, :]
                if bad.any():
                    g, f = (int(v[0]) for v in np.nonzero(bad))
                    return (C.hom(b, c)[g], C.hom(a, b)[f])
    return None


def lcancel_signatures(C: FinCategory, M, a, b) -> list[bytes]:
    """Per morphism in hom(a, b): its composites with every incoming beta,
    with composites outside M masked. Equal signatures are exactly the
    relation alpha ~ alpha' of the left-cancellative quotient."""
    inM = _class_membership(C, M) if not isinstance(M, dict) else M
    parts = []
    for c in C.objects:
        if not C.hom_size(c, a):
            continue
        t = C.table(c, a, b).astype(np.int64)
        parts.append(np.where(inM[(c, b)][t], t, -1))
    n = C.hom_size(a, b)
    if not parts:
        return [b""] * n
    sig = np.concatenate(parts, axis=1)
    return [sig[i].tobytes() for i in range(n)]


def quotient_left_cancellative(C: FinCategory, M, name: str = "") -> Quotient:
    """Quotient by alpha ~ alpha' iff alpha beta = alpha' beta whenever either
    composite lies in M, for every beta present in C."""
    w = check_left_cancellative(C, M)
    if w is not None:
        raise LeftCancellationError(f"class is not left cancellative: {w!r}", w)
    inM = _class_membership(C, M)
    sig = {}
    for (a, b) in C.homs:
        for f, s in zip(C.homs[(a, b)], lcancel_signatures(C, inM, a, b)):
            sig[f] = s
    return quotient(C, lambda f: sig[f], name or f"{C.name}/~M")


# -- pullbacks --------------------------------------------------------------

@dataclass
class Pullback:
    cat: FinCategory
    left: Functor
    right: Functor


def pullback(F: Functor, G: Functor, name: str = "") -> Pullback:
    """Objects and morphisms are pairs with equal images in the common target."""
    if F.target is not G.target:
        raise ValueError("pullback needs a common codomain")
    A, B = F.source, G.source
    by_obj = defaultdict(list)
    for b in B.objects:
        by_obj[G.obj_map[b]].append(b)
    objects = [(a, b) for a in A.objects for b in by_obj[F.obj_map[a]]]
    homs = {}
    for (a, b) in objects:
        for (a2, b2) in objects:
            gidx = defaultdict(list)
            for g in B.hom(b, b2):
                gidx[G.mor_map[g]].append(g)
            homs[((a, b), (a2, b2))] = [(f, g) for f in A.hom(a, a2) for g in gidx.get(F.mor_map[f], ())]
    ids = {(a, b): (A.identities[a], B.identities[b]) for (a, b) in objects}
    P = FinCategory(objects, homs, ids,
                    lambda q, p: (A.compose(q[0], p[0]), B.compose(q[1], p[1])),
                    name or f"{A.name}x{B.name}")
    left = Functor(P, A, {o: o[0] for o in objects}, {m: m[0] for m in P.morphisms()}, "pr1")
    right = Functor(P, B, {o: o[1] for o in objects}, {m: m[1] for m in P.morphisms()}, "pr2")
    return Pullback(P, left, right)


def product(A: FinCategory, B: FinCategory, name: str = "") -> FinCategory:
    homs = {((a, b), (a2, b2)): [(f, g) for f in A.hom(a, a2) for g in B.hom(b, b2)]
            for a in A.objects for b in B.objects for a2 in A.objects for b2 in B.objects}
    objects = [(a, b) for a in A.objects for b in B.objects]
    ids = {(a, b): (A.identities[a], B.identities[b]) for (a, b) in objects}
    return FinCategory(objects, homs, ids, lambda q, p: (A.compose(q[0], p[0]), B.compose(q[1], p[1])),
                       name or f"{A.name}x{B.name}")


def power(A: FinCategory, n: int) -> FinCategory:
    """n-fold product with objects and morphisms as flat n-tuples."""
    objects = list(itertools.product(A.objects, repeat=n))
    homs = {(x, y): list(itertools.product(*(A.hom(a, b) for a, b in zip(x, y))))
            for x in objects for y in objects}
    ids = {x: tuple(A.identities[a] for a in x) for x in objects}
    return FinCategory(objects, homs, ids, lambda q, p: tuple(A.compose(g, f) for g, f in zip(q, p)),
                       f"{A.name}^{n}")


# -- double categories and internal presheaves ------------------------------

@dataclass
class DoubleCategory:
    """An internal category: vertical arrows ``vertical`` over ``base``."""
    vertical: FinCategory
    base: FinCategory
    s: Functor
    t: Functor
    comp: Functor      # source is pullback(s, t): pairs (alpha, beta) with s(alpha) = t(beta)
    unit: Functor
    composable: Pullback


@dataclass
class InternalPresheaf:
    carrier: FinCategory
    anchor: Functor
    action: Functor    # source is pullback(anchor, t): pairs (xi, alpha) with anchor(xi) = t(alpha)
    domain: Pullback


def _check_equal_maps(rep, id, pairs, detail=""):
    bad = next(((x, l, r) for x, l, r in pairs if l != r), None)
    rep.add(id, bad is None, detail, bad)


def check_double_category(D: DoubleCategory) -> Report:
    rep = Report()
    V, B = D.vertical, D.base
    for F, nm in ((D.s, "s"), (D.t, "t"), (D.unit, "unit"), (D.comp, "comp")):
        rep.extend(validate_functor(F), prefix=f"double:{nm}:")
    if not rep.passed:
        return rep
    s, t, u, c = D.s, D.t, D.unit, D.comp
    P = D.composable.cat
    _check_equal_maps(rep, "double:unit-source", (
        [(a, s.obj_map[u.obj_map[a]], a) for a in B.objects]
        + [(f, s(u(f)), f) for f in B.morphisms()]), B.name)
    _check_equal_maps(rep, "double:unit-target", (
        [(a, t.obj_map[u.obj_map[a]], a) for a in B.objects]
        + [(f, t(u(f)), f) for f in B.morphisms()]), B.name)
    _check_equal_maps(rep, "double:comp-source", (
        [(p, s.obj_map[c.obj_map[p]], s.obj_map[p[1]]) for p in P.objects]
        + [(p, s(c(p)), s(p[1])) for p in P.morphisms()]))
    _check_equal_maps(rep, "double:comp-target", (
        [(p, t.obj_map[c.obj_map[p]], t.obj_map[p[0]]) for p in P.objects]
        + [(p, t(c(p)), t(p[0])) for p in P.morphisms()]))

    def units():
        for a in V.objects:
            yield a, c.obj_map[(u.obj_map[t.obj_map[a]], a)], a
            yield a, c.obj_map[(a, u.obj_map[s.obj_map[a]])], a
        for f in V.morphisms():
            yield f, c((u(t(f)), f)), f
            yield f, c((f, u(s(f)))), f
    _check_equal_maps(rep, "double:unit-law", units())

    def assoc_triples():
        for items, cmap, smap, tmap in (
            (V.objects, lambda p: c.obj_map[p], lambda x: s.obj_map[x], lambda x: t.obj_map[x]),
            (list(V.morphisms()), c, s, t),
        ):
            by_s, by_t = defaultdict(list), defaultdict(list)
            for x in items:
                by_s[smap(x)].append(x)
                by_t[tmap(x)].append(x)
            for b in items:
                # a sits above b (s(a) = t(b)), d sits below b (t(d) = s(b))
                for a in by_s[tmap(b)]:
                    ab = cmap((a, b))
                    for d in by_t[smap(b)]:
                        yield (a, b, d), cmap((ab, d)), cmap((a, cmap((b, d))))
    _check_equal_maps(rep, "double:assoc", assoc_triples())
    return rep


def check_internal_presheaf(P: InternalPresheaf, D: DoubleCategory) -> Report:
    rep = Report()
    if P.anchor.target is not D.base:
        rep.add("presheaf:anchor-target", False, "anchor does not land in the base")
        return rep
    rep.extend(validate_functor(P.anchor), prefix="presheaf:anchor:")
    rep.extend(validate_functor(P.action), prefix="presheaf:action:")
    if not rep.passed:
        return rep
    X = P.carrier
    pi, act = P.anchor, P.action
    s, t, c, u = D.s, D.t, D.comp, D.unit
    levels = (
        (X.objects, list(D.vertical.objects), lambda q: act.obj_map[q], lambda x: pi.obj_map[x],
         lambda a: s.obj_map[a], lambda a: t.obj_map[a], lambda p: c.obj_map[p], lambda b: u.obj_map[b]),
        (list(X.morphisms()), list(D.vertical.morphisms()), act, pi, s, t, c, u),
    )
    over, unit, assoc = [], [], []
    for xs, alphas, amap, pmap, smap, tmap, cmap, umap in levels:
        by_t, by_s = defaultdict(list), defaultdict(list)
        for a in alphas:
            by_t[tmap(a)].append(a)
            by_s[smap(a)].append(a)
        for x in xs:
            px = pmap(x)
            unit.append((x, amap((x, umap(px))), x))
            for a in by_t[px]:
                xa = amap((x, a))
                over.append(((x, a), pmap(xa), smap(a)))
                for b in by_t[smap(a)]:
                    assoc.append(((x, a, b), amap((xa, b)), amap((x, cmap((a, b))))))
    _check_equal_maps(rep, "presheaf:over-source", over)
    _check_equal_maps(rep, "presheaf:unit", unit)
    _check_equal_maps(rep, "presheaf:assoc", assoc)
    return rep


# -- equivalences -----------------------------------------------------------

def _isomorphisms(C: FinCategory) -> dict:
    """Map (a, b) -> True when a and b are isomorphic."""
    iso = {}
    for a in C.objects:
        for b in C.objects:
            if (a, b) in iso:
                continue
            found = False
            if C.hom_size(a, b) and C.hom_size(b, a):
                ab, ba = C.table(a, b, a), C.table(b, a, b)
                ia, ib = C.identity_index(a), C.identity_index(b)
                # f: a -> b, g: b -> a with g f = id and f g = id
                found = bool(((ab == ia) & (ba.T == ib)).any())
            iso[(a, b)] = iso[(b, a)] = found
    return iso


def equivalence_kind(F: Functor) -> tuple[str, Report]:
    rep = Report()
    S, T = F.source, F.target
    faithful = full = None
    for a in S.objects:
        for b in S.objects:
            idx = F.hom_indices(a, b)
            if len(set(idx.tolist())) != len(idx):
                faithful = faithful or (a, b)
            if len(set(idx.tolist())) != T.hom_size(F.obj_map[a], F.obj_map[b]):
                full = full or (a, b)
    rep.add("equivalence:faithful", faithful is None, F.name, faithful)
    rep.add("equivalence:full", full is None, F.name, full)
    image = set(F.obj_map.values())
    bijective = len(image) == len(S.objects) == len(T.objects)
    missing = [y for y in T.objects if y not in image]
    ess = None
    if missing:
        iso = _isomorphisms(T)
        ess = next((y for y in missing if not any(iso[(y, x)] for x in image)), None)
    rep.add("equivalence:essentially-surjective", ess is None, F.name, ess)
    if faithful is None and full is None and ess is None:
        kind = "iso" if bijective else "equivalence"
    else:
        kind = "neither"
    return kind, rep


def check_equivalence(F: Functor) -> Report:
    """Report faithfulness, fullness, essential surjectivity and a summary
    check ``equivalence`` whose detail is ``kind=iso|equivalence|neither``."""
    kind, rep = equivalence_kind(F)
    rep.add("equivalence", kind != "neither", f"kind={kind}")
    return rep


def check_isomorphism(F: Functor) -> Report:
    kind, rep = equivalence_kind(F)
    rep.add("isomorphism", kind == "iso", f"kind={kind}")
    return rep


# -- factorization systems --------------------------------------------------

def check_orthogonal_factorization(C: FinCategory, left, right, name: str = "") -> Report:
    """Every morphism factors as right o left, and every commuting square
    right o phi = psi o left has exactly one diagonal filler."""
    rep = Report()
    L = _class_membership(C, left)
    R = _class_membership(C, right)
    objs = C.objects
    bad_fact = None
    for a in objs:
        for c in objs:
            n = C.hom_size(a, c)
            if not n:
                continue
            hit = np.zeros(n, dtype=bool)
            for b in objs:
                if C.hom_size(a, b) and C.hom_size(b, c):
                    t = C.table(a, b, c)
                    mask = R[(b, c)][:, None] & L[(a, b)][None, :]
                    hit[t[mask]] = True
            if not hit.all():
                bad_fact = bad_fact or C.hom(a, c)[int(np.nonzero(~hit)[0][0])]
    rep.add(f"{name}factorization:exists", bad_fact is None, C.name, bad_fact)
    bad_orth = None
    for a in objs:
        for b in objs:
            lefts = np.nonzero(L[(a, b)])[0]
            if not len(lefts):
                continue
            for c in objs:
                for d in objs:
                    rights = np.nonzero(R[(c, d)])[0]
                    if not len(rights) or not C.hom_size(a, d):
                        continue
                    t_acd = C.table(a, c, d) if C.hom_size(a, c) else None
                    t_abd = C.table(a, b, d) if C.hom_size(b, d) else None
                    t_abc = C.table(a, b, c) if C.hom_size(b, c) else None
                    t_bcd = C.table(b, c, d) if C.hom_size(b, c) else None
                    nad = C.hom_size(a, d)
                    for li in lefts:
                        cnt_psi = np.bincount(t_abd[:, li], minlength=nad) if t_abd is not None else np.zeros(nad, int)
                        for ri in rights:
                            cnt_phi = np.bincount(t_acd[ri, :], minlength=nad) if t_acd is not None else np.zeros(nad, int)
                            squares = int((cnt_phi * cnt_psi).sum())
                            if t_abc is None:
                                fillers = 0
                                distinct = 0
                            else:
                                pairs = set(zip(t_abc[:, li].tolist(), t_bcd[ri, :].tolist()))
                                fillers = t_abc.shape[0]
                                distinct = len(pairs)
                            if distinct != fillers or distinct != squares:
                                bad_orth = (C.hom(a, b)[li], C.hom(c, d)[ri])
                                break
                        if bad_orth:
                            break
                    if bad_orth:
                        break
                if bad_orth:
                    break
            if bad_orth:
                break
        if bad_orth:
            break
    rep.add(f"{name}factorization:orthogonal", bad_orth is None, C.name, bad_orth)
    return rep


def check_split_epis(C: FinCategory, cls, name: str = "") -> Report:
    rep = Report()
    M = _class_membership(C, cls)
    bad = None
    for a in C.objects:
        for b in C.objects:
            idx = np.nonzero(M[(a, b)])[0]
            if not len(idx):
                continue
            if not C.hom_size(b, a):
                bad = C.hom(a, b)[int(idx[0])]
                break
            t = C.table(b, a, b)
            ib = C.identity_index(b)
            ok = (t[idx, :] == ib).any(axis=1)
            if not ok.all():
                bad = C.hom(a, b)[int(idx[np.nonzero(~ok)[0][0]])]
                break
        if bad:
            break
    rep.add(f"{name}split-epi", bad is None, C.name, bad)
    return rep
