"""Finite multicategories, group-operad actions on them, and the free
symmetrization M x| G.

Multimorphisms are hashable labels with a typing ``(inputs, output)``;
``inputs`` is a tuple of object names. Composition is a callable
``gamma(f, gs)`` defined for every in-bound composite (total arity at most
``arity_bound``).
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .group_operads import GroupOperad, TruncationError
from .report import Report

Label = Hashable


class MissingComposite(KeyError):
    pass


class FinMulticategory:
    def __init__(self, objects: Iterable, morphisms: Mapping[Label, tuple], identities: Mapping,
                 gamma: Callable[[Label, Sequence[Label]], Label], arity_bound: int, name: str = ""):
        self.objects = list(objects)
        self.morphisms = {m: (tuple(ins), out) for m, (ins, out) in morphisms.items()}
        self.identities = dict(identities)
        self._gamma = gamma
        self.arity_bound = arity_bound
        self.name = name
        self._homs: dict[tuple, list] = defaultdict(list)
        self._by_output: dict = defaultdict(list)
        for m, (ins, out) in self.morphisms.items():
            self._homs[(ins, out)].append(m)
            self._by_output[out].append(m)
        self._cache: dict = {}

    def __repr__(self):
        return f"FinMulticategory({self.name!r}, objects={len(self.objects)}, morphisms={len(self.morphisms)})"

    @classmethod
    def from_table(cls, objects, morphisms, identities, compositions: Mapping, arity_bound: int | None = None,
                   name: str = "") -> "FinMulticategory":
        """``compositions`` maps ``(outer, tuple(inners))`` to the result.

        Composites with an identity are implied and need not be listed.
        """
        morphisms = {m: (tuple(ins), out) for m, (ins, out) in morphisms.items()}
        ids = set(identities.values())
        table = {(o, tuple(i)): r for (o, i), r in compositions.items()}
        bound = arity_bound if arity_bound is not None else max((len(t[0]) for t in morphisms.values()), default=1)

        def gamma(f, gs):
            hit = table.get((f, tuple(gs)))
            if hit is not None:
                return hit
            if f in ids:
                return gs[0]
            if all(g in ids for g in gs):
                return f
            raise MissingComposite((f, tuple(gs)))

        return cls(objects, morphisms, identities, gamma, bound, name)

    def inputs(self, f) -> tuple:
        return self.morphisms[f][0]

    def output(self, f):
        return self.morphisms[f][1]

    def arity(self, f) -> int:
        return len(self.morphisms[f][0])

    def hom(self, inputs: Sequence, output) -> list:
        return self._homs.get((tuple(inputs), output), [])

    def with_output(self, output) -> list:
        return self._by_output.get(output, [])

    def gamma(self, f: Label, gs: Sequence[Label]) -> Label:
        gs = tuple(gs)
        key = (f, gs)
        hit = self._cache.get(key)
        if hit is None:
            if len(gs) != self.arity(f):
                raise ValueError(f"{f!r} has arity {self.arity(f)}, got {len(gs)} inputs")
            total = sum(self.arity(g) for g in gs)
            if total > self.arity_bound:
                raise TruncationError(f"composite arity {total} exceeds bound {self.arity_bound}")
            hit = self._gamma(f, gs)
            self._cache[key] = hit
        return hit

    def identity(self, a) -> Label:
        return self.identities[a]

    def words(self, n: int) -> list[tuple]:
        return list(itertools.product(self.objects, repeat=n))


def _typed_inputs(M: FinMulticategory, f, budget: int):
    """All tuples gs composable into f with total arity <= budget."""
    def rec(i, left):
        if i == M.arity(f):
            yield ()
            return
        for g in M.with_output(M.inputs(f)[i]):
            k = M.arity(g)
            if k <= left:
                for rest in rec(i + 1, left - k):
                    yield (g,) + rest
    yield from rec(0, budget)


def validate_multicat(M: FinMulticategory) -> Report:
    rep = Report()
    bad_id = next(((a,) for a in M.objects if M.identities.get(a) not in M.morphisms
                   or M.morphisms[M.identities[a]] != ((a,), a)), None)
    rep.add("multicat:identities", bad_id is None, M.name, bad_id)
    if bad_id is not None:
        return rep
    bad_type = bad_unit = bad_assoc = None
    for f in M.morphisms:
        ins, out = M.morphisms[f]
        try:
            if M.gamma(f, [M.identity(a) for a in ins]) != f or M.gamma(M.identity(out), [f]) != f:
                bad_unit = bad_unit or (f,)
        except (MissingComposite, TruncationError) as exc:
            bad_unit = bad_unit or (f, str(exc))
        for gs in _typed_inputs(M, f, M.arity_bound):
            try:
                r = M.gamma(f, gs)
            except MissingComposite:
                bad_type = bad_type or (f, gs, "missing")
                continue
            want = (tuple(a for g in gs for a in M.inputs(g)), out)
            if M.morphisms.get(r) != want:
                bad_type = bad_type or (f, gs, r)
                continue
            # associativity against every in-bound second layer
            blocks = [M.inputs(g) for g in gs]
            for hs in _typed_inputs(M, r, M.arity_bound):
                if bad_assoc:
                    break
                try:
                    lhs = M.gamma(r, hs)
                    it = iter(hs)
                    grouped = [[next(it) for _ in blk] for blk in blocks]
                    rhs = M.gamma(f, [M.gamma(g, hb) for g, hb in zip(gs, grouped)])
                except MissingComposite:
                    bad_type = bad_type or (f, gs, hs, "missing")
                    continue
                if lhs != rhs:
                    bad_assoc = (f, gs, hs)
    rep.add("multicat:closure", bad_type is None, f"arity<={M.arity_bound}", bad_type)
    rep.add("multicat:unit", bad_unit is None, M.name, bad_unit)
    rep.add("multicat:assoc", bad_assoc is None, f"arity<={M.arity_bound}", bad_assoc)
    return rep


@dataclass
class Multifunctor:
    source: FinMulticategory
    target: FinMulticategory
    obj_map: dict
    mor_map: dict
    name: str = ""

    def __call__(self, f):
        return self.mor_map[f]


def identity_multifunctor(M: FinMulticategory) -> Multifunctor:
    return Multifunctor(M, M, {a: a for a in M.objects}, {f: f for f in M.morphisms}, f"id[{M.name}]")


def validate_multifunctor(F: Multifunctor) -> Report:
    S, T = F.source, F.target
    rep = Report()
    bad = None
    for f, (ins, out) in S.morphisms.items():
        g = F.mor_map.get(f)
        if g not in T.morphisms or T.morphisms[g] != (tuple(F.obj_map[a] for a in ins), F.obj_map[out]):
            bad = bad or (f,)
    rep.add("multifunctor:typed", bad is None, F.name, bad)
    bad = next(((a,) for a in S.objects if F.mor_map[S.identity(a)] != T.identity(F.obj_map[a])), None)
    rep.add("multifunctor:identities", bad is None, F.name, bad)
    bad = None
    for f in S.morphisms:
        for gs in _typed_inputs(S, f, S.arity_bound):
            if F.mor_map[S.gamma(f, gs)] != T.gamma(F.mor_map[f], [F.mor_map[g] for g in gs]):
                bad = bad or (f, gs)
    rep.add("multifunctor:composition", bad is None, F.name, bad)
    return rep


def truncate(M: FinMulticategory, n: int) -> FinMulticategory:
    """The sub-multicategory of operations of arity at most n (identities are kept)."""
    n = max(n, 1)
    if n >= M.arity_bound:
        return M
    morphisms = {f: t for f, t in M.morphisms.items() if len(t[0]) <= n}
    return FinMulticategory(M.objects, morphisms, M.identities, M._gamma, n, M.name)


def truncate_multifunctor(F: Multifunctor, source: FinMulticategory, target: FinMulticategory) -> Multifunctor:
    return Multifunctor(source, target, dict(F.obj_map), {f: F.mor_map[f] for f in source.morphisms}, F.name)


# -- actions ----------------------------------------------------------------

@dataclass
class GSymAction:
    """A right action f -> f^x of a group operad on the multihoms of M."""
    multicat: FinMulticategory
    operad: GroupOperad
    act: Callable[[Label, tuple], Label]
    name: str = ""

    def __call__(self, f, x):
        return self.act(f, x)


def trivial_action(M: FinMulticategory, G: GroupOperad) -> GSymAction:
    return GSymAction(M, G, lambda f, x: f, "trivial")


def action_from_table(M: FinMulticategory, G: GroupOperad, table: Mapping) -> GSymAction:
    """Action given on generators ``(f, x) -> g``; the unit acts trivially and
    other entries are filled in by the action law (f^x)^y = f^{xy}."""
    full = dict(table)
    for f in M.morphisms:
        full.setdefault((f, G.unit(M.arity(f))), f)
    changed = True
    while changed:
        changed = False
        for (f, x), g in list(full.items()):
            for (g2, y), h in list(full.items()):
                if g2 == g and (f, G.mul(x, y)) not in full:
                    full[(f, G.mul(x, y))] = h
                    changed = True

    def act(f, x):
        try:
            return full[(f, x)]
        except KeyError:
            raise KeyError(f"action of {x} on {f!r} is not determined by the table") from None

    return GSymAction(M, G, act, "table")


def semidirect(M: FinMulticategory, G: GroupOperad) -> FinMulticategory:
    """Labels (f, x) with f in M(x_* a; b), typed as multimorphisms a -> b."""
    if M.arity_bound > G.arity_bound:
        raise TruncationError(f"multicategory bound {M.arity_bound} exceeds operad bound {G.arity_bound}")
    morphisms = {}
    for f, (ins, out) in M.morphisms.items():
        for x in G.elements(len(ins)):
            p = G.to_perm(x)
            # x_* a = ins means a_i = ins[x(i)]
            src = tuple(ins[p[i] - 1] for i in range(len(ins)))
            morphisms[(f, x)] = (src, out)
    ids = {a: (M.identity(a), G.unit(1)) for a in M.objects}

    def gamma(fx, gs):
        f, x = fx
        p = G.to_perm(x)
        inv = [0] * len(p)
        for i, v in enumerate(p):
            inv[v - 1] = i
        return (M.gamma(f, [gs[inv[i]][0] for i in range(len(gs))]), G.gamma(x, [g[1] for g in gs]))

    return FinMulticategory(M.objects, morphisms, ids, gamma, M.arity_bound, f"{M.name}x|{G.name}")


def semidirect_functor(F: Multifunctor, G: GroupOperad) -> Multifunctor:
    S, T = semidirect(F.source, G), semidirect(F.target, G)
    return Multifunctor(S, T, dict(F.obj_map), {(f, x): (F.mor_map[f], x) for (f, x) in S.morphisms},
                        f"{F.name}x|{G.name}")


def action_multifunctor(A: GSymAction) -> Multifunctor:
    S = semidirect(A.multicat, A.operad)
    return Multifunctor(S, A.multicat, {a: a for a in S.objects},
                        {(f, x): A(f, x) for (f, x) in S.morphisms}, f"act[{A.name}]")


def validate_gsym(M: FinMulticategory, A: GSymAction) -> Report:
    """The action is a multifunctor M x| G -> M, identity on objects, with
    (f^x)^y = f^{xy} and f^e = f."""
    G = A.operad
    rep = Report()
    bad_type = bad_unit = bad_assoc = None
    for f, (ins, out) in M.morphisms.items():
        n = len(ins)
        try:
            if A(f, G.unit(n)) != f:
                bad_unit = bad_unit or (f,)
            for x in G.elements(n):
                fx = A(f, x)
                p = G.to_perm(x)
                if M.morphisms.get(fx) != (tuple(ins[p[i] - 1] for i in range(n)), out):
                    bad_type = bad_type or (f, x, fx)
                    continue
                for y in G.elements(n):
                    if A(fx, y) != A(f, G.mul(x, y)):
                        bad_assoc = bad_assoc or (f, x, y)
        except KeyError as exc:
            bad_type = bad_type or (f, str(exc))
    rep.add("gsym:typed", bad_type is None, M.name, bad_type)
    rep.add("gsym:unit", bad_unit is None, M.name, bad_unit)
    rep.add("gsym:assoc", bad_assoc is None, M.name, bad_assoc)
    if bad_type is None:
        rep.extend(validate_multifunctor(action_multifunctor(A)), prefix="gsym:")
    return rep


def validate_equivariant(F: Multifunctor, A: GSymAction, B: GSymAction) -> Report:
    bad = None
    for f in F.source.morphisms:
        for x in A.operad.elements(F.source.arity(f)):
            if F.mor_map[A(f, x)] != B(F.mor_map[f], x):
                bad = bad or (f, x)
    rep = Report()
    rep.add("multifunctor:equivariant", bad is None, F.name, bad)
    return rep


# -- sample instances -------------------------------------------------------

def terminal(arity_bound: int = 3) -> FinMulticategory:
    """One object ``o`` and exactly one multimorphism ``n`` of each arity n."""
    morphisms = {n: (("o",) * n, "o") for n in range(arity_bound + 1)}
    return FinMulticategory(["o"], morphisms, {"o": 1}, lambda f, gs: sum(gs), arity_bound, "terminal")


def two_object_sample(arity_bound: int = 3, with_g: bool = True) -> FinMulticategory:
    """Objects a, b. The unary monoid on a is {id_a, h} with h idempotent;
    for every word w with exactly one a and length 2..bound there is one
    multimorphism w -> a (``f`` for ab, ``g`` for ba). Everything else is
    thin. With ``with_g=False`` only words starting with a are used."""
    morphisms = {"id_a": (("a",), "a"), "h": (("a",), "a"), "id_b": (("b",), "b")}
    names = {}
    for n in range(2, arity_bound + 1):
        for pos in range(n):
            if not with_g and pos:
                continue
            w = tuple("a" if i == pos else "b" for i in range(n))
            nm = {("a", "b"): "f", ("b", "a"): "g"}.get(w, "".join(w))
            names[w] = nm
            morphisms[nm] = (w, "a")

    def gamma(f, gs):
        if f in ("id_a", "id_b"):
            return gs[0]
        if f == "h":
            g = gs[0]
            return "h" if g in ("id_a", "h") else g
        # thin: the composite is determined by its input word
        return names[tuple(a for g in gs for a in morphisms[g][0])]

    return FinMulticategory(["a", "b"], morphisms, {"a": "id_a", "b": "id_b"}, gamma, arity_bound,
                            "sample" if with_g else "sample-no-g")


def swap_action(M: FinMulticategory, G: GroupOperad) -> GSymAction:
    """The action on the two-object sample forced by typing."""
    def act(f, x):
        ins, out = M.morphisms[f]
        if len(ins) <= 1:
            return f
        p = G.to_perm(x)
        w = tuple(ins[p[i] - 1] for i in range(len(ins)))
        (g,) = M.hom(w, out)
        return g

    return GSymAction(M, G, act, "swap")


def parity_operad(arity_bound: int = 3) -> FinMulticategory:
    """One object; arities 1..bound each carry two operations (n, c), c in {0, 1};
    composition adds arities and XORs the bits."""
    morphisms = {(n, c): (("o",) * n, "o") for n in range(1, arity_bound + 1) for c in (0, 1)}

    def gamma(f, gs):
        return (sum(g[0] for g in gs), (f[1] + sum(g[1] for g in gs)) % 2)

    return FinMulticategory(["o"], morphisms, {"o": (1, 0)}, gamma, arity_bound, "parity")
