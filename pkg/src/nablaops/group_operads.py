"""Group operads with their induced action on the interval category.

Elements of every operad here are encoded as tuples of length equal to the
arity; for the symmetric operad the tuple is the one-line image notation of
the permutation (1-indexed), for the trivial operad it is always the identity.
"""

from __future__ import annotations

import enum
import itertools
from typing import Iterator, Sequence

from . import kernels
from ._parallel import pmap
from .interval_cat import IntervalMorphism, enumerate_morphisms, identity
from .report import Report

Element = tuple


class TruncationError(ValueError):
    """Raised when an arity exceeds the operad's explicit bound."""


class OperadMismatchError(ValueError):
    pass


class CrossedActionError(ValueError):
    """The candidate pushed morphism is not monotone (corrupted operad data)."""


def unit_perm(n: int) -> tuple:
    return tuple(range(1, n + 1))


class GroupLaw(enum.Enum):
    MUL = "Mul"
    INV = "Inv"
    UNIT = "Unit"


class GroupOperad:
    """Base class. Subclasses provide ``elements``, ``to_perm``, ``gamma``,
    ``mul`` and ``inv``; the crossed action is derived from them."""

    name = "abstract"

    def __init__(self, arity_bound: int = 6):
        self.arity_bound = arity_bound
        self._crossed_cache: dict = {}

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_crossed_cache"] = {}
        return state

    def __repr__(self):
        return f"{type(self).__name__}(arity_bound={self.arity_bound})"

    def check_arity(self, n: int) -> None:
        if n > self.arity_bound:
            raise TruncationError(f"arity {n} exceeds bound {self.arity_bound} of {self.name}")

    def elements(self, n: int) -> tuple[Element, ...]:
        raise NotImplementedError

    def to_perm(self, x: Element) -> tuple:
        raise NotImplementedError

    def gamma(self, x: Element, ys: Sequence[Element]) -> Element:
        raise NotImplementedError

    def mul(self, x: Element, y: Element) -> Element:
        raise NotImplementedError

    def inv(self, x: Element) -> Element:
        raise NotImplementedError

    def unit(self, n: int) -> Element:
        self.check_arity(n)
        return unit_perm(n)

    def arity(self, x: Element) -> int:
        return len(x)

    def contains(self, x) -> bool:
        return isinstance(x, tuple) and len(x) <= self.arity_bound and x in set(self.elements(len(x)))

    def group_law(self, op: GroupLaw | str, *args):
        op = GroupLaw(op)
        if op is GroupLaw.UNIT:
            return self.unit(*args)
        if op is GroupLaw.INV:
            return self.inv(*args)
        x, y = args
        if len(x) != len(y):
            raise OperadMismatchError(f"arity mismatch {len(x)} != {len(y)}")
        return self.mul(x, y)

    def crossed_action(self, f: IntervalMorphism, y: Element) -> tuple[Element, IntervalMorphism]:
        """Return ``(f*(y), f^y)``."""
        key = (f, y)
        hit = self._crossed_cache.get(key)
        if hit is None:
            hit = self._crossed_uncached(f, y)
            self._crossed_cache[key] = hit
        return hit

    def pullback(self, f: IntervalMorphism, y: Element) -> Element:
        return self.crossed_action(f, y)[0]

    def push(self, f: IntervalMorphism, y: Element) -> IntervalMorphism:
        return self.crossed_action(f, y)[1]

    def _crossed_uncached(self, f, y):
        if len(y) != f.cod_n:
            raise OperadMismatchError(f"element of arity {len(y)} against target <<{f.cod_n}>>")
        self.check_arity(f.dom_n)
        counts = [0] * (f.cod_n + 2)
        for v in f.ext[1:-1]:
            counts[v] += 1
        inner = self.gamma(y, [self.unit(k) for k in counts[1:-1]])
        x = self.gamma(self.unit(3), [self.unit(counts[0]), inner, self.unit(counts[-1])])
        sigma = self.to_perm(x)
        ybar = (0,) + self.to_perm(y) + (f.cod_n + 1,)
        ext = [0] * (f.dom_n + 2)
        ext[-1] = f.cod_n + 1
        for p in range(1, f.dom_n + 1):
            ext[sigma[p - 1]] = ybar[f.ext[p]]
        if any(a > b for a, b in zip(ext, ext[1:])):
            raise CrossedActionError(f"push of {f!r} along {y} is not monotone: {ext}")
        return x, IntervalMorphism.from_ext(f.cod_n, tuple(ext))

    def act_word(self, x: Element, word: Sequence) -> tuple:
        """Left action on words: position j receives letter x^{-1}(j)."""
        if len(word) != len(x):
            raise OperadMismatchError(f"word of length {len(word)} against arity {len(x)}")
        p = self.to_perm(x)
        out = [None] * len(word)
        for i, a in enumerate(word):
            out[p[i] - 1] = a
        return tuple(out)


class SymmetricOperad(GroupOperad):
    name = "symmetric"

    def __init__(self, arity_bound: int = 6):
        super().__init__(arity_bound)
        self._elements: dict[int, tuple] = {}

    def elements(self, n):
        self.check_arity(n)
        if n not in self._elements:
            self._elements[n] = tuple(itertools.permutations(range(1, n + 1)))
        return self._elements[n]

    def to_perm(self, x):
        return x

    def gamma(self, x, ys):
        if len(ys) != len(x):
            raise OperadMismatchError(f"{len(ys)} inputs for arity {len(x)}")
        self.check_arity(sum(len(y) for y in ys))
        return kernels.gamma_sym(x, ys)

    def mul(self, x, y):
        return kernels.perm_mul(x, y)

    def inv(self, x):
        return kernels.perm_inv(x)

    def _crossed_uncached(self, f, y):
        if len(y) != f.cod_n:
            raise OperadMismatchError(f"element of arity {len(y)} against target <<{f.cod_n}>>")
        self.check_arity(f.dom_n)
        sigma, ext = kernels.sym_crossed(f.ext, f.cod_n, y)
        return sigma, IntervalMorphism.from_ext(f.cod_n, ext)


class TrivialOperad(GroupOperad):
    name = "trivial"

    def elements(self, n):
        self.check_arity(n)
        return (unit_perm(n),)

    def to_perm(self, x):
        return x

    def gamma(self, x, ys):
        if len(ys) != len(x):
            raise OperadMismatchError(f"{len(ys)} inputs for arity {len(x)}")
        n = sum(len(y) for y in ys)
        self.check_arity(n)
        return unit_perm(n)

    def mul(self, x, y):
        return x

    def inv(self, x):
        return x

    def _crossed_uncached(self, f, y):
        self.check_arity(f.dom_n)
        return unit_perm(f.dom_n), f


class PatchedOperad(GroupOperad):
    """Wraps an operad and overrides selected composition entries.

    Used as a negative control: the crossed action is recomputed from the
    patched composition, so corruption shows up in the verifiers.
    """

    def __init__(self, base: GroupOperad, patches: dict):
        super().__init__(base.arity_bound)
        self.base = base
        self.patches = {(x, tuple(ys)): v for (x, ys), v in patches.items()}
        self.name = f"{base.name}-patched"

    def elements(self, n):
        return self.base.elements(n)

    def to_perm(self, x):
        return self.base.to_perm(x)

    def gamma(self, x, ys):
        hit = self.patches.get((x, tuple(ys)))
        return hit if hit is not None else self.base.gamma(x, ys)

    def mul(self, x, y):
        return self.base.mul(x, y)

    def inv(self, x):
        return self.base.inv(x)


_BUILTINS = {"symmetric": SymmetricOperad, "trivial": TrivialOperad}


def builtin_operad(name: str, arity_bound: int = 6) -> GroupOperad:
    try:
        return _BUILTINS[name](arity_bound)
    except KeyError:
        raise ValueError(f"unknown operad {name!r}; expected one of {sorted(_BUILTINS)}") from None


def word_fiber(word: Sequence, f: IntervalMorphism, j: int) -> tuple:
    """Ordered subword of ``word`` on the preimage of ``j``."""
    if len(word) != f.dom_n:
        raise OperadMismatchError(f"word of length {len(word)} against <<{f.dom_n}>>")
    if not 1 <= j <= f.cod_n:
        raise IndexError(f"fiber {j} out of range 1..{f.cod_n}")
    return tuple(word[i - 1] for i in range(1, f.dom_n + 1) if f.ext[i] == j)


def compositions(total_max: int, parts: int) -> Iterator[tuple]:
    """Tuples of ``parts`` naturals with sum <= total_max."""
    if parts == 0:
        yield ()
        return
    for k in range(total_max + 1):
        for rest in compositions(total_max - k, parts - 1):
            yield (k,) + rest


def _inputs(G: GroupOperad, ks: Sequence[int]) -> Iterator[tuple]:
    return itertools.product(*(G.elements(k) for k in ks))


# -- verification -----------------------------------------------------------

def _check_group(G, n_max, rep):
    bad = None
    for n in range(n_max + 1):
        els = G.elements(n)
        e = G.unit(n)
        for x in els:
            if G.mul(x, e) != x or G.mul(e, x) != x:
                bad = bad or ("unit", x)
            if G.mul(x, G.inv(x)) != e or G.mul(G.inv(x), x) != e:
                bad = bad or ("inverse", x)
            for y in els:
                xy = G.mul(x, y)
                if G.to_perm(xy) != kernels.perm_mul(G.to_perm(x), G.to_perm(y)):
                    bad = bad or ("to_perm", x, y)
                for z in els:
                    if G.mul(xy, z) != G.mul(x, G.mul(y, z)):
                        bad = bad or ("assoc", x, y, z)
    rep.add("group-axioms", bad is None, f"n<={n_max}", bad)


def _check_operad(G, n_max, rep):
    bad_unit = bad_perm = bad_assoc = bad_inter = None
    for n in range(n_max + 1):
        e1s = [G.unit(1)] * n
        for x in G.elements(n):
            if G.gamma(x, e1s) != x or G.gamma(G.unit(1), [x]) != x:
                bad_unit = bad_unit or (x,)
    for n in range(n_max + 1):
        for ks in compositions(n_max, n):
            for x in G.elements(n):
                for ys in _inputs(G, ks):
                    g = G.gamma(x, ys)
                    if G.to_perm(g) != kernels.gamma_sym(G.to_perm(x), [G.to_perm(y) for y in ys]):
                        bad_perm = bad_perm or (x, ys)
    # associativity; the shape (n, ks, ls) is enumerated before the elements
    for n in range(n_max + 1):
        for ks in compositions(n_max, n):
            for flat in compositions(n_max, sum(ks)):
                grouped_shape, pos = [], 0
                for k in ks:
                    grouped_shape.append(flat[pos:pos + k])
                    pos += k
                for x in G.elements(n):
                    for ys in _inputs(G, ks):
                        g = G.gamma(x, ys)
                        for zs in _inputs(G, flat):
                            it = iter(zs)
                            grouped = [[next(it) for _ in blk] for blk in grouped_shape]
                            lhs = G.gamma(g, list(zs))
                            rhs = G.gamma(x, [G.gamma(y, zb) for y, zb in zip(ys, grouped)])
                            if lhs != rhs:
                                bad_assoc = bad_assoc or (x, ys, zs)
    for n in range(n_max + 1):
        for ks in compositions(n_max, n):
            els = G.elements(n)
            inputs = list(_inputs(G, ks))
            for y in els:
                yinv = kernels.perm_inv(G.to_perm(y))
                for ys in inputs:
                    gy = G.gamma(y, ys)
                    for xs in inputs:
                        prods = [G.mul(a, b) for a, b in zip(xs, ys)]
                        perm_xs = [xs[yinv[i] - 1] for i in range(n)]
                        for x in els:
                            lhs = G.gamma(G.mul(x, y), prods)
                            rhs = G.mul(G.gamma(x, perm_xs), gy)
                            if lhs != rhs:
                                bad_inter = bad_inter or (x, y, xs, ys)
    rep.add("operad-unit", bad_unit is None, f"n<={n_max}", bad_unit)
    rep.add("operad-to-perm", bad_perm is None, f"n<={n_max}", bad_perm)
    rep.add("operad-assoc", bad_assoc is None, f"total arity<={n_max}", bad_assoc)
    rep.add("interchange", bad_inter is None, f"total arity<={n_max}", bad_inter)


def _crossed_chunk(args):
    G, n_max, m, n = args
    bad = {"crossed-unit": None, "crossed-mul": None, "crossed-comp": None,
           "crossed-pullback-functor": None, "crossed-monotone": None}
    try:
        els = G.elements(n)
        for f in enumerate_morphisms(m, n):
            if G.crossed_action(f, G.unit(n)) != (G.unit(m), f):
                bad["crossed-unit"] = bad["crossed-unit"] or (f, G.unit(n))
            for y in els:
                fy_pull, fy = G.crossed_action(f, y)
                for x in els:
                    lhs = G.pullback(f, G.mul(x, y))
                    rhs = G.mul(G.pullback(fy, x), fy_pull)
                    if lhs != rhs:
                        bad["crossed-mul"] = bad["crossed-mul"] or (f, x, y)
            for x in els:
                fx_pull, fx = G.crossed_action(f, x)
                for l in range(n_max + 1):
                    for g in enumerate_morphisms(l, m):
                        fg = f * g
                        lhs_pull, lhs = G.crossed_action(fg, x)
                        gx_pull, gx = G.crossed_action(g, fx_pull)
                        if lhs != fx * gx:
                            bad["crossed-comp"] = bad["crossed-comp"] or (f, g, x)
                        if lhs_pull != gx_pull:
                            bad["crossed-pullback-functor"] = bad["crossed-pullback-functor"] or (f, g, x)
        idn = identity(n)
        for x in els:
            if G.crossed_action(idn, x) != (x, idn):
                bad["crossed-unit"] = bad["crossed-unit"] or (idn, x)
    except CrossedActionError as exc:
        bad["crossed-monotone"] = str(exc)
    return bad


def verify_axioms(G: GroupOperad, n_max: int) -> Report:
    """Exhaustive check of group, operad, interchange and crossed-interval laws."""
    if n_max > G.arity_bound:
        raise TruncationError(f"n_max {n_max} exceeds bound {G.arity_bound}")
    rep = Report()
    _check_group(G, n_max, rep)
    _check_operad(G, n_max, rep)
    chunks = pmap(_crossed_chunk, [(G, n_max, m, n) for m in range(n_max + 1) for n in range(n_max + 1)])
    for key in ("crossed-unit", "crossed-mul", "crossed-comp", "crossed-pullback-functor", "crossed-monotone"):
        w = next((c[key] for c in chunks if c[key] is not None), None)
        rep.add(key, w is None, f"m,n,l<={n_max}", w)
    return rep
