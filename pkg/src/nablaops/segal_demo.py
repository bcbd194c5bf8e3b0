"""The interval nerve of a finite monoid and the commutativity criterion.

A monoid M gives a functor on the interval category sending <<n>> to M^n;
a map phi multiplies the entries of each fiber, in increasing index order,
and drops the entries sent to the ends. Permutations act on M^n by moving
entries, and M is commutative exactly when twisting by any permutation
before multiplying everything together changes nothing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Mapping, Sequence

from .finite_cats import FinCategory, Functor
from .group_operads import GroupOperad, SymmetricOperad
from .interval_cat import IntervalMorphism, compose, enumerate_morphisms, identity, mu
from .report import Report


@dataclass
class FinMonoid:
    elements: tuple
    unit: Hashable
    table: dict          # (x, y) -> xy
    name: str = ""

    @classmethod
    def from_rows(cls, elements: Sequence, unit, rows: Mapping, name: str = "") -> "FinMonoid":
        """``rows[x][y]`` is xy."""
        return cls(tuple(elements), unit, {(x, y): rows[x][y] for x in elements for y in elements}, name)

    def mul(self, x, y):
        return self.table[(x, y)]

    def product(self, xs: Sequence):
        out = self.unit
        for x in xs:
            out = self.table[(out, x)]
        return out

    def validate(self) -> Report:
        rep = Report()
        els = set(self.elements)
        bad = next(((x, y) for x in self.elements for y in self.elements
                    if self.table.get((x, y)) not in els), None)
        rep.add("monoid:closure", bad is None, self.name, bad)
        if bad is not None:
            return rep
        bad = next(((x,) for x in self.elements
                    if self.mul(self.unit, x) != x or self.mul(x, self.unit) != x), None)
        rep.add("monoid:unit", self.unit in els and bad is None, self.name, bad)
        bad = next(((x, y, z) for x in self.elements for y in self.elements for z in self.elements
                    if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z))), None)
        rep.add("monoid:assoc", bad is None, self.name, bad)
        return rep

    def is_commutative(self) -> tuple | None:
        """Pairwise test; returns a non-commuting pair or None."""
        return next(((x, y) for x in self.elements for y in self.elements
                     if self.mul(x, y) != self.mul(y, x)), None)


def cyclic(n: int) -> FinMonoid:
    return FinMonoid(tuple(range(n)), 0, {(x, y): (x + y) % n for x in range(n) for y in range(n)}, f"Z/{n}")


def left_zero_with_unit() -> FinMonoid:
    """{e, a, b} with xy = x for x, y in {a, b}."""
    els = ("e", "a", "b")
    table = {(x, y): (y if x == "e" else x) for x in els for y in els}
    return FinMonoid(els, "e", table, "left-zero")


def trivial_monoid() -> FinMonoid:
    return FinMonoid(("e",), "e", {("e", "e"): "e"}, "trivial")


def all_monoids(max_order: int) -> Iterator[FinMonoid]:
    """Every monoid structure on {0, ..., n-1} with unit 0, for 1 <= n <= max_order.

    Backtracking over the table of non-unit products, pruning on every
    associativity instance whose products are already known.
    """
    for n in range(1, max_order + 1):
        cells = [(x, y) for x in range(1, n) for y in range(1, n)]
        table = {}
        for x in range(n):
            table[(0, x)] = table[(x, 0)] = x

        def consistent() -> bool:
            for x in range(1, n):
                for y in range(1, n):
                    xy = table.get((x, y))
                    if xy is None:
                        continue
                    for z in range(1, n):
                        yz = table.get((y, z))
                        if yz is None:
                            continue
                        lhs, rhs = table.get((xy, z)), table.get((x, yz))
                        if lhs is not None and rhs is not None and lhs != rhs:
                            return False
            return True

        def rec(i):
            if i == len(cells):
                yield FinMonoid(tuple(range(n)), 0, dict(table), f"order{n}")
                return
            for v in range(n):
                table[cells[i]] = v
                if consistent():
                    yield from rec(i + 1)
                del table[cells[i]]

        yield from rec(0)


# -- the nerve --------------------------------------------------------------

@dataclass
class IntervalNerve:
    monoid: FinMonoid
    N: int
    sets: dict = field(default_factory=dict)      # n -> list of n-tuples

    def push(self, phi: IntervalMorphism, xs: Sequence) -> tuple:
        """phi_*: fiberwise products in increasing index order; empty products are the unit."""
        M = self.monoid
        out = [M.unit] * phi.cod_n
        for i, x in enumerate(xs, 1):
            j = phi.ext[i]
            if 1 <= j <= phi.cod_n:
                out[j - 1] = M.mul(out[j - 1], x)
        return tuple(out)


def interval_nerve(M: FinMonoid, N: int) -> IntervalNerve:
    return IntervalNerve(M, N, {n: list(itertools.product(M.elements, repeat=n)) for n in range(N + 1)})


def check_nerve(nerve: IntervalNerve) -> Report:
    """Identities act trivially and (psi phi)_* = psi_* phi_* on the truncation."""
    N = nerve.N
    rep = Report()
    bad = next(((n, xs) for n in range(N + 1) for xs in nerve.sets[n]
                if nerve.push(identity(n), xs) != tuple(xs)), None)
    rep.add("nerve:identity", bad is None, f"N={N}", bad)
    bad = None
    for l, m, n in itertools.product(range(N + 1), repeat=3):
        for phi in enumerate_morphisms(l, m):
            for psi in enumerate_morphisms(m, n):
                for xs in nerve.sets[l]:
                    if nerve.push(compose(psi, phi), xs) != nerve.push(psi, nerve.push(phi, xs)):
                        bad = bad or (psi, phi, xs)
    rep.add("nerve:composition", bad is None, f"N={N}", bad)
    return rep


def nabla_category(N: int) -> FinCategory:
    """The interval category truncated to <<0>> .. <<N>>, labels are the morphisms."""
    homs = {(m, n): enumerate_morphisms(m, n) for m in range(N + 1) for n in range(N + 1)}
    return FinCategory(range(N + 1), homs, {n: identity(n) for n in range(N + 1)}, compose, f"nabla<={N}")


def grothendieck(nerve: IntervalNerve) -> tuple[FinCategory, Functor]:
    """Category of elements: objects (n, xs), morphisms (phi, xs): (m, xs) -> (n, phi_* xs)."""
    N = nerve.N
    base = nabla_category(N)
    objects = [(n, xs) for n in range(N + 1) for xs in nerve.sets[n]]
    homs = {}
    for (m, xs) in objects:
        for n in range(N + 1):
            for phi in base.hom(m, n):
                homs.setdefault(((m, xs), (n, nerve.push(phi, xs))), []).append((phi, xs))
    ids = {(n, xs): (identity(n), xs) for (n, xs) in objects}
    cat = FinCategory(objects, homs, ids, lambda g, f: (compose(g[0], f[0]), f[1]), f"el[{nerve.monoid.name}]")
    proj = Functor.from_callables(cat, base, lambda o: o[0], lambda m: m[0], "proj")
    return cat, proj


def check_discrete_fibration(cat: FinCategory, proj: Functor) -> Report:
    """Every base morphism out of p(X) has exactly one lift out of X."""
    base = proj.target
    counts = {}
    for f in cat.morphisms():
        key = (cat.src(f), proj(f))
        counts[key] = counts.get(key, 0) + 1
    bad = None
    for X in cat.objects:
        p = proj.obj_map[X]
        for n in base.objects:
            for beta in base.hom(p, n):
                if counts.get((X, beta), 0) != 1:
                    bad = bad or (X, beta, counts.get((X, beta), 0))
    rep = Report()
    rep.add("discrete-fibration:unique-lift", bad is None, f"{cat.name}", bad)
    return rep


def check_equivariance(nerve: IntervalNerve, G: GroupOperad | None = None) -> Report:
    """phi_*(xs)^y = (phi^y)_*(xs^{phi^*(y)}) with xs^y moving entry i to y(i)."""
    G = G or SymmetricOperad(max(nerve.N, 1))
    bad = None
    for m in range(nerve.N + 1):
        for n in range(nerve.N + 1):
            for phi in enumerate_morphisms(m, n):
                for y in G.elements(n):
                    pull, pushed = G.crossed_action(phi, y)
                    for xs in nerve.sets[m]:
                        lhs = G.act_word(y, nerve.push(phi, xs))
                        rhs = nerve.push(pushed, G.act_word(pull, xs))
                        if lhs != rhs:
                            bad = bad or (phi, y, xs)
    rep = Report()
    rep.add("nerve:equivariance", bad is None, f"N={nerve.N}", bad)
    return rep


def commutativity_check(M: FinMonoid, n_max: int = 3) -> Report:
    """(mu_n, sigma) and (mu_n, e) induce the same map M^n -> M for all
    n <= n_max and sigma, cross-checked against the pairwise test."""
    G = SymmetricOperad(max(n_max, 1))
    nerve = interval_nerve(M, n_max)
    witness = where = None
    for n in range(n_max + 1):
        mu_n = mu(n)
        for sigma in G.elements(n):
            for xs in nerve.sets[n]:
                if nerve.push(mu_n, G.act_word(sigma, xs)) != nerve.push(mu_n, xs):
                    witness, where = xs, (n, sigma)
                    break
            if witness is not None:
                break
        if witness is not None:
            break
    rep = Report()
    if witness is None:
        rep.add("commutativity", True, "COMMUTATIVE")
    else:
        n, sigma = where
        perm = "(" + ",".join(map(str, sigma)) + ")"
        rep.add("commutativity", False, f"NOT COMMUTATIVE n={n} sigma={perm}",
                tuple(str(x) for x in witness))
    pair = M.is_commutative()
    agree = (pair is None) == (witness is None)
    rep.add("commutativity:agrees", agree, "pairwise test", None if agree else pair)
    return rep
