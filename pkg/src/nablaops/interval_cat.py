"""The interval category: objects <<n>> = {-inf, 1..n, +inf}, morphisms are
monotone maps fixing both endpoints.

A morphism is stored in extended form ``ext``: the tuple of images of
``0..m+1`` where 0 encodes -inf and ``n + 1`` encodes +inf of the target.
The public ``values`` view uses ``NEG_INF``/``POS_INF`` for the endpoints.
"""

from __future__ import annotations

import enum
import itertools
import math
from typing import Iterable, NamedTuple, Sequence

from . import kernels

NEG_INF = -math.inf
POS_INF = math.inf


class IntervalError(ValueError):
    pass


class IntervalMorphism:
    """A morphism <<dom_n>> -> <<cod_n>>."""

    __slots__ = ("dom_n", "cod_n", "ext", "_hash")

    def __init__(self, dom_n: int, cod_n: int, values: Iterable):
        vals = list(values)
        if dom_n < 0 or cod_n < 0:
            raise IntervalError("negative object")
        if len(vals) != dom_n:
            raise IntervalError(f"expected {dom_n} values, got {len(vals)}")
        ext = [0]
        for v in vals:
            if v == NEG_INF:
                ext.append(0)
            elif v == POS_INF:
                ext.append(cod_n + 1)
            elif isinstance(v, int) and 1 <= v <= cod_n:
                ext.append(v)
            else:
                raise IntervalError(f"value {v!r} out of range for <<{cod_n}>>")
        ext.append(cod_n + 1)
        if any(a > b for a, b in zip(ext, ext[1:])):
            raise IntervalError(f"values not monotone: {vals}")
        self._set(dom_n, cod_n, tuple(ext))

    def _set(self, dom_n, cod_n, ext):
        self.dom_n = dom_n
        self.cod_n = cod_n
        self.ext = ext
        self._hash = hash((dom_n, cod_n, ext))

    @classmethod
    def from_ext(cls, cod_n: int, ext: tuple) -> "IntervalMorphism":
        # trusted constructor: no validation
        obj = cls.__new__(cls)
        obj._set(len(ext) - 2, cod_n, ext)
        return obj

    @property
    def values(self) -> tuple:
        top = self.cod_n + 1
        return tuple(NEG_INF if v == 0 else POS_INF if v == top else v
                     for v in self.ext[1:-1])

    def __call__(self, i: int) -> int:
        """Image of ``i`` in extended encoding (0 and dom_n+1 are endpoints)."""
        return self.ext[i]

    def __eq__(self, other):
        if not isinstance(other, IntervalMorphism):
            return NotImplemented
        return self.cod_n == other.cod_n and self.ext == other.ext

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.dom_n, self.cod_n, self.ext) < (other.dom_n, other.cod_n, other.ext)

    def __mul__(self, other):
        return compose(self, other)

    def __repr__(self):
        return f"IntervalMorphism({self.dom_n}->{self.cod_n}, {format_values(self)})"

    def __reduce__(self):
        return (IntervalMorphism.from_ext, (self.cod_n, self.ext))


def format_values(f: IntervalMorphism) -> str:
    top = f.cod_n + 1
    parts = ["-inf" if v == 0 else "+inf" if v == top else str(v) for v in f.ext[1:-1]]
    return "[" + ",".join(parts) + "]"


class FiberTuple(NamedTuple):
    k_neg: int
    k: tuple
    k_pos: int


class MorphismClass(enum.Enum):
    ACTIVE = "Active"
    INERT = "Inert"
    MIXED = "Mixed"


class Factorization(NamedTuple):
    kind: MorphismClass
    rho: IntervalMorphism
    mu: IntervalMorphism
    delta: IntervalMorphism


def compose(g: IntervalMorphism, f: IntervalMorphism) -> IntervalMorphism:
    """Return g o f."""
    if f.cod_n != g.dom_n:
        raise IntervalError(f"cannot compose <<{g.dom_n}>>-> after ->{f.cod_n}>>")
    return IntervalMorphism.from_ext(g.cod_n, kernels.compose_ext(g.ext, f.ext))


def fiber_tuple(f: IntervalMorphism) -> FiberTuple:
    counts = [0] * (f.cod_n + 2)
    for v in f.ext[1:-1]:
        counts[v] += 1
    return FiberTuple(counts[0], tuple(counts[1:-1]), counts[-1])


def fiber(f: IntervalMorphism, j: int) -> list[int]:
    """Indices i in 1..dom_n with f(i) = j (j in extended encoding)."""
    return [i for i in range(1, f.dom_n + 1) if f.ext[i] == j]


def is_active(f: IntervalMorphism) -> bool:
    return f.dom_n == 0 or (f.ext[1] != 0 and f.ext[-2] != f.cod_n + 1)


def is_inert(f: IntervalMorphism) -> bool:
    return fiber_tuple(f).k == (1,) * f.cod_n


def identity(n: int) -> IntervalMorphism:
    return IntervalMorphism.from_ext(n, tuple(range(n + 2)))


def mu(n: int) -> IntervalMorphism:
    """The active morphism <<n>> -> <<1>>."""
    if n < 0:
        raise IntervalError("negative arity")
    return IntervalMorphism.from_ext(1, (0,) + (1,) * n + (2,))


def rho(i: int, n: int) -> IntervalMorphism:
    """The inert morphism <<n>> -> <<1>> picking the i-th point."""
    if not 1 <= i <= n:
        raise IntervalError(f"index {i} out of range 1..{n}")
    return block_rho((1,) * n, i)


def block_rho(ks: Sequence[int], i: int) -> IntervalMorphism:
    """The inert morphism <<sum ks>> -> <<ks[i-1]>> picking the i-th block."""
    if not 1 <= i <= len(ks):
        raise IntervalError(f"block {i} out of range 1..{len(ks)}")
    k = ks[i - 1]
    before = sum(ks[: i - 1])
    after = sum(ks[i:])
    ext = (0,) * (before + 1) + tuple(range(1, k + 1)) + (k + 1,) * (after + 1)
    return IntervalMorphism.from_ext(k, ext)


def delta_fiber(f: IntervalMorphism, j: int) -> IntervalMorphism:
    """The inclusion of the j-th fiber of f as an active morphism into dom f."""
    if not 1 <= j <= f.cod_n:
        raise IntervalError(f"fiber {j} out of range 1..{f.cod_n}")
    pts = fiber(f, j)
    return IntervalMorphism.from_ext(f.dom_n, (0,) + tuple(pts) + (f.dom_n + 1,))


class Canonical(enum.Enum):
    ID = "Id"
    MU = "Mu"
    RHO = "Rho"
    BLOCK_RHO = "BlockRho"
    DELTA_FIBER = "DeltaFiber"


_CANONICAL = {
    Canonical.ID: identity,
    Canonical.MU: mu,
    Canonical.RHO: rho,
    Canonical.BLOCK_RHO: block_rho,
    Canonical.DELTA_FIBER: delta_fiber,
}


def canonical(kind: Canonical | str, *params) -> IntervalMorphism:
    """Dispatch to the named constructor; ``kind`` may be the enum or its value."""
    return _CANONICAL[Canonical(kind)](*params)


def classify_and_factorize(f: IntervalMorphism) -> Factorization:
    """Unique factorization f = mu o rho with rho inert and mu active."""
    kn, _, kp = fiber_tuple(f)
    m, n = f.dom_n, f.cod_n
    r = m - kn - kp
    rho_ext = (0,) * (kn + 1) + tuple(range(1, r + 1)) + (r + 1,) * (kp + 1)
    rho_ = IntervalMorphism.from_ext(r, rho_ext)
    mu_ = IntervalMorphism.from_ext(n, (0,) + f.ext[kn + 1: kn + 1 + r] + (n + 1,))
    delta = IntervalMorphism.from_ext(m, (0,) + tuple(range(kn + 1, kn + r + 1)) + (m + 1,))
    if kn == 0 and kp == 0:
        kind = MorphismClass.ACTIVE
    elif mu_.ext == tuple(range(n + 2)):
        kind = MorphismClass.INERT
    else:
        kind = MorphismClass.MIXED
    return Factorization(kind, rho_, mu_, delta)


def diamond(nus: Sequence[IntervalMorphism]) -> IntervalMorphism:
    """Juxtaposition of active morphisms."""
    ext = [0]
    off = 0
    for nu in nus:
        if not is_active(nu):
            raise IntervalError(f"{nu!r} is not active")
        ext.extend(v + off for v in nu.ext[1:-1])
        off += nu.cod_n
    ext.append(off + 1)
    return IntervalMorphism.from_ext(off, tuple(ext))


def enumerate_morphisms(m: int, n: int) -> list[IntervalMorphism]:
    """All morphisms <<m>> -> <<n>> in lexicographic order of values."""
    return [IntervalMorphism.from_ext(n, (0,) + c + (n + 1,))
            for c in itertools.combinations_with_replacement(range(n + 2), m)]


def count_morphisms(m: int, n: int) -> int:
    return math.comb(m + n + 1, m)


def hom_up_to(N: int) -> dict[tuple[int, int], list[IntervalMorphism]]:
    """Hom-sets of the truncation to objects <= N."""
    return {(m, n): enumerate_morphisms(m, n) for m in range(N + 1) for n in range(N + 1)}
