"""Pure-Python kernels. Mirrors ``_kernels.pyx`` line for line.

Interval morphisms are passed in extended form: a tuple ``ext`` of length
``m + 2`` with ``ext[0] == 0`` and ``ext[m + 1] == n + 1``; 0 and ``n + 1``
stand for the two endpoints. Permutations are 1-indexed image tuples.
"""


def compose_ext(g, f):
    return tuple([g[v] for v in f])


def perm_mul(x, y):
    # (xy)(i) = x(y(i))
    return tuple([x[v - 1] for v in y])


def perm_inv(x):
    out = [0] * len(x)
    for i, v in enumerate(x):
        out[v - 1] = i + 1
    return tuple(out)


def gamma_sym(x, ys):
    n = len(x)
    ks = [len(y) for y in ys]
    # slot s of the output holds block x^{-1}(s)
    xinv = [0] * n
    for i, v in enumerate(x):
        xinv[v - 1] = i
    start = [0] * n
    acc = 0
    for s in range(n):
        b = xinv[s]
        start[b] = acc
        acc += ks[b]
    out = []
    for i in range(n):
        off = start[i]
        for v in ys[i]:
            out.append(off + v)
    return tuple(out)


def sym_crossed(f, n, y):
    """Return ``(pullback perm, pushed ext)`` for the symmetric action."""
    m = len(f) - 2
    counts = [0] * (n + 2)
    for i in range(1, m + 1):
        counts[f[i]] += 1
    yinv = [0] * (n + 1)
    for j in range(1, n + 1):
        yinv[y[j - 1]] = j
    start = [0] * (n + 2)
    start[0] = 1
    acc = 1 + counts[0]
    pushed = [0] * (m + 2)
    pushed[m + 1] = n + 1
    pos = 1 + counts[0]
    for s in range(1, n + 1):
        b = yinv[s]
        start[b] = acc
        acc += counts[b]
        for _ in range(counts[b]):
            pushed[pos] = s
            pos += 1
    start[n + 1] = acc
    for _ in range(counts[n + 1]):
        pushed[pos] = n + 1
        pos += 1
    seen = [0] * (n + 2)
    sigma = [0] * m
    for i in range(1, m + 1):
        v = f[i]
        sigma[i - 1] = start[v] + seen[v]
        seen[v] += 1
    return tuple(sigma), tuple(pushed)


def coset_min(group, x):
    """Lexicographically least element of the right coset ``group * x``."""
    best = None
    for k in group:
        c = tuple([k[v - 1] for v in x])
        if best is None or c < best:
            best = c
    return best
