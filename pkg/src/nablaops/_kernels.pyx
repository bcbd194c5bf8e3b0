# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; same contracts as ``_kernels_py``."""


def compose_ext(tuple g, tuple f):
    cdef Py_ssize_t i, k = len(f)
    out = [None] * k
    for i in range(k):
        out[i] = g[<Py_ssize_t>f[i]]
    return tuple(out)


def perm_mul(tuple x, tuple y):
    cdef Py_ssize_t i, k = len(y)
    out = [None] * k
    for i in range(k):
        out[i] = x[<Py_ssize_t>y[i] - 1]
    return tuple(out)


def perm_inv(tuple x):
    cdef Py_ssize_t i, k = len(x)
    out = [None] * k
    for i in range(k):
        out[<Py_ssize_t>x[i] - 1] = i + 1
    return tuple(out)


def gamma_sym(tuple x, ys):
    cdef Py_ssize_t n = len(x), i, s, b, acc = 0, off
    cdef list xinv = [0] * n
    cdef list start = [0] * n
    cdef list ks = [len(y) for y in ys]
    for i in range(n):
        xinv[<Py_ssize_t>x[i] - 1] = i
    for s in range(n):
        b = xinv[s]
        start[b] = acc
        acc += <Py_ssize_t>ks[b]
    out = []
    for i in range(n):
        off = start[i]
        for v in ys[i]:
            out.append(off + <Py_ssize_t>v)
    return tuple(out)


def sym_crossed(tuple f, Py_ssize_t n, tuple y):
    cdef Py_ssize_t m = len(f) - 2, i, j, s, b, t, v, acc, pos
    cdef list counts = [0] * (n + 2)
    cdef list yinv = [0] * (n + 1)
    cdef list start = [0] * (n + 2)
    cdef list seen = [0] * (n + 2)
    cdef list pushed = [0] * (m + 2)
    cdef list sigma = [0] * m
    for i in range(1, m + 1):
        v = f[i]
        counts[v] = <Py_ssize_t>counts[v] + 1
    for j in range(1, n + 1):
        yinv[<Py_ssize_t>y[j - 1]] = j
    start[0] = 1
    acc = 1 + <Py_ssize_t>counts[0]
    pushed[m + 1] = n + 1
    pos = acc
    for s in range(1, n + 1):
        b = yinv[s]
        start[b] = acc
        acc += <Py_ssize_t>counts[b]
        for t in range(<Py_ssize_t>counts[b]):
            pushed[pos] = s
            pos += 1
    start[n + 1] = acc
    for t in range(<Py_ssize_t>counts[n + 1]):
        pushed[pos] = n + 1
        pos += 1
    for i in range(1, m + 1):
        v = f[i]
        sigma[i - 1] = <Py_ssize_t>start[v] + <Py_ssize_t>seen[v]
        seen[v] = <Py_ssize_t>seen[v] + 1
    return tuple(sigma), tuple(pushed)


def coset_min(group, tuple x):
    cdef Py_ssize_t i, k = len(x)
    best = None
    for g in group:
        out = [None] * k
        for i in range(k):
            out[i] = g[<Py_ssize_t>x[i] - 1]
        c = tuple(out)
        if best is None or c < best:
            best = c
    return best
