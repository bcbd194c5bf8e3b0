import itertools
import os
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from nablaops import kernels
from nablaops.interval_cat import enumerate_morphisms

BACKENDS = kernels.backends()


def test_compiled_backend_built():
    # the extension is part of the editable install; the fallback is still exercised below
    assert "compiled" in BACKENDS
    assert kernels.BACKEND == "compiled"


def test_pure_switch():
    code = "import nablaops; print(nablaops.BACKEND)"
    env = dict(os.environ, NABLA_OPS_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


perm = st.integers(0, 6).flatmap(lambda n: st.permutations(list(range(1, n + 1))).map(tuple))


@pytest.mark.parametrize("name", sorted(BACKENDS))
class TestBackends:
    @given(st.data())
    def test_perm_kernels(self, name, data):
        K, R = BACKENDS[name], BACKENDS["python"]
        x = data.draw(perm)
        y = data.draw(st.permutations(list(x)).map(tuple))
        assert K.perm_mul(x, y) == R.perm_mul(x, y)
        assert K.perm_inv(x) == R.perm_inv(x)
        assert K.perm_mul(x, K.perm_inv(x)) == tuple(range(1, len(x) + 1))

    @given(st.lists(perm, min_size=1, max_size=4), st.data())
    def test_gamma(self, name, ys, data):
        K, R = BACKENDS[name], BACKENDS["python"]
        x = data.draw(st.permutations(list(range(1, len(ys) + 1))).map(tuple))
        assert K.gamma_sym(x, ys) == R.gamma_sym(x, ys)

    def test_compose_and_crossed(self, name):
        K, R = BACKENDS[name], BACKENDS["python"]
        for m in range(4):
            for n in range(4):
                for f in enumerate_morphisms(m, n):
                    for g in enumerate_morphisms(n, 2):
                        assert K.compose_ext(g.ext, f.ext) == R.compose_ext(g.ext, f.ext)
                    for y in itertools.permutations(range(1, n + 1)):
                        assert K.sym_crossed(f.ext, n, y) == R.sym_crossed(f.ext, n, y)

    def test_coset_min(self, name):
        K = BACKENDS[name]
        group = [(1, 2, 3), (2, 1, 3)]
        # the coset of x is {x, swap o x}; swapping the values 1 and 2
        assert K.coset_min(group, (3, 2, 1)) == (3, 1, 2)
        assert K.coset_min(group, (3, 1, 2)) == (3, 1, 2)
        assert K.coset_min(group, (2, 3, 1)) == (1, 3, 2)
