"""The ten acceptance criteria, each run through the named suites at the
stated truncations. Every criterion prints one ``criterion N: PASS|FAIL``
line to the terminal; run with ``-s`` or read the summary.

Also runnable directly: ``python3 tests/test_acceptance.py``.
"""

import time

import pytest

from nablaops.suites import SuiteConfig, run_suite

RESULTS: dict[int, str] = {}


def _run(suite, n, **kw):
    t0 = time.perf_counter()
    rep = run_suite(SuiteConfig(suite, n_max=n, **kw))
    return rep, time.perf_counter() - t0


def _ids(rep):
    return {c.id for c in rep.checks}


def crit1():
    rep, dt = _run("crossed", 4)
    assert rep.passed, rep.failures()
    assert dt < 60, f"{dt:.1f}s"
    return f"{len(rep.checks)} checks, m,n,l<=4, {dt:.1f}s"


def crit2():
    rep, _ = _run("rst", 3)
    c = rep.get("rst:oracle")
    assert c.passed and c.witness is None
    return c.detail


def crit3():
    rep, _ = _run("closure", 4)
    assert rep.passed, rep.failures()
    for cid in ("closure:triv-is-inr", "closure:kecbar-is-inr"):
        assert cid in _ids(rep)
    assert any("idempot" in i for i in _ids(rep)) and any("monoton" in i for i in _ids(rep))
    return f"{len(rep.checks)} checks on nabla<=4"


def crit4():
    rep, _ = _run("quotal", 4)
    assert rep.passed, rep.failures()
    want = {f"quotal:roundtrip[{k}]" for k in ("Triv", "Inr", "DecBar", "KecBar", "RSt")}
    assert want <= _ids(rep)
    return "5 families, N=4"


def crit5():
    rep, _ = _run("counts", 2)
    assert rep.get("count:E(2,1)").detail == "10"
    assert rep.get("count:Et(2,1)").detail == "5"
    assert rep.get("count:Et(1,1)").detail == "2"
    assert rep.get("count:oracle").passed
    return "10 5 2"


def crit6():
    rep, dt = _run("double", 3)
    assert rep.passed, rep.failures()
    ids = _ids(rep)
    assert any(i.startswith("G=>E:") for i in ids) and any(i.startswith("Gt=>Et:") for i in ids)
    assert {"pullback-square:s", "pullback-square:t"} <= ids
    assert dt < 300, f"{dt:.1f}s"
    return f"{len(rep.checks)} checks, {dt:.1f}s"


def crit7():
    rep, _ = _run("phi", 3)
    assert rep.passed, rep.failures()
    assert rep.get("Phi:isomorphism").passed and rep.get("Phi~:isomorphism").passed
    return "Phi and Phi~ isomorphisms at N=3"


def crit8():
    rep, _ = _run("inert-lift", 3)
    assert rep.passed, rep.failures()
    assert rep.get("operator:pullback").passed
    fib = rep.get("inert-lift:fibers-iso")
    assert fib.detail == "0:iso 1:iso 2:iso 3:iso"
    return rep.get("inert-lift:standard").detail


def crit9():
    rep, _ = _run("roundtrip", 3)
    assert rep.passed, rep.failures()
    for M in ("terminal", "sample", "parity"):
        assert f"{M}:roundtrip:K:multicat-iso:multihoms" in _ids(rep)
        assert f"{M}:roundtrip:K:multifunctor:equivariant" in _ids(rep)
    assert rep.get("roundtrip:Gt-homs").detail == "1 1 2 6"
    return "terminal, sample, parity; Gt homs 1 1 2 6"


def crit10():
    rep, dt = _run("segal", 3)
    assert rep.get("Z/2:commutativity").detail == "COMMUTATIVE"
    lz = rep.get("left-zero:verdict")
    assert lz.passed and lz.detail.startswith("NOT COMMUTATIVE") and "witness=(a,b)" in lz.detail
    assert rep.get("segal:agrees").passed
    assert rep.passed
    assert dt < 30, f"{dt:.1f}s"
    return f"{rep.get('segal:agrees').detail}, {dt:.1f}s"


CRITERIA = [crit1, crit2, crit3, crit4, crit5, crit6, crit7, crit8, crit9, crit10]


def _record(i, fn):
    try:
        detail = fn()
    except AssertionError as exc:
        RESULTS[i] = "FAIL"
        return f"criterion {i}: FAIL {exc}".rstrip(), exc
    RESULTS[i] = "PASS"
    return f"criterion {i}: PASS {detail}", None


@pytest.mark.parametrize("i", range(1, 11), ids=lambda i: f"criterion{i}")
def test_criterion(i, capsys):
    line, exc = _record(i, CRITERIA[i - 1])
    with capsys.disabled():
        print(f"\n{line}")
    if exc is not None:
        raise exc


if __name__ == "__main__":
    import sys
    ok = True
    for i, fn in enumerate(CRITERIA, 1):
        line, exc = _record(i, fn)
        print(line, flush=True)
        ok &= exc is None
    sys.exit(0 if ok else 1)
