"""Time the hot kernels on each available backend, then one end-to-end suite.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--suite crossed --n-max 3]

The end-to-end run uses whichever backend the package selected at import;
set NABLA_OPS_PURE=1 to time the fallback.
"""

import argparse
import itertools
import random
import time
import timeit

from nablaops import kernels
from nablaops.interval_cat import enumerate_morphisms
from nablaops.suites import SuiteConfig, run_suite


def workloads(rng: random.Random) -> dict:
    perms = list(itertools.permutations(range(1, 6)))
    pairs = [(rng.choice(perms), rng.choice(perms)) for _ in range(2000)]
    maps = [f.ext for f in enumerate_morphisms(4, 3)]
    ext_pairs = [(g.ext, rng.choice(maps)) for g in enumerate_morphisms(3, 4)]
    blocks = [((2, 1, 3), (rng.choice(perms[:2]), (1,), (2, 1))) for _ in range(500)]
    crossed = [(f, 3, (3, 1, 2)) for f in maps]
    group = perms[:24]
    cosets = [(group, rng.choice(perms)) for _ in range(200)]
    return {
        "perm_mul": ("perm_mul", pairs),
        "perm_inv": ("perm_inv", [(p,) for p, _ in pairs]),
        "compose_ext": ("compose_ext", ext_pairs),
        "gamma_sym": ("gamma_sym", blocks),
        "sym_crossed": ("sym_crossed", crossed),
        "coset_min": ("coset_min", cosets),
    }


def bench_kernels(repeat: int) -> None:
    work = workloads(random.Random(0))
    impls = kernels.backends()
    print(f"{'kernel':<12} " + " ".join(f"{name:>12}" for name in impls) + "   (us per call, best of repeats)")
    for label, (fn, args) in work.items():
        row = []
        for mod in impls.values():
            f = getattr(mod, fn)
            best = min(timeit.repeat(lambda: [f(*a) for a in args], number=5, repeat=repeat))
            row.append(best / (5 * len(args)) * 1e6)
        print(f"{label:<12} " + " ".join(f"{t:12.3f}" for t in row))


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--suite", default="crossed")
    p.add_argument("--n-max", type=int, default=3)
    args = p.parse_args()
    print(f"selected backend: {kernels.BACKEND}")
    bench_kernels(args.repeat)
    t0 = time.perf_counter()
    rep = run_suite(SuiteConfig(args.suite, n_max=args.n_max))
    dt = time.perf_counter() - t0
    print(f"suite {args.suite} N={args.n_max}: {'PASS' if rep.passed else 'FAIL'} in {dt:.2f}s")


if __name__ == "__main__":
    main()
