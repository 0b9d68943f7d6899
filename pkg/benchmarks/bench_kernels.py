"""Compare the compiled and pure-Python kernels on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat N] [--suite 2,3,6]

Prints one line per kernel with the best-of-N time for each backend and the
speedup.  Results from both backends are checked for equality first.  With
``--suite`` the listed acceptance checks are also timed end to end under each
backend, in fresh processes so that no cache is shared.
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time
import timeit

from northcott_lab import _pykernels
from northcott_lab.nf import cyclotomic_poly

try:
    from northcott_lab import _ckernels
except ImportError:
    _ckernels = None


def cases(rng: random.Random) -> dict[str, tuple]:
    mod12 = list(cyclotomic_poly(12)[:-1])
    mod105 = list(cyclotomic_poly(105)[:-1])
    small = lambda n, b: [rng.randint(-b, b) for _ in range(n)]
    big = [rng.getrandbits(400) - (1 << 399) for _ in range(48)]
    return {
        "mulmod  Q(zeta12), small": ("mulmod", (small(4, 50), small(4, 50), mod12), 20000),
        "mulmod  Q(zeta105), small": ("mulmod", (small(48, 50), small(48, 50), mod105), 200),
        "mulmod  Q(zeta105), 400-bit": ("mulmod", (big, big[::-1], mod105), 20),
        "reduce  Q(zeta105), len 200": ("reduce_mod", (small(200, 10 ** 6), mod105), 500),
        "squares y^2=x^3-7x+10, H=60": ("square_candidates", (1, 0, -7, 10, 60), 5),
        "squares y^2=x^3+17, H=200": ("square_candidates", (1, 0, 0, 17, 200), 1),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--suite", help="comma-separated acceptance checks to time end to end")
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation`")
        return 1
    print(f"{'kernel':32s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, (fn, call, number) in cases(random.Random(args.seed)).items():
        py, cy = getattr(_pykernels, fn), getattr(_ckernels, fn)
        if [int(v) if not isinstance(v, tuple) else v for v in py(*call)] != \
                [int(v) if not isinstance(v, tuple) else v for v in cy(*call)]:
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        tp = min(timeit.repeat(lambda: py(*call), number=number, repeat=args.repeat)) / number
        tc = min(timeit.repeat(lambda: cy(*call), number=number, repeat=args.repeat)) / number
        print(f"{name:32s} {tp * 1e6:9.1f}us {tc * 1e6:9.1f}us {tp / tc:7.1f}x")
    if args.suite:
        print()
        for n in args.suite.split(","):
            tp, tc = suite_time(int(n), pure=True), suite_time(int(n), pure=False)
            print(f"{'check ' + n + ' end to end':32s} {tp:9.2f}s  {tc:9.2f}s  {tp / tc:7.2f}x")
    return 0


def suite_time(number: int, pure: bool) -> float:
    env = dict(os.environ, NORTHCOTT_LAB_PURE="1" if pure else "0")
    code = f"from northcott_lab.verify import run_criterion; assert run_criterion({number}).ok"
    t0 = time.perf_counter()
    subprocess.run([sys.executable, "-c", code], env=env, check=True)
    return time.perf_counter() - t0


if __name__ == "__main__":
    sys.exit(main())
