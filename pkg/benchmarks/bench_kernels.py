"""Time the numba and numpy kernel backends on Matsubara-sized inputs.

Run with ``python benchmarks/bench_kernels.py [--N 10000] [--repeat 5]``.
The end-to-end row runs a Drude decay-rate and barrier-dynamics evaluation
in a fresh interpreter per backend, so it includes import and JIT cache load.
"""

import argparse
import math
import os
import subprocess
import sys
import timeit

import numpy as np

from qkramers import _kernels

END_TO_END = """
import time
t0 = time.perf_counter()
from qkramers.bath import Drude
from qkramers.dynamics import barrier_dynamics, c1
from qkramers.matsubara import SystemParams, build_table
from qkramers.rate import decay_rate
model = Drude(1.0, 10.0)
decay_rate(build_table(model, 1.0), SystemParams(theta=1.0))
dyn = barrier_dynamics(model, 1.0)
for s in [0.01 * k for k in range(200)]:
    c1(dyn, s)
print(time.perf_counter() - t0)
"""


def kernel_cases(N):
    theta = 1.7
    nu = 2 * math.pi * np.arange(N + 1) / theta
    u = 1.0 / (nu * nu + 3.0 * nu + 1.0)
    signed = np.concatenate([-nu[:400][::-1], nu[1:400]])
    s = np.linspace(0.0, 3.0, 64)
    wx = np.full(s.size, s[1] - s[0])
    return {
        "compensated_sum": lambda k: k.compensated_sum(u),
        "sum_log1p": lambda k: k.sum_log1p(u),
        "c1_partial": lambda k: k.c1_partial(nu, u, 2.0, 10.0, 0.7),
        "c2_partial": lambda k: k.c2_partial(nu, u, 2.0, 10.0, 0.7),
        "cos_sum": lambda k: k.cos_sum(u, nu, 0.4),
        "path_functionals": lambda k: k.path_functionals(signed, 2.0, 10.0, s, wx),
    }


def best_time(fn, repeat):
    fn()  # compile or warm caches
    loops, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=loops, repeat=repeat)) / loops


def end_to_end(flag):
    env = {**os.environ, _kernels.DISABLE_ENV: flag}
    out = subprocess.run([sys.executable, "-c", END_TO_END], capture_output=True, text=True, env=env, check=True)
    return float(out.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--N", type=int, default=10_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = _kernels.implementations()
    if "numba" not in backends:
        sys.exit("numba is not installed; nothing to compare")
    print(f"{'kernel':<18}{'numpy [us]':>14}{'numba [us]':>14}{'speedup':>10}")
    for name, case in kernel_cases(args.N).items():
        slow = best_time(lambda: case(backends["numpy"]), args.repeat)
        fast = best_time(lambda: case(backends["numba"]), args.repeat)
        print(f"{name:<18}{slow * 1e6:>14.1f}{fast * 1e6:>14.1f}{slow / fast:>10.1f}")
    slow, fast = end_to_end("1"), end_to_end("0")
    print(f"{'end-to-end [s]':<18}{slow:>14.3f}{fast:>14.3f}{slow / fast:>10.1f}")


if __name__ == "__main__":
    main()
