"""Time the compiled and pure-Python sweep kernels on the same workloads.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.
"""
import argparse
import math
import timeit

import numpy as np

from giantwqed import kernels
from giantwqed.engine import scatter_sweep
from giantwqed.model import build_braided_array, build_separate_array
from giantwqed.transfer import cascade_sweep, chebyshev_u

CASES = {
    "general N=10 M=2 (4001 pts)": (lambda b: scatter_sweep(_SEP, _GRID, backend=b)),
    "general braided N=4 (4001 pts)": (lambda b: scatter_sweep(_BRAID, _GRID, backend=b)),
    "retarded N=3 M=3 (4001 pts)": (lambda b: scatter_sweep(_NM, _GRID, backend=b)),
    "cascade N=10 M=2 (4001 pts)": (lambda b: cascade_sweep(_SEP, _GRID, backend=b)),
    "chebyshev U_200 (4001 pts)": (lambda b: chebyshev_u(200, np.linspace(-2, 2, 4001), backend=b)),
}

_SEP = build_separate_array(10, 2, math.pi / 4)
_BRAID = build_braided_array(4, 0.35 * math.pi)
_NM = build_separate_array(3, 3, 0.7, regime="non-markovian")
_GRID = np.linspace(-8, 8, 4001) + 1e-7


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = kernels.available_backends()
    names = list(backends)
    print(f"{'case':34s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in CASES.items():
        times = []
        for name in names:
            b = backends[name]
            fn(b)
            times.append(min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)))
        row = f"{label:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
