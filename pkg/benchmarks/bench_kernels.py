"""Compare the compiled and numpy kernels on the optimiser's (mu, t) grid.

    python benchmarks/bench_kernels.py [--repeat 200]
"""

import argparse
import timeit

import numpy as np

from dpskey import _pykernels
from dpskey.concentration import log_inv

try:
    from dpskey import _kernels
except ImportError:
    _kernels = None

L = log_inv(1.0 / (6 * 2**58))


def grid_args(eta, method):
    mu = np.geomspace(1e-7, 1e-1, 49)
    t = np.linspace(0.5, 0.999, 25)
    return (mu, t, eta, 1e13, 0.01, 58.0, 28.0, L, L, 1.16, method, False)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    backends = {"python": _pykernels}
    if _kernels is not None:
        backends["compiled"] = _kernels
    else:
        print("compiled extension not built; timing the fallback only")

    print(f"{'case':<22}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for eta in (1.0, 0.01):
        for method, label in ((0, "kato"), (1, "azuma")):
            a = grid_args(eta, method)
            times = {}
            for name, mod in backends.items():
                best = min(timeit.repeat(lambda: mod.ell_grid(*a), number=1, repeat=args.repeat))
                times[name] = best
            row = f"{label + f' eta={eta:g}':<22}" + "".join(
                f"{times[n] * 1e3:>11.3f} ms" for n in backends)
            if "compiled" in times:
                row += f"{times['python'] / times['compiled']:>9.2f}x"
            print(row)

    for n, m in ((1e10, 100.0), (1e4, 10.0)):
        times = {name: min(timeit.repeat(lambda: mod.kato_star(n, m, L), number=1000, repeat=5)) / 1000
                 for name, mod in backends.items()}
        row = f"{f'kato_star n={n:g}':<22}" + "".join(f"{times[k] * 1e6:>11.2f} us" for k in backends)
        if "compiled" in times:
            row += f"{times['python'] / times['compiled']:>9.2f}x"
        print(row)


if __name__ == "__main__":
    main()
