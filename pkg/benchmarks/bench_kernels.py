"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from gauss_sep import _core_py

try:
    from gauss_sep import _core
except ImportError:
    _core = None


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {"python": _core_py}
    if _core is not None:
        backends["cython"] = _core
    else:
        print("compiled extension not built; timing the fallback only")

    rng = np.random.default_rng(0)
    n = rng.uniform(-1, 3, 201 * 201)
    mabs = rng.uniform(0, 3, n.size)

    cases = [(f"gaussian_fock_matrix N={N}", lambda m, N=N: m.gaussian_fock_matrix(0.8, 0.5 + 0.3j, N)) for N in (20, 40, 60)]
    cases.append(("classify_grid 201x201", lambda m: m.classify_grid(n, mabs, 1e-9)))

    print(f"{'kernel':32s}" + "".join(f"{b:>12s}" for b in backends) + ("     speed-up" if len(backends) > 1 else ""))
    for label, call in cases:
        times = {b: _time(lambda m=m: call(m), args.repeat) for b, m in backends.items()}
        row = f"{label:32s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times.values())
        if len(times) > 1:
            row += f"{times['python'] / times['cython']:12.1f}x"
        print(row)
    if _core is not None:
        diff = np.max(np.abs(_core.gaussian_fock_matrix(0.8, 0.5 + 0.3j, 40) - _core_py.gaussian_fock_matrix(0.8, 0.5 + 0.3j, 40)))
        print(f"max |cython - python| at N=40: {diff:.1e}")


if __name__ == "__main__":
    main()
