"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is checked for agreement between backends before it is timed.
"""

import argparse
import timeit

import numpy as np

from eomq import _backend

CASES = [
    ("bessel_j_sequence(40, 1.7)", lambda k: k.bessel_j_sequence(40, 1.7)),
    ("bessel_j_sequence(200, 12.0)", lambda k: k.bessel_j_sequence(200, 12.0)),
]


def pm_case(size, m):
    jvals = np.ascontiguousarray(_backend.BACKENDS["python"].bessel_j_sequence(2 * (size + 40), m))
    return (
        f"pm_matrix({size} modes, m={m})",
        lambda k: k.pm_matrix(jvals, 40, 40 + size - 1, 0.3, 0.1, 1),
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if "cython" not in _backend.BACKENDS:
        print("compiled kernels not built; only the pure-Python backend is available")
    cases = CASES + [pm_case(80, 2.0), pm_case(300, 4.0)]
    names = sorted(_backend.BACKENDS)
    print(f"{'kernel':34s}" + "".join(f"{n:>14s}" for n in names) + f"{'speedup':>10s}")
    for label, call in cases:
        results = [np.asarray(call(_backend.BACKENDS[n])) for n in names]
        for r in results[1:]:
            if np.max(np.abs(r - results[0])) > 1e-13 * max(1.0, np.max(np.abs(results[0]))):
                raise SystemExit(f"{label}: backends disagree")
        best = {}
        for n in names:
            k = _backend.BACKENDS[n]
            timer = timeit.Timer(lambda: call(k))
            loops, _ = timer.autorange()
            best[n] = min(timer.repeat(args.repeat, loops)) / loops
        speed = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{label:34s}" + "".join(f"{best[n] * 1e6:12.1f}us" for n in names) + f"{speed:9.1f}x")


if __name__ == "__main__":
    main()
