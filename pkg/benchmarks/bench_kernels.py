"""Compare the compiled and pure-Python kernels on the hot loops.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on identical inputs under every available backend; outputs
are checked for equality before timings are reported.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from toylocal.core import all_states
from toylocal.kernels import available_backends
from toylocal.rng import Stream


def _workloads():
    rng = Stream(2024)
    states = all_states(8)
    # validation of a large product measurement: one column_check per outcome set
    big = [s for s in states if s[0] < 2]
    labels = np.array([0 if s[0] < 2 else 1 for s in states], dtype=np.int64)
    codes = np.arange(len(states), dtype=np.int64)
    return {
        "teleport_batch (100k trials)": lambda k: k.teleport_batch(rng.key, 100_000),
        "column_check (32k rows x 8)": lambda k: k.column_check(big),
        "encode_rows (65k rows x 8)": lambda k: k.encode_rows(states),
        "outcome_table (65k states)": lambda k: k.outcome_table(codes, labels, 4**8),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing the Python fallback only")
    print(f"{'kernel':32s}" + "".join(f"{name:>12s}" for name in backends) + "     speedup")
    for label, fn in _workloads().items():
        outs = {name: fn(mod) for name, mod in backends.items()}
        ref = outs["python"]
        if not all(_same(ref, o) for o in outs.values()):
            raise SystemExit(f"{label}: backends disagree")
        times = {name: min(timeit.repeat(lambda m=mod: fn(m), number=1, repeat=args.repeat))
                 for name, mod in backends.items()}
        cells = "".join(f"{times[name] * 1e3:10.2f}ms" for name in backends)
        speed = f"{times['python'] / times['cython']:10.1f}x" if "cython" in times else ""
        print(f"{label:32s}{cells}{speed}")


if __name__ == "__main__":
    main()
