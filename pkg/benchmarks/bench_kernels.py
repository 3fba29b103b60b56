"""Time the compiled and pure-Python kernels on the same workloads.

    python benchmarks/bench_kernels.py [--to 10**6] [--repeat 3]
"""
import argparse
import time

from parityscan import backend
from parityscan.cli import CORE_CHECKS, parse_int
from parityscan.codes import SQUARE_CHECKS, check_mask


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t)
    return min(times), result


def workloads(hi):
    core = check_mask(CORE_CHECKS)
    n_hi = min(3000, hi)
    return [
        (f"count_primes [0, {hi})", lambda k: k.count_primes(0, hi)),
        (f"scan_pairs parity [3, {hi})", lambda k: k.scan_pairs(3, hi, check_mask(["parity"]), 100)),
        (f"scan_pairs core [3, {hi})", lambda k: k.scan_pairs(3, hi, core, 100)),
        (f"scan_pairs parity [2^61, 2^61 + {hi // 100})",
         lambda k: k.scan_pairs(2**61, 2**61 + hi // 100, check_mask(["parity"]), 100)),
        (f"scan_squares [1, {n_hi})", lambda k: k.scan_squares(1, n_hi, check_mask(SQUARE_CHECKS), 100)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--to", type=parse_int, default=10**6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    names = backend.available()
    if "compiled" not in names:
        print("compiled extension not built; only the python backend will be timed")
    kerns = {n: backend.load(n) for n in names}
    print(f"{'workload':<44}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in workloads(args.to):
        times, results = {}, {}
        for n, k in kerns.items():
            times[n], results[n] = best_of(lambda: fn(k), args.repeat)
        assert len({repr(r) for r in results.values()}) == 1, f"backends disagree on {label}"
        row = f"{label:<44}" + "".join(f"{times[n]:>11.3f}s" for n in names)
        if len(names) > 1:
            row += f"{times['python'] / times['compiled']:>11.0f}x"
        print(row)


if __name__ == "__main__":
    main()
