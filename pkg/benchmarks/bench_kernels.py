"""Time the compiled and pure-Python backends on the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from hlsrestruct import COMPILED_AVAILABLE
from hlsrestruct.huffman import build_tree_restructured
from hlsrestruct.stencil import convolve_reference, convolve_streaming


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, (480, 640), dtype=np.uint8)
    freqs = np.sort(rng.integers(1, 10_000, 4096))
    table = list(zip(rng.permutation(4096).tolist(), freqs.tolist()))

    cases = [
        ("stream conv 640x480", lambda b: convolve_streaming(img, backend=b)),
        ("reference conv 640x480", lambda b: convolve_reference(img, backend=b)),
        ("huffman tree n=4096", lambda b: build_tree_restructured(table, backend=b)),
    ]
    backends = ["python"] + (["compiled"] if COMPILED_AVAILABLE else [])
    if not COMPILED_AVAILABLE:
        print("compiled extension not built; timing the Python backend only")
    print(f"{'kernel':<26}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases:
        times = [best(lambda: fn(b), args.repeat) for b in backends]
        row = f"{name:<26}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
