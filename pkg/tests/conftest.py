import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from hlsrestruct import COMPILED_AVAILABLE

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

CC = shutil.which("cc") or shutil.which("gcc")

BACKENDS = ["python"] + (["compiled"] if COMPILED_AVAILABLE else [])

needs_cc = pytest.mark.skipif(CC is None, reason="no C compiler on PATH")


def random_table(rng, n, max_freq=10_000):
    """Sorted (symbol, freq) pairs with distinct shuffled symbols."""
    freqs = sorted(int(f) for f in rng.integers(1, max_freq + 1, n))
    symbols = rng.permutation(n).tolist()
    return list(zip(symbols, freqs))


def naive_conv(pixels, gx, gy):
    """Plain nested-loop 3x3 convolution on lists; the slow third route."""
    h = len(pixels)
    w = len(pixels[0])
    out = [[0] * w for _ in range(h)]
    for i in range(1, h - 1):
        for j in range(1, w - 1):
            dx = dy = 0
            for ro in (-1, 0, 1):
                for co in (-1, 0, 1):
                    v = pixels[i + ro][j + co]
                    dx += gx[ro + 1][co + 1] * v
                    dy += gy[ro + 1][co + 1] * v
            out[i][j] = dx + dy
    return out


def compile_c(src: Path, exe: Path, *extra):
    subprocess.run([CC, "-std=c99", "-O2", "-DHLSR_HARNESS", "-o", str(exe), str(src), *extra],
                   check=True, capture_output=True, text=True)
    return exe


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param
