"""File formats: binary PGM images, frequency / length / array CSVs, token streams."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .huffman import HuffmanTreeArrays, Leaf, SortedFreqTable
from .stencil import Image, ResponseImage


def _pgm_tokens(data: bytes, count: int):
    """First ``count`` header tokens of a PGM and the offset just past them."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise InvalidInputError("truncated PGM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    if pos >= n or not data[pos:pos + 1].isspace():
        raise InvalidInputError("malformed PGM header")
    return tokens, pos + 1


def parse_pgm(data: bytes) -> Image:
    if not data.startswith(b"P5"):
        raise InvalidInputError("not a binary PGM (expected P5 magic)")
    tokens, offset = _pgm_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise InvalidInputError("malformed PGM header") from None
    if width <= 0 or height <= 0:
        raise InvalidInputError(f"invalid PGM size {width}x{height}")
    if maxval != 255:
        raise InvalidInputError(f"unsupported PGM maxval {maxval} (only 255)")
    raster = data[offset:offset + width * height]
    if len(raster) != width * height:
        raise InvalidInputError(f"PGM raster truncated: {len(raster)} of {width * height} bytes")
    return Image(np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy())


def read_pgm(path) -> Image:
    return parse_pgm(Path(path).read_bytes())


def pgm_bytes(image: Image) -> bytes:
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.pixels.tobytes()


def write_pgm(path, image) -> None:
    if isinstance(image, ResponseImage):
        image = image.to_image()
    Path(path).write_bytes(pgm_bytes(image))


def read_freq_csv(path) -> SortedFreqTable:
    """Read ``symbol,freq`` rows; the rows must already be sorted by freq."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidInputError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if header != ["symbol", "freq"]:
        raise InvalidInputError(f"{path}: expected header 'symbol,freq', got {','.join(rows[0])!r}")
    entries = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise InvalidInputError(f"{path}:{lineno}: expected 2 columns")
        try:
            entries.append((int(row[0]), int(row[1])))
        except ValueError:
            raise InvalidInputError(f"{path}:{lineno}: symbol and freq must be integers") from None
    if not entries:
        raise InvalidInputError(f"{path}: no frequency rows")
    return SortedFreqTable(entries)


def write_freq_csv(path, table: SortedFreqTable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["symbol", "freq"])
        for e in table:
            w.writerow([e.symbol, e.freq])


def write_lengths_csv(path, lengths: dict, table: SortedFreqTable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["symbol", "length"])
        for s in table.symbols:
            w.writerow([s, lengths[s]])


def read_lengths_csv(path) -> dict[int, int]:
    with open(path, newline="") as fh:
        r = csv.DictReader(fh)
        return {int(row["symbol"]): int(row["length"]) for row in r}


def write_arrays_csv(path, arrays: HuffmanTreeArrays) -> None:
    """One row per internal node: children as ``leaf``/``internal`` plus value."""
    def cell(ref):
        return ("leaf", ref.symbol) if isinstance(ref, Leaf) else ("internal", ref.index)

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "left_kind", "left", "right_kind", "right", "parent", "freq"])
        for t in range(arrays.num_internal):
            lk, lv = cell(arrays.left[t])
            rk, rv = cell(arrays.right[t])
            parent = arrays.parent_address[t]
            freq = arrays.internal_freqs[t] if arrays.internal_freqs else ""
            w.writerow([t, lk, lv, rk, rv, "" if parent is None else parent, freq])


def write_raw_csv(path, response: ResponseImage) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "value"])
        for (r, c), v in np.ndenumerate(response.values):
            w.writerow([r, c, int(v)])


def read_tokens(path):
    """Token stream from a PGM (raster order) or a ``value`` CSV.

    Returns ``(tokens, (height, width) or None)``.
    """
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        img = read_pgm(path)
        return img.pixels.ravel().tolist(), (img.height, img.width)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != ["value"]:
        raise InvalidInputError(f"{path}: expected a CSV with header 'value'")
    try:
        return [int(r[0]) for r in rows[1:] if r], None
    except ValueError:
        raise InvalidInputError(f"{path}: token values must be integers") from None


def write_tokens(path, tokens, shape=None) -> None:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        if shape is None or shape[0] * shape[1] != len(tokens):
            raise InvalidInputError(f"{path}: cannot write {len(tokens)} tokens as an image")
        arr = np.asarray(tokens)
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise InvalidInputError(f"{path}: token values outside [0, 255] cannot be written as PGM")
        write_pgm(path, Image(arr.reshape(shape)))
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["value"])
        for v in tokens:
            w.writerow([v])
