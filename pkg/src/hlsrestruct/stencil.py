"""3x3 convolution: direct reference and line-buffer/window-buffer streaming.

The streaming model consumes one pixel per push (one simulated cycle). Each
push shifts the current column of the line buffer up by one row, reads that
column into the window buffer and drops the oldest window column. Once
``width + 1`` pushes have elapsed, every push emits the response for the
center lagging the input cursor by one row and one column.

Responses are ``D_x + D_y`` in raw mode. Display mode stores
``min(|D_x| + |D_y|, 255)`` so results can be written as 8-bit images.
Centers whose window would leave the image are 0 in both modes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _backend
from .errors import InvalidInputError, ProtocolError

MODES = ("raw", "display")


@dataclass(frozen=True)
class Coeffs3x3:
    rows: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise InvalidInputError("coefficients must be 3x3")
        for v in (v for r in rows for v in r):
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise InvalidInputError(f"coefficient {v!r} is not an integer")
            if not -128 <= v <= 127:
                raise InvalidInputError(f"coefficient {v} outside signed 8-bit range")
        object.__setattr__(self, "rows", tuple(tuple(int(v) for v in r) for r in rows))

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)


def as_coeffs(c) -> Coeffs3x3:
    if isinstance(c, Coeffs3x3):
        return c
    return Coeffs3x3(tuple(tuple(int(v) for v in r) for r in np.asarray(c).tolist()))


SOBEL_GX_STANDARD = Coeffs3x3(((-1, 0, 1), (-2, 0, 2), (-1, 0, 1)))
SOBEL_GY_STANDARD = Coeffs3x3(((-1, -2, -1), (0, 0, 0), (1, 2, 1)))
# as printed alongside the software listing; GX is not a derivative operator
SOBEL_GX_PAPER = Coeffs3x3(((1, 0, 1), (2, 0, 2), (-1, 0, 1)))
SOBEL_GY_PAPER = Coeffs3x3(((1, 2, 1), (0, 0, 0), (-1, -2, -1)))

KERNELS = {
    "sobel-standard": (SOBEL_GX_STANDARD, SOBEL_GY_STANDARD),
    "sobel-paper": (SOBEL_GX_PAPER, SOBEL_GY_PAPER),
}


def load_coeffs(path) -> tuple[Coeffs3x3, Coeffs3x3]:
    """Read ``{"gx": [[...]], "gy": [[...]]}`` from a JSON file."""
    with open(path) as fh:
        data = json.load(fh)
    try:
        return Coeffs3x3(data["gx"]), Coeffs3x3(data["gy"])
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"{path}: expected keys 'gx' and 'gy' with 3x3 integer lists") from exc


@dataclass(frozen=True, eq=False)
class Image:
    """8-bit grayscale image stored as a (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise InvalidInputError("image must be two-dimensional")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise InvalidInputError("pixel values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_pixels(cls, width: int, height: int, pixels: Sequence[int]) -> "Image":
        if len(pixels) != width * height:
            raise InvalidInputError(f"expected {width * height} pixels, got {len(pixels)}")
        return cls(np.asarray(pixels).reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        return isinstance(other, Image) and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class ResponseImage:
    values: np.ndarray
    mode: str = "raw"

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other):
        return (isinstance(other, ResponseImage) and self.mode == other.mode
                and np.array_equal(self.values, other.values))

    def to_image(self) -> Image:
        if self.mode != "display":
            raise InvalidInputError("only display-mode responses map onto 8-bit images")
        return Image(self.values.astype(np.uint8))


def _as_image(image) -> Image:
    return image if isinstance(image, Image) else Image(image)


def _check_size(image: Image):
    if image.width < 3 or image.height < 3:
        raise InvalidInputError(f"image must be at least 3x3, got {image.width}x{image.height}")


def _check_mode(mode):
    if mode not in MODES:
        raise InvalidInputError(f"mode must be one of {MODES}, got {mode!r}")


def convolve_reference(image, gx=SOBEL_GX_STANDARD, gy=SOBEL_GY_STANDARD, mode="raw",
                       backend="auto") -> ResponseImage:
    """Direct evaluation of both 3x3 dot products at every interior center."""
    image = _as_image(image)
    _check_size(image)
    _check_mode(mode)
    gx, gy = as_coeffs(gx), as_coeffs(gy)
    out = _backend.get(backend).reference_convolve(
        image.pixels, gx.as_array(), gy.as_array(), mode == "display")
    return ResponseImage(out, mode)


def _respond(window, gx, gy, display) -> int:
    dx = sum(gx[r][c] * window[r][c] for r in range(3) for c in range(3))
    dy = sum(gy[r][c] * window[r][c] for r in range(3) for c in range(3))
    if display:
        return min(abs(dx) + abs(dy), 255)
    return dx + dy


class StreamingConvState:
    """Cycle-level model of the line buffer and 3x3 window buffer.

    Line-buffer rows are separate memories; a push touches each row with at
    most one read and one write, which the per-push counters enforce. The
    window is only ever read whole.
    """

    def __init__(self, width: int, height: int, gx=SOBEL_GX_STANDARD, gy=SOBEL_GY_STANDARD,
                 mode: str = "raw"):
        if width < 3 or height < 3:
            raise InvalidInputError(f"image must be at least 3x3, got {width}x{height}")
        _check_mode(mode)
        self.width = width
        self.height = height
        self.gx = as_coeffs(gx).rows
        self.gy = as_coeffs(gy).rows
        self.mode = mode
        self.line_buffer = [[0] * width for _ in range(3)]
        self._window = [[0, 0, 0] for _ in range(3)]
        self.i = 0
        self.j = 0
        self.pushes = 0
        self.emitted = 0
        self.row_reads = [0, 0, 0]
        self.row_writes = [0, 0, 0]
        self.window_reads = 0
        self._push_reads = [0, 0, 0]
        self._push_writes = [0, 0, 0]

    @property
    def latency(self) -> int:
        return self.width + 1

    @property
    def done(self) -> bool:
        return self.pushes == self.width * self.height

    @property
    def window(self) -> tuple[tuple[int, ...], ...]:
        """Whole-window snapshot (rows top to bottom, newest column last)."""
        self.window_reads += 1
        return tuple(tuple(r) for r in self._window)

    def _lb_read(self, row, col):
        self._push_reads[row] += 1
        if self._push_reads[row] > 1:
            raise ProtocolError(f"line buffer row {row} read twice in one cycle")
        self.row_reads[row] += 1
        return self.line_buffer[row][col]

    def _lb_write(self, row, col, value):
        self._push_writes[row] += 1
        if self._push_writes[row] > 1:
            raise ProtocolError(f"line buffer row {row} written twice in one cycle")
        self.row_writes[row] += 1
        self.line_buffer[row][col] = value

    def push(self, pixel: int) -> Optional[tuple[tuple[int, int], int]]:
        """Advance one cycle; return ``((row, col), value)`` once past the latency."""
        if self.done:
            raise ProtocolError(f"push beyond image extent ({self.width}x{self.height})")
        if not 0 <= pixel <= 255:
            raise InvalidInputError(f"pixel value {pixel} outside [0, 255]")
        j = self.j
        self._push_reads = [0, 0, 0]
        self._push_writes = [0, 0, 0]

        # vertical shift of column j; row 0's old value is discarded unread
        mid = self._lb_read(1, j)
        low = self._lb_read(2, j)
        self._lb_write(0, j, mid)
        self._lb_write(1, j, low)
        self._lb_write(2, j, pixel)

        # new window column comes from the values just written to column j
        column = (mid, low, pixel)
        for k in range(3):
            w = self._window[k]
            w[0], w[1], w[2] = w[1], w[2], column[k]

        p = self.pushes
        self.pushes += 1
        self.j += 1
        if self.j == self.width:
            self.j = 0
            self.i += 1

        if p < self.latency:
            return None
        return self._emit(p - self.latency)

    def _emit(self, center):
        r, c = divmod(center, self.width)
        window = self.window
        if 0 < r < self.height - 1 and 0 < c < self.width - 1:
            value = _respond(window, self.gx, self.gy, self.mode == "display")
        else:
            value = 0
        self.emitted += 1
        return (r, c), value

    def flush(self) -> list[tuple[tuple[int, int], int]]:
        """Border outputs still owed after the last push (all 0)."""
        if not self.done:
            raise ProtocolError("flush before all pixels were pushed")
        total = self.width * self.height
        out = []
        while self.emitted < total:
            out.append((divmod(self.emitted, self.width), 0))
            self.emitted += 1
        return out


def push_pixel(state: StreamingConvState, pixel: int):
    return state.push(pixel)


def convolve_streaming(image, gx=SOBEL_GX_STANDARD, gy=SOBEL_GY_STANDARD, mode="raw",
                       backend="auto") -> tuple[ResponseImage, int]:
    """Stream every pixel in raster order; return ``(response, pushes)``.

    ``backend='instrumented'`` drives :class:`StreamingConvState` push by
    push; 'compiled' and 'python' run the same protocol as a flat kernel.
    """
    image = _as_image(image)
    _check_size(image)
    _check_mode(mode)
    gx, gy = as_coeffs(gx), as_coeffs(gy)
    if backend == "instrumented":
        state = StreamingConvState(image.width, image.height, gx, gy, mode)
        out = np.zeros((image.height, image.width), dtype=np.int64)
        for pixel in image.pixels.ravel().tolist():
            tagged = state.push(pixel)
            if tagged is not None:
                (r, c), v = tagged
                out[r, c] = v
        state.flush()
        return ResponseImage(out, mode), state.pushes
    out, pushes = _backend.get(backend).stream_convolve(
        image.pixels, gx.as_array(), gy.as_array(), mode == "display")
    return ResponseImage(out, mode), int(pushes)
