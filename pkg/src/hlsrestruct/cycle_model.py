"""Closed-form clock-cycle models for the two kernels in both coding styles.

Forms, per (kernel, style):

* conv / restructured: ``width * height`` (one pixel per cycle, II = 1);
  the ``width + 1`` pipeline fill is reported separately as ``latency``.
* conv / software: ``pixel_cost * width * height + overhead``; only the
  innermost loop pipelines, so every pixel pays the full window cost.
* huffman / restructured: ``node_cost * (2n - 1) + fixed_latency``, linear in
  the number of tree nodes.
* huffman / software: ``a * n**2 + b * n + c``; each new node is inserted
  into the sorted list with a scan linear in the list length.

The ``paper-table`` profile is fitted to the measured Vivado HLS counts for a
640x480 image and a 536-symbol table:

* ``pixel_cost = 68, overhead = 1``: ``(20889601 - 1) / 307200 = 68``.
* ``a = 27, b = 248, c = 1``: ``27 * 536**2 + 248 * 536 + 1 = 7889921``.
* ``node_cost = 1047/357, fixed_latency = 1``: ``(3142 - 1) / 1071``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import ConfigurationError, InvalidInputError

KERNELS = ("huffman", "conv")
STYLES = ("software", "restructured")


@dataclass(frozen=True)
class LoopSchedule:
    kernel: str
    style: str
    n: Optional[int] = None
    width: Optional[int] = None
    height: Optional[int] = None

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise InvalidInputError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.style not in STYLES:
            raise InvalidInputError(f"style must be one of {STYLES}, got {self.style!r}")
        if self.kernel == "huffman":
            if not _pos_int(self.n):
                raise InvalidInputError(f"huffman schedule needs a positive integer n, got {self.n!r}")
        else:
            for name in ("width", "height"):
                v = getattr(self, name)
                if not _pos_int(v):
                    raise InvalidInputError(f"conv schedule needs a positive integer {name}, got {v!r}")
                if v < 3:
                    raise InvalidInputError(f"conv {name} must be >= 3, got {v}")

    @property
    def sizes(self) -> dict:
        if self.kernel == "huffman":
            return {"n": self.n}
        return {"width": self.width, "height": self.height}


def _pos_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v > 0


# offsets and lower-order terms may be zero; per-item costs may not
_ADDITIVE = frozenset({"conv_overhead", "huffman_sw_linear", "huffman_sw_constant", "huffman_fixed_latency"})


@dataclass(frozen=True)
class CalibrationProfile:
    name: str
    conv_pixel_cost: Fraction = Fraction(68)
    conv_overhead: Fraction = Fraction(1)
    huffman_sw_quadratic: Fraction = Fraction(27)
    huffman_sw_linear: Fraction = Fraction(248)
    huffman_sw_constant: Fraction = Fraction(1)
    huffman_node_cost: Fraction = Fraction(1047, 357)
    huffman_fixed_latency: Fraction = Fraction(1)

    def __post_init__(self):
        for f in self.constant_names():
            v = Fraction(getattr(self, f))
            if f in _ADDITIVE:
                if v < 0:
                    raise ConfigurationError(f"profile {self.name!r}: {f} must be nonnegative, got {v}")
            elif v <= 0:
                raise ConfigurationError(f"profile {self.name!r}: {f} must be positive, got {v}")
            object.__setattr__(self, f, v)

    @classmethod
    def constant_names(cls) -> list[str]:
        return [f for f in cls.__dataclass_fields__ if f != "name"]

    @classmethod
    def from_dict(cls, data: dict) -> "CalibrationProfile":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigurationError(f"unknown profile fields: {sorted(unknown)}")
        if "name" not in data:
            raise ConfigurationError("profile needs a name")
        kwargs = {k: (Fraction(str(v)) if k != "name" else v) for k, v in data.items()}
        return cls(**kwargs)

    def to_dict(self) -> dict:
        out = {"name": self.name}
        for f in self.constant_names():
            v = getattr(self, f)
            out[f] = int(v) if v.denominator == 1 else str(v)
        return out


PAPER_TABLE = CalibrationProfile("paper-table")
PROFILES = {PAPER_TABLE.name: PAPER_TABLE}


def get_profile(profile) -> CalibrationProfile:
    if isinstance(profile, CalibrationProfile):
        return profile
    try:
        return PROFILES[profile]
    except (KeyError, TypeError):
        raise ConfigurationError(f"unknown calibration profile {profile!r}; known: {sorted(PROFILES)}") from None


@dataclass(frozen=True)
class CycleEstimate:
    total_cycles: int
    latency: int = 0
    schedule: Optional[LoopSchedule] = None
    profile: Optional[str] = None
    meta: dict = field(default_factory=dict, compare=False)

    def throughput(self, freq_mhz: float) -> float:
        return throughput(self, freq_mhz)

    def report(self, freq_mhz: Optional[float] = None) -> dict:
        s = self.schedule
        return {
            "schema": 1,
            "kernel": s.kernel if s else None,
            "style": s.style if s else None,
            "sizes": s.sizes if s else {},
            "cycles": self.total_cycles,
            "latency": self.latency,
            "freq_mhz": freq_mhz,
            "throughput": None if freq_mhz is None else self.throughput(freq_mhz),
            "profile": self.profile,
        }


def _ceil(x: Fraction) -> int:
    return math.ceil(x)


def estimate_cycles(schedule: LoopSchedule, profile="paper-table") -> CycleEstimate:
    prof = get_profile(profile)
    s = schedule
    if s.kernel == "conv":
        pixels = s.width * s.height
        if s.style == "restructured":
            total, latency = pixels, s.width + 1
        else:
            total, latency = _ceil(prof.conv_pixel_cost * pixels + prof.conv_overhead), 0
    else:
        n = s.n
        if s.style == "restructured":
            total = _ceil(prof.huffman_node_cost * (2 * n - 1) + prof.huffman_fixed_latency)
        else:
            total = _ceil(prof.huffman_sw_quadratic * n * n + prof.huffman_sw_linear * n
                          + prof.huffman_sw_constant)
        latency = 0
    return CycleEstimate(total, latency, s, prof.name)


def throughput(estimate, freq_mhz: float) -> float:
    """Kernel completions per second at ``freq_mhz``."""
    if not freq_mhz > 0:
        raise InvalidInputError(f"frequency must be positive, got {freq_mhz!r}")
    cycles = estimate.total_cycles if isinstance(estimate, CycleEstimate) else int(estimate)
    return freq_mhz * 1e6 / cycles


@dataclass(frozen=True)
class ComparisonReport:
    kernel: str
    sizes: dict
    profile: str
    first: CycleEstimate
    second: CycleEstimate
    freqs_mhz: tuple[float, float]

    @property
    def cycle_ratio(self) -> float:
        return self.first.total_cycles / self.second.total_cycles

    @property
    def throughputs(self) -> tuple[float, float]:
        return (self.first.throughput(self.freqs_mhz[0]), self.second.throughput(self.freqs_mhz[1]))

    @property
    def throughput_ratio(self) -> float:
        a, b = self.throughputs
        return a / b

    @property
    def frequency_ratio(self) -> float:
        return self.freqs_mhz[0] / self.freqs_mhz[1]

    def report(self) -> dict:
        t1, t2 = self.throughputs
        return {
            "schema": 1,
            "kernel": self.kernel,
            "sizes": self.sizes,
            "profile": self.profile,
            "designs": [
                self.first.report(self.freqs_mhz[0]),
                self.second.report(self.freqs_mhz[1]),
            ],
            "ratios": {
                "cycles": self.cycle_ratio,
                "throughput": self.throughput_ratio,
                "frequency": self.frequency_ratio,
            },
        }


def compare(kernel: str, sizes: dict, profile="paper-table", freqs=(100.0, 100.0),
            styles=("software", "restructured")) -> ComparisonReport:
    """Estimate two styles of one kernel; ratios are first over second."""
    prof = get_profile(profile)
    if len(styles) != 2 or len(freqs) != 2:
        raise InvalidInputError("compare takes exactly two styles and two frequencies")
    a = estimate_cycles(LoopSchedule(kernel, styles[0], **sizes), prof)
    b = estimate_cycles(LoopSchedule(kernel, styles[1], **sizes), prof)
    for f in freqs:
        if not f > 0:
            raise InvalidInputError(f"frequency must be positive, got {f!r}")
    return ComparisonReport(kernel, dict(sizes), prof.name, a, b, (float(freqs[0]), float(freqs[1])))
