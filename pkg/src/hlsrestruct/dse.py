"""Exhaustive design-space exploration over template parameters.

Each point is scored by the calibrated cycle model and a block-RAM proxy,
and the (cycles, bram) Pareto frontier is reported with both minimized.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass

from . import cycle_model
from .errors import SearchSpaceError

DEFAULT_LIMIT = 100_000
BRAM_BITS = 18 * 1024
# arrays below this size go to registers / distributed RAM instead of BRAM
REGISTER_THRESHOLD_BITS = 1024
HUFFMAN_BRAM = {"restructured": 2, "software": 9}

TEMPLATE_KERNEL = {"conv2d_stream": "conv", "huffman_tree": "huffman"}
DEFAULTS = {
    "conv2d_stream": {"K": 3, "pixel_bits": 8, "style": "restructured"},
    "huffman_tree": {"style": "restructured"},
}


def estimate_bram(template: str, params: dict) -> int:
    """Block RAMs used by one design.

    Streaming convolution keeps each of its K line-buffer rows in a separate
    memory, so each row costs ``ceil(row_bits / 18Kb)`` blocks once it is too
    large for registers. The software convolution reads the frame directly and
    uses none; the Huffman counts are fixed per architecture.
    """
    if template not in TEMPLATE_KERNEL:
        raise SearchSpaceError(f"unknown template {template!r}")
    p = {**DEFAULTS[template], **params}
    style = p["style"]
    if style not in cycle_model.STYLES:
        raise SearchSpaceError(f"unknown style {style!r}")
    if template == "huffman_tree":
        return HUFFMAN_BRAM[style]
    if style == "software":
        return 0
    row_bits = p["width"] * p["pixel_bits"]
    if row_bits < REGISTER_THRESHOLD_BITS:
        return 0
    return p["K"] * math.ceil(row_bits / BRAM_BITS)


@dataclass(frozen=True)
class DesignPoint:
    template: str
    params: tuple  # ((name, value), ...) in search-space order
    cycles: int
    bram: int

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    @property
    def objectives(self) -> tuple[int, int]:
        return (self.cycles, self.bram)


@dataclass
class SearchSpace:
    template: str
    params: dict[str, list]
    limit: int = DEFAULT_LIMIT

    def __post_init__(self):
        if self.template not in TEMPLATE_KERNEL:
            raise SearchSpaceError(f"unknown template {self.template!r}")
        if not self.params:
            raise SearchSpaceError("search space has no parameters")
        for name, values in self.params.items():
            if not isinstance(values, (list, tuple)) or len(values) == 0:
                raise SearchSpaceError(f"parameter {name!r} has an empty value list")

    @property
    def size(self) -> int:
        return math.prod(len(v) for v in self.params.values())

    @classmethod
    def from_dict(cls, data: dict) -> "SearchSpace":
        try:
            return cls(data["template"], dict(data["params"]), data.get("limit", DEFAULT_LIMIT))
        except (KeyError, TypeError) as exc:
            raise SearchSpaceError(f"malformed search space: {exc!r}") from exc

    @classmethod
    def load(cls, path) -> "SearchSpace":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _evaluate(template, assignment, profile) -> DesignPoint:
    p = {**DEFAULTS[template], **dict(assignment)}
    kernel = TEMPLATE_KERNEL[template]
    if kernel == "conv":
        sched = cycle_model.LoopSchedule("conv", p["style"], width=p["width"], height=p["height"])
    else:
        sched = cycle_model.LoopSchedule("huffman", p["style"], n=p["n"])
    cycles = cycle_model.estimate_cycles(sched, profile).total_cycles
    return DesignPoint(template, tuple(assignment), cycles, estimate_bram(template, p))


def explore(space: SearchSpace, profile="paper-table") -> list[DesignPoint]:
    """Evaluate every point of the cartesian product, in enumeration order."""
    if space.size > space.limit:
        raise SearchSpaceError(f"search space has {space.size} points, limit is {space.limit}")
    prof = cycle_model.get_profile(profile)
    names = list(space.params)
    return [_evaluate(space.template, tuple(zip(names, combo)), prof)
            for combo in itertools.product(*(space.params[n] for n in names))]


def dominates(a, b) -> bool:
    return a.cycles <= b.cycles and a.bram <= b.bram and (a.cycles < b.cycles or a.bram < b.bram)


def pareto(points) -> list:
    """Points not dominated in (cycles, bram), in input order.

    Exact duplicates appear once; distinct designs with equal objectives are
    all kept since neither dominates the other.
    """
    points = list(points)
    if not points:
        raise SearchSpaceError("pareto frontier of an empty point set")
    # sweep in (cycles, bram) order: a point survives if it has the least bram
    # among equal cycles and strictly less bram than every faster point
    order = sorted(range(len(points)), key=lambda i: (points[i].cycles, points[i].bram))
    keep = set()
    best_faster = math.inf
    start = 0
    while start < len(order):
        c = points[order[start]].cycles
        end = start
        while end < len(order) and points[order[end]].cycles == c:
            end += 1
        group_min = points[order[start]].bram
        if group_min < best_faster:
            keep.update(i for i in order[start:end] if points[i].bram == group_min)
        best_faster = min(best_faster, group_min)
        start = end
    frontier = []
    seen = set()
    for i, p in enumerate(points):
        key = _identity(p)
        if i in keep and key not in seen:
            frontier.append(p)
            seen.add(key)
    return frontier


def _identity(p):
    if isinstance(p, DesignPoint):
        return (p.template, repr(p.params), p.cycles, p.bram)
    return repr(p)


def write_csv(points, frontier, path) -> None:
    on = {id(p) for p in frontier}
    names = [k for k, _ in points[0].params] if points else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["cycles", "bram", "on_frontier"])
        for p in points:
            w.writerow([v for _, v in p.params] + [p.cycles, p.bram, int(id(p) in on)])
