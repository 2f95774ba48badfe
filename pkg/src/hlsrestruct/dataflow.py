"""Streaming dataflow graphs of kernel instances joined by bounded FIFOs.

Graphs follow Kahn process network rules: a firing consumes a fixed number
of tokens from each input and blocks until they are present, so the output
streams do not depend on the order in which runnable instances are picked.
Only feed-forward graphs in ``pipeline`` or ``split-join`` form are accepted.
"""
from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import cycle_model
from .errors import DeadlockError, GraphValidationError, InvalidInputError, ProtocolError
from .stencil import KERNELS, Coeffs3x3, StreamingConvState

KINDS = ("conv2d_stream", "threshold", "passthrough", "custom-pointwise", "split", "join", "downsample")
PATTERNS = ("pipeline", "split-join")
JOIN_OPS = {"sum": sum, "max": max, "min": min}


@dataclass(frozen=True)
class Port:
    instance: str
    port: str

    @classmethod
    def parse(cls, text) -> Optional["Port"]:
        if text is None:
            return None
        if isinstance(text, Port):
            return text
        inst, sep, port = str(text).partition(".")
        return cls(inst, port if sep else "")

    def __str__(self):
        return f"{self.instance}.{self.port}"


@dataclass
class KernelInstance:
    id: str
    kind: str
    params: dict = field(default_factory=dict)


@dataclass
class FifoChannel:
    src: Optional[Port]
    dst: Optional[Port]
    depth: int = 2

    @property
    def name(self) -> str:
        return f"{self.src}->{self.dst}"


@dataclass
class PatternDescription:
    name: str
    stages: list = field(default_factory=list)
    split: Optional[str] = None
    branches: list = field(default_factory=list)
    join: Optional[str] = None

    def members(self) -> list[str]:
        if self.name == "pipeline":
            return list(self.stages)
        out = [self.split] if self.split else []
        for b in self.branches:
            out.extend(b)
        if self.join:
            out.append(self.join)
        return out


@dataclass
class StreamGraph:
    instances: list[KernelInstance]
    channels: list[FifoChannel]
    pattern: PatternDescription
    inputs: dict[str, Port] = field(default_factory=dict)
    outputs: dict[str, Port] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "StreamGraph":
        try:
            instances = [KernelInstance(i["id"], i["kind"], dict(i.get("params", {})))
                         for i in data["instances"]]
            channels = [FifoChannel(Port.parse(c.get("src")), Port.parse(c.get("dst")), c.get("depth", 2))
                        for c in data.get("channels", [])]
            p = data["pattern"]
            pattern = PatternDescription(p["name"], list(p.get("stages", [])), p.get("split"),
                                         [list(b) for b in p.get("branches", [])], p.get("join"))
            inputs = {k: Port.parse(v) for k, v in data.get("inputs", {}).items()}
            outputs = {k: Port.parse(v) for k, v in data.get("outputs", {}).items()}
        except (KeyError, TypeError, AttributeError) as exc:
            raise InvalidInputError(f"malformed graph description: {exc!r}") from exc
        return cls(instances, channels, pattern, inputs, outputs)

    @classmethod
    def load(cls, path) -> "StreamGraph":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def instance(self, iid) -> KernelInstance:
        for inst in self.instances:
            if inst.id == iid:
                return inst
        raise KeyError(iid)


@dataclass(frozen=True)
class GraphIssue:
    code: str
    message: str


# ---------------------------------------------------------------------------
# kernel behaviour


class _Actor:
    """One kernel instance during simulation."""

    inputs: tuple = ("in",)
    outputs: tuple = ("out",)

    def __init__(self, inst: KernelInstance):
        self.id = inst.id
        self.params = inst.params

    def need(self) -> dict[str, int]:
        return {p: 1 for p in self.inputs}

    def produce(self) -> dict[str, int]:
        return {p: 1 for p in self.outputs}

    def pending(self) -> bool:
        """True if the actor still owes output without further input."""
        return False

    def fire(self, tokens: dict[str, list]) -> dict[str, list]:
        raise NotImplementedError


class _Pointwise(_Actor):
    def __init__(self, inst, fn):
        super().__init__(inst)
        self.fn = fn

    def fire(self, tokens):
        return {"out": [self.fn(tokens["in"][0])]}


class _Split(_Actor):
    def __init__(self, inst):
        super().__init__(inst)
        self.outputs = tuple(f"out{b}" for b in range(inst.params["fanout"]))

    def fire(self, tokens):
        v = tokens["in"][0]
        return {p: [v] for p in self.outputs}


class _Join(_Actor):
    def __init__(self, inst):
        super().__init__(inst)
        self.inputs = tuple(f"in{b}" for b in range(inst.params["fanin"]))
        self.op = JOIN_OPS[inst.params.get("op", "sum")]

    def fire(self, tokens):
        return {"out": [self.op(tokens[p][0] for p in self.inputs)]}


class _Downsample(_Actor):
    def __init__(self, inst):
        super().__init__(inst)
        self.factor = inst.params["factor"]

    def need(self):
        return {"in": self.factor}

    def fire(self, tokens):
        return {"out": [tokens["in"][0]]}


class _Conv(_Actor):
    """Streaming 3x3 convolution; emits one response token per firing."""

    def __init__(self, inst):
        super().__init__(inst)
        gx, gy = conv_coeffs(inst.params)
        self.state = StreamingConvState(inst.params["width"], inst.params["height"], gx, gy,
                                        inst.params.get("mode", "raw"))
        self.total = self.state.width * self.state.height

    def need(self):
        return {"in": 0 if self.state.done else 1}

    def produce(self):
        if self.state.done:
            return {"out": 1}
        # the push that completes the latency window starts emitting
        return {"out": 1 if self.state.pushes >= self.state.latency else 0}

    def pending(self):
        return self.state.done and self.state.emitted < self.total

    def fire(self, tokens):
        if self.state.done:
            # trailing centers are all on the border
            self.state.emitted += 1
            return {"out": [0]}
        pixel = tokens["in"][0]
        if not isinstance(pixel, int) or not 0 <= pixel <= 255:
            raise ProtocolError(f"{self.id}: pixel token {pixel!r} outside [0, 255]")
        tagged = self.state.push(pixel)
        return {"out": [] if tagged is None else [tagged[1]]}


def conv_coeffs(params) -> tuple[Coeffs3x3, Coeffs3x3]:
    if "gx" in params or "gy" in params:
        return Coeffs3x3(params["gx"]), Coeffs3x3(params["gy"])
    return KERNELS[params.get("kernel", "sobel-standard")]


def _pointwise_fn(params) -> Callable[[int], int]:
    if "fn" in params:
        return params["fn"]
    scale = params.get("scale", 1)
    offset = params.get("offset", 0)
    clamp = params.get("clamp")

    def fn(v):
        v = v * scale + offset
        if clamp is not None:
            v = max(clamp[0], min(clamp[1], v))
        return v
    return fn


def _threshold_fn(params) -> Callable[[int], int]:
    t = params["threshold"]
    hi = params.get("high", 255)
    lo = params.get("low", 0)
    return lambda v: hi if v > t else lo


def _make_actor(inst: KernelInstance) -> _Actor:
    if inst.kind == "passthrough":
        return _Pointwise(inst, lambda v: v)
    if inst.kind == "threshold":
        return _Pointwise(inst, _threshold_fn(inst.params))
    if inst.kind == "custom-pointwise":
        return _Pointwise(inst, _pointwise_fn(inst.params))
    if inst.kind == "split":
        return _Split(inst)
    if inst.kind == "join":
        return _Join(inst)
    if inst.kind == "downsample":
        return _Downsample(inst)
    if inst.kind == "conv2d_stream":
        return _Conv(inst)
    raise InvalidInputError(f"unknown kernel kind {inst.kind!r}")


def _ports(inst: KernelInstance) -> tuple[tuple, tuple]:
    if inst.kind == "split":
        return ("in",), tuple(f"out{b}" for b in range(inst.params.get("fanout", 0)))
    if inst.kind == "join":
        return tuple(f"in{b}" for b in range(inst.params.get("fanin", 0))), ("out",)
    return ("in",), ("out",)


# ---------------------------------------------------------------------------
# validation


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _param_issues(inst: KernelInstance) -> list[GraphIssue]:
    p = inst.params
    bad = []
    if inst.kind not in KINDS:
        return [GraphIssue("unknown-kind", f"{inst.id}: unknown kind {inst.kind!r}")]
    if inst.kind == "conv2d_stream":
        for dim in ("width", "height"):
            if not _is_int(p.get(dim)) or p[dim] < 3:
                bad.append(f"{dim} must be an integer >= 3")
        if p.get("mode", "raw") not in ("raw", "display"):
            bad.append("mode must be 'raw' or 'display'")
        try:
            conv_coeffs(p)
        except (KeyError, InvalidInputError, TypeError) as exc:
            bad.append(f"bad coefficients ({exc})")
    elif inst.kind == "threshold":
        if not isinstance(p.get("threshold"), (int, float)):
            bad.append("threshold must be a number")
    elif inst.kind == "split":
        if not _is_int(p.get("fanout")) or p["fanout"] < 2:
            bad.append("fanout must be an integer >= 2")
    elif inst.kind == "join":
        if not _is_int(p.get("fanin")) or p["fanin"] < 2:
            bad.append("fanin must be an integer >= 2")
        if p.get("op", "sum") not in JOIN_OPS:
            bad.append(f"op must be one of {sorted(JOIN_OPS)}")
    elif inst.kind == "downsample":
        if not _is_int(p.get("factor")) or p["factor"] < 1:
            bad.append("factor must be an integer >= 1")
    return [GraphIssue("param", f"{inst.id}: {m}") for m in bad]


def validate_graph(graph: StreamGraph) -> list[GraphIssue]:
    """Structural and pattern checks; an empty list means the graph is valid."""
    issues: list[GraphIssue] = []
    ids = [i.id for i in graph.instances]
    by_id = {i.id: i for i in graph.instances}
    if len(set(ids)) != len(ids):
        issues.append(GraphIssue("duplicate-id", "instance ids must be unique"))
    for inst in graph.instances:
        issues.extend(_param_issues(inst))
    if issues:
        return issues

    in_ports = {Port(i.id, p) for i in graph.instances for p in _ports(i)[0]}
    out_ports = {Port(i.id, p) for i in graph.instances for p in _ports(i)[1]}
    uses: dict[Port, int] = {}
    edges: dict[str, set] = {i: set() for i in ids}

    def use(port, side, where):
        valid = in_ports if side == "in" else out_ports
        if port is None:
            issues.append(GraphIssue("dangling-port", f"{where}: unconnected {'sink' if side == 'in' else 'source'}"))
            return False
        if port not in valid:
            issues.append(GraphIssue("dangling-port", f"{where}: no {side}put port {port}"))
            return False
        uses[port] = uses.get(port, 0) + 1
        return True

    for ch in graph.channels:
        ok_src = use(ch.src, "out", f"channel {ch.name}")
        ok_dst = use(ch.dst, "in", f"channel {ch.name}")
        if not _is_int(ch.depth) or ch.depth < 1:
            issues.append(GraphIssue("depth", f"channel {ch.name}: depth must be an integer >= 1"))
        if ok_src and ok_dst:
            edges[ch.src.instance].add(ch.dst.instance)
    for name, port in graph.inputs.items():
        use(port, "in", f"input {name!r}")
    for name, port in graph.outputs.items():
        use(port, "out", f"output {name!r}")
    if not graph.inputs:
        issues.append(GraphIssue("dangling-port", "graph has no external input"))
    if not graph.outputs:
        issues.append(GraphIssue("dangling-port", "graph has no external output"))

    for port in sorted(in_ports | out_ports, key=str):
        n = uses.get(port, 0)
        if n == 0:
            issues.append(GraphIssue("dangling-port", f"port {port} is not connected"))
        elif n > 1:
            issues.append(GraphIssue("port-conflict", f"port {port} is connected {n} times"))

    if _topo_order(ids, edges) is None:
        issues.append(GraphIssue("cycle", "feedback edges are not supported"))

    reached = set()
    frontier = [p.instance for p in graph.inputs.values() if p is not None and p.instance in by_id]
    while frontier:
        node = frontier.pop()
        if node in reached:
            continue
        reached.add(node)
        frontier.extend(edges[node])
    for iid in ids:
        if iid not in reached:
            issues.append(GraphIssue("unreachable", f"instance {iid} is not reachable from any input"))

    issues.extend(_pattern_issues(graph, by_id))
    return issues


def _topo_order(ids, edges) -> Optional[list[str]]:
    indeg = {i: 0 for i in ids}
    for src in ids:
        for dst in edges[src]:
            indeg[dst] += 1
    ready = deque(i for i in ids if indeg[i] == 0)
    order = []
    while ready:
        n = ready.popleft()
        order.append(n)
        for d in sorted(edges[n]):
            indeg[d] -= 1
            if indeg[d] == 0:
                ready.append(d)
    return order if len(order) == len(ids) else None


def _pattern_issues(graph: StreamGraph, by_id) -> list[GraphIssue]:
    pat = graph.pattern
    if pat.name not in PATTERNS:
        return [GraphIssue("pattern", f"unknown pattern {pat.name!r}; supported: {PATTERNS}")]
    issues = []
    members = pat.members()
    if sorted(members) != sorted(by_id) or len(set(members)) != len(members):
        issues.append(GraphIssue("pattern", "pattern bindings must name every instance exactly once"))
        return issues
    links = {(c.src.instance, c.dst.instance) for c in graph.channels if c.src and c.dst}

    def chain(seq, what):
        for a, b in zip(seq, seq[1:]):
            if (a, b) not in links:
                issues.append(GraphIssue("pattern", f"{what}: no channel from {a} to {b}"))

    if pat.name == "pipeline":
        chain(pat.stages, "pipeline")
        if len(graph.channels) != len(pat.stages) - 1:
            issues.append(GraphIssue("pattern", "pipeline stages must form a single chain"))
        bound_in = {p.instance for p in graph.inputs.values() if p}
        bound_out = {p.instance for p in graph.outputs.values() if p}
        if pat.stages and (bound_in != {pat.stages[0]} or bound_out != {pat.stages[-1]}):
            issues.append(GraphIssue("pattern", "pipeline input must feed the first stage and output come from the last"))
    else:
        split, join = by_id.get(pat.split), by_id.get(pat.join)
        if split is None or split.kind != "split" or join is None or join.kind != "join":
            issues.append(GraphIssue("pattern", "split-join needs a 'split' instance and a 'join' instance"))
            return issues
        k = len(pat.branches)
        if split.params["fanout"] != k or join.params["fanin"] != k:
            issues.append(GraphIssue("pattern", f"fan-out/fan-in arity must equal the {k} branches"))
        for b, branch in enumerate(pat.branches):
            chain([pat.split] + list(branch) + [pat.join], f"branch {b}")
    return issues


# ---------------------------------------------------------------------------
# simulation


@dataclass
class RunStats:
    firings: dict[str, int]
    max_occupancy: dict[str, int]
    steps: int


def run_functional(graph: StreamGraph, inputs: dict, *, schedule: str = "round-robin",
                   seed: Optional[int] = None, stats: Optional[dict] = None) -> dict[str, list]:
    """Simulate the graph on ``{input name: token list}``; return output token lists.

    ``schedule`` is 'round-robin' (declared order) or 'random' (seeded pick
    among runnable instances). Either way the outputs are identical.
    """
    issues = validate_graph(graph)
    if issues:
        raise GraphValidationError(issues)
    missing = set(graph.inputs) - set(inputs)
    if missing:
        raise InvalidInputError(f"no tokens given for inputs {sorted(missing)}")
    if schedule not in ("round-robin", "random"):
        raise InvalidInputError(f"unknown schedule {schedule!r}")
    rng = random.Random(seed)

    actors = [_make_actor(i) for i in graph.instances]
    # queue feeding each input port, and (queue, depth) behind each output port
    feed: dict[Port, tuple[deque, Optional[int], str]] = {}
    drain: dict[Port, tuple[deque, Optional[int], str]] = {}
    outputs: dict[str, list] = {}
    for ch in graph.channels:
        q = deque()
        feed[ch.dst] = drain[ch.src] = (q, ch.depth, ch.name)
    for name, port in graph.inputs.items():
        feed[port] = (deque(inputs[name]), None, f"input {name}")
    for name, port in graph.outputs.items():
        sink = deque()
        drain[port] = (sink, None, f"output {name}")
        outputs[name] = sink

    max_occ = {ch.name: 0 for ch in graph.channels}
    firings = {a.id: 0 for a in actors}

    def runnable(a: _Actor) -> bool:
        for p, n in a.need().items():
            if len(feed[Port(a.id, p)][0]) < n:
                return False
        if all(n == 0 for n in a.need().values()) and not a.pending():
            return False
        for p, n in a.produce().items():
            q, depth, _ = drain[Port(a.id, p)]
            if depth is not None and len(q) + n > depth:
                return False
        return True

    steps = 0
    while True:
        ready = [a for a in actors if runnable(a)]
        if not ready:
            break
        actor = ready[0] if schedule == "round-robin" else rng.choice(ready)
        tokens = {p: [feed[Port(actor.id, p)][0].popleft() for _ in range(n)]
                  for p, n in actor.need().items()}
        produced = actor.fire(tokens)
        for p, vals in produced.items():
            q, depth, name = drain[Port(actor.id, p)]
            q.extend(vals)
            if depth is not None:
                if len(q) > depth:
                    raise ProtocolError(f"FIFO {name} exceeded depth {depth}")
                max_occ[name] = max(max_occ[name], len(q))
        firings[actor.id] += 1
        steps += 1
        if schedule == "round-robin":
            # rotate so every runnable instance gets a turn
            actors.append(actors.pop(actors.index(actor)))

    blocked = [f"{name} ({len(q)} tokens)" for q, _, name in feed.values() if q]
    blocked += [f"{a.id} (output pending)" for a in actors if a.pending()]
    if blocked:
        raise DeadlockError("no runnable instance but tokens remain: " + ", ".join(blocked), blocked)
    if stats is not None:
        stats["run"] = RunStats(firings, max_occ, steps)
    return {k: list(v) for k, v in outputs.items()}


# ---------------------------------------------------------------------------
# cycle estimate


def estimate_graph_cycles(graph: StreamGraph, profile="paper-table", tokens=None) -> cycle_model.CycleEstimate:
    """Steady-state cycles of the slowest instance plus the longest fill-latency path.

    Every instance moves at most one token per port per cycle. ``tokens`` sets
    the length of each input stream (an int for all inputs, or a dict by input
    name); it is inferred for inputs that feed a convolution.
    """
    issues = validate_graph(graph)
    if issues:
        raise GraphValidationError(issues)
    prof = cycle_model.get_profile(profile)
    by_id = {i.id: i for i in graph.instances}
    edges: dict[str, set] = {i: set() for i in by_id}
    for ch in graph.channels:
        edges[ch.src.instance].add(ch.dst.instance)
    order = _topo_order(list(by_id), edges)

    tokens_in: dict[Port, int] = {}
    for name, port in graph.inputs.items():
        if isinstance(tokens, dict) and name in tokens:
            n = tokens[name]
        elif _is_int(tokens):
            n = tokens
        elif by_id[port.instance].kind == "conv2d_stream":
            p = by_id[port.instance].params
            n = p["width"] * p["height"]
        else:
            raise InvalidInputError(f"token count for input {name!r} cannot be inferred; pass tokens=")
        tokens_in[port] = n

    dst_of = {ch.src: ch.dst for ch in graph.channels}
    cycles: dict[str, int] = {}
    latency: dict[str, int] = {}
    for iid in order:
        inst = by_id[iid]
        ins, outs = _ports(inst)
        n_in = [tokens_in[Port(iid, p)] for p in ins]
        if inst.kind == "conv2d_stream":
            w, h = inst.params["width"], inst.params["height"]
            est = cycle_model.estimate_cycles(cycle_model.LoopSchedule("conv", "restructured", width=w, height=h), prof)
            steady, lat, n_out = est.total_cycles, est.latency, w * h
        elif inst.kind == "downsample":
            steady, lat, n_out = n_in[0], 0, n_in[0] // inst.params["factor"]
        elif inst.kind == "join":
            steady, lat, n_out = max(n_in), 0, min(n_in)
        else:
            steady, lat, n_out = n_in[0], 0, n_in[0]
        cycles[iid] = steady
        latency[iid] = lat
        for p in outs:
            if Port(iid, p) in dst_of:
                tokens_in[dst_of[Port(iid, p)]] = n_out

    # longest accumulated latency over source-to-sink paths
    path: dict[str, int] = {}
    for iid in order:
        preds = [path[s] for s in by_id if iid in edges[s]]
        path[iid] = latency[iid] + (max(preds) if preds else 0)
    fill = max(path.values())
    total = max(cycles.values()) + fill
    return cycle_model.CycleEstimate(total, fill, None, prof.name,
                                     {"stage_cycles": cycles, "stage_latency": latency})
