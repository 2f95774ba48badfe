"""Huffman tree creation: a priority-queue oracle and the two-cursor array build.

The array build creates internal nodes into an append-only frequency queue
while reading leaves from the sorted input, so no sorting or dynamic
allocation happens inside the loop. The tree is kept as ``left``/``right``
child arrays plus a ``parent_address`` array, from which code lengths follow
by a single reverse sweep.
"""
from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from . import _backend, _pycore
from .errors import AccumulatorOverflowError, InvalidInputError, StructuralError

U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SymbolFreq:
    symbol: int
    freq: int


class SortedFreqTable:
    """Symbols with positive frequencies, nondecreasing by frequency."""

    def __init__(self, entries: Iterable):
        items = []
        for e in entries:
            if not isinstance(e, SymbolFreq):
                s, f = e
                e = SymbolFreq(s, f)
            items.append(e)
        self.entries: tuple[SymbolFreq, ...] = tuple(items)
        self._validate()

    def _validate(self):
        if len(self.entries) < 2:
            raise InvalidInputError(f"at least 2 symbols required, got {len(self.entries)}")
        seen = set()
        prev = None
        for e in self.entries:
            if not _is_int(e.symbol) or e.symbol < 0:
                raise InvalidInputError(f"symbol must be a non-negative integer: {e.symbol!r}")
            if not _is_int(e.freq) or e.freq < 1:
                raise InvalidInputError(f"frequency must be a positive integer: {e.freq!r}")
            if e.symbol in seen:
                raise InvalidInputError(f"duplicate symbol {e.symbol}")
            seen.add(e.symbol)
            if prev is not None and e.freq < prev:
                raise InvalidInputError("input not sorted by frequency")
            prev = e.freq

    @classmethod
    def from_counts(cls, counts: dict) -> "SortedFreqTable":
        """Build a table from ``{symbol: freq}``, ordered by (freq, symbol)."""
        return cls(sorted(counts.items(), key=lambda kv: (kv[1], kv[0])))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other):
        return isinstance(other, SortedFreqTable) and self.entries == other.entries

    def __repr__(self):
        return f"SortedFreqTable({[(e.symbol, e.freq) for e in self.entries]!r})"

    @property
    def symbols(self) -> list[int]:
        return [e.symbol for e in self.entries]

    @property
    def freqs(self) -> list[int]:
        return [e.freq for e in self.entries]

    def frequency_of(self) -> dict[int, int]:
        return {e.symbol: e.freq for e in self.entries}


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


@dataclass(frozen=True)
class Leaf:
    symbol: int


@dataclass(frozen=True)
class Internal:
    """Child slot holding internal node ``index``."""

    index: int


NodeRef = Union[Leaf, Internal]


@dataclass(frozen=True)
class HuffmanTreeArrays:
    left: tuple[NodeRef, ...]
    right: tuple[NodeRef, ...]
    parent_address: tuple[Optional[int], ...]
    internal_freqs: tuple[int, ...] = ()

    @property
    def num_internal(self) -> int:
        return len(self.left)

    @property
    def root(self) -> int:
        return self.num_internal - 1


def _coerce(table) -> SortedFreqTable:
    if isinstance(table, SortedFreqTable):
        return table
    return SortedFreqTable(table)


def _check_accumulator(table: SortedFreqTable) -> None:
    # the root frequency is the largest partial sum
    if sum(table.freqs) > U64_MAX:
        raise AccumulatorOverflowError("frequency sum exceeds the 64-bit accumulator")


def build_tree_reference(table) -> dict[int, int]:
    """Code lengths by repeatedly merging the two lightest nodes.

    Ties are broken by creation order (leaves in table order, then internal
    nodes in the order they were made), so the result is deterministic.
    """
    table = _coerce(table)
    _check_accumulator(table)
    n = len(table)
    heap = [(e.freq, idx) for idx, e in enumerate(table)]
    heapq.heapify(heap)
    children: dict[int, tuple[int, int]] = {}
    order = n
    while len(heap) > 1:
        fa, a = heapq.heappop(heap)
        fb, b = heapq.heappop(heap)
        children[order] = (a, b)
        heapq.heappush(heap, (fa + fb, order))
        order += 1
    root = heap[0][1]

    lengths: dict[int, int] = {}
    stack = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        if node < n:
            lengths[table[node].symbol] = depth
        else:
            a, b = children[node]
            stack.append((a, depth + 1))
            stack.append((b, depth + 1))
    return lengths


def build_tree_restructured(table, *, trace: Optional[Counter] = None, backend: str = "auto") -> HuffmanTreeArrays:
    """Single forward pass building ``n - 1`` internal nodes with two read cursors.

    Passing a ``trace`` counter runs the instrumented Python kernel and
    records ``node_created``, ``leaf_read``, ``internal_read`` and ``reorder``
    counts into it.
    """
    table = _coerce(table)
    _check_accumulator(table)
    freqs = table.freqs
    if trace is not None:
        left, right, parent, internal = _pycore.merge_tree(freqs, trace=trace)
    else:
        left, right, parent, internal = _backend.get(backend).merge_tree(freqs)
    symbols = table.symbols

    def ref(code):
        code = int(code)
        return Leaf(symbols[code]) if code >= 0 else Internal(~code)

    return HuffmanTreeArrays(
        left=tuple(ref(c) for c in left),
        right=tuple(ref(c) for c in right),
        parent_address=tuple(None if p < 0 else int(p) for p in parent),
        internal_freqs=tuple(int(f) for f in internal),
    )


def validate_arrays(arrays: HuffmanTreeArrays, table=None) -> None:
    """Raise ``StructuralError`` unless ``arrays`` encode a full binary tree."""
    m = arrays.num_internal
    if m < 1:
        raise StructuralError("tree has no internal nodes")
    if len(arrays.right) != m or len(arrays.parent_address) != m:
        raise StructuralError("left, right and parent_address lengths differ")
    root = m - 1
    if arrays.parent_address[root] is not None:
        raise StructuralError("root must not have a parent")

    seen_internal: dict[int, int] = {}
    leaves = []
    for t in range(m):
        for child in (arrays.left[t], arrays.right[t]):
            if isinstance(child, Leaf):
                leaves.append(child.symbol)
            elif isinstance(child, Internal):
                if not 0 <= child.index < m or child.index == root:
                    raise StructuralError(f"node {t} has invalid internal child {child.index}")
                if child.index in seen_internal:
                    raise StructuralError(f"internal node {child.index} has two parents")
                seen_internal[child.index] = t
            else:
                raise StructuralError(f"node {t} has an untagged child {child!r}")
    if len(leaves) != m + 1:
        raise StructuralError(f"expected {m + 1} leaves, found {len(leaves)}")
    if len(set(leaves)) != len(leaves):
        raise StructuralError("a symbol appears as more than one leaf")
    if table is not None and sorted(leaves) != sorted(_coerce(table).symbols):
        raise StructuralError("leaf symbols do not match the frequency table")

    for t in range(root):
        p = arrays.parent_address[t]
        if p is None:
            raise StructuralError(f"non-root node {t} has no parent address")
        if seen_internal.get(t) != p:
            raise StructuralError(f"parent_address[{t}] = {p} disagrees with the child arrays")
        if p <= t:
            # parents are always created after their children
            raise StructuralError(f"parent_address[{t}] = {p} does not lead toward the root")


def compute_bit_lengths(arrays: HuffmanTreeArrays, table=None) -> dict[int, int]:
    """Per-symbol code lengths from the parent-address array.

    Node depths are filled from the root downwards in one reverse sweep; each
    leaf child of node ``t`` gets length ``depth[t] + 1``.
    """
    validate_arrays(arrays, table)
    m = arrays.num_internal
    depth = [0] * m
    for t in range(m - 2, -1, -1):
        depth[t] = depth[arrays.parent_address[t]] + 1
    lengths: dict[int, int] = {}
    for t in range(m):
        for child in (arrays.left[t], arrays.right[t]):
            if isinstance(child, Leaf):
                lengths[child.symbol] = depth[t] + 1
    if table is not None:
        table = _coerce(table)
        return {s: lengths[s] for s in table.symbols}
    return lengths


def weighted_length(lengths: dict[int, int], table) -> int:
    """Sum of ``freq * length`` over the table."""
    table = _coerce(table)
    return sum(e.freq * lengths[e.symbol] for e in table)


def kraft_sum(lengths: dict[int, int]) -> Fraction:
    return sum((Fraction(1, 2**n) for n in lengths.values()), Fraction(0))
