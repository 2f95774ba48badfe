import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hlsrestruct.errors import AccumulatorOverflowError, InvalidInputError, StructuralError
from hlsrestruct.huffman import (
    U64_MAX,
    HuffmanTreeArrays,
    Internal,
    Leaf,
    SortedFreqTable,
    build_tree_reference,
    build_tree_restructured,
    compute_bit_lengths,
    kraft_sum,
    weighted_length,
)

from conftest import BACKENDS, random_table

A, B, C, D = 0, 1, 2, 3
ABCD = [(A, 1), (B, 1), (C, 2), (D, 4)]


def brute_force_optimum(freqs):
    """Minimum weighted length over every length vector meeting Kraft equality."""
    n = len(freqs)
    best = None
    for lengths in itertools.product(range(1, n), repeat=n):
        if sum(Fraction(1, 2**l) for l in lengths) != 1:
            continue
        w = sum(f * l for f, l in zip(freqs, lengths))
        best = w if best is None else min(best, w)
    return best


sorted_tables = st.lists(st.integers(1, 10_000), min_size=2, max_size=60).map(
    lambda fs: list(enumerate(sorted(fs))))


class TestTable:
    def test_rejects_single_symbol(self):
        with pytest.raises(InvalidInputError):
            SortedFreqTable([(0, 5)])

    def test_rejects_unsorted(self):
        with pytest.raises(InvalidInputError, match="not sorted"):
            SortedFreqTable([(0, 3), (1, 2)])

    @pytest.mark.parametrize("entries", [
        [(0, 1), (0, 2)],
        [(0, 0), (1, 2)],
        [(-1, 1), (1, 2)],
        [(0, 1.5), (1, 2)],
    ])
    def test_rejects_bad_entries(self, entries):
        with pytest.raises(InvalidInputError):
            SortedFreqTable(entries)

    def test_from_counts_sorts(self):
        t = SortedFreqTable.from_counts({7: 3, 2: 1, 5: 1})
        assert [(e.symbol, e.freq) for e in t] == [(2, 1), (5, 1), (7, 3)]


class TestReference:
    def test_two_symbols(self):
        assert build_tree_reference([(A, 1), (B, 1)]) == {A: 1, B: 1}

    def test_hand_merged_example(self):
        # (a,b)->2, (ab,c)->4, (abc,d)->8
        assert build_tree_reference(ABCD) == {A: 3, B: 3, C: 2, D: 1}

    def test_figure_shape(self):
        # F:1 B:1 C:2 D:3 E:4 A:5 merges to (((F,B),C),A) | (D,E): F, B at depth 4, A at depth 2
        fa, fb, fc, fd, fe, ff = range(6)
        table = [(ff, 1), (fb, 1), (fc, 2), (fd, 3), (fe, 4), (fa, 5)]
        lengths = build_tree_reference(table)
        assert lengths[ff] == 4 and lengths[fb] == 4
        assert lengths[fa] == 2

    def test_overflow(self):
        with pytest.raises(AccumulatorOverflowError):
            build_tree_reference([(0, U64_MAX), (1, U64_MAX)])

    def test_largest_sum_that_fits(self):
        lengths = build_tree_reference([(0, 1), (1, U64_MAX - 1)])
        assert lengths == {0: 1, 1: 1}

    @pytest.mark.parametrize("n", range(2, 7))
    def test_matches_brute_force(self, n, rng):
        for _ in range(5):
            table = random_table(rng, n, max_freq=50)
            lengths = build_tree_reference(table)
            assert weighted_length(lengths, table) == brute_force_optimum([f for _, f in table])


class TestRestructured:
    def test_two_symbols(self):
        arrays = build_tree_restructured([(A, 1), (B, 1)])
        assert arrays.left == (Leaf(A),)
        assert arrays.right == (Leaf(B),)
        assert arrays.parent_address == (None,)

    def test_hand_traced_example(self):
        arrays = build_tree_restructured(ABCD)
        assert arrays.left[0] == Leaf(A) and arrays.right[0] == Leaf(B)
        # tie 2 == 2 at node 1 and 4 == 4 at node 2: the leaf is taken first
        assert (arrays.left[1], arrays.right[1]) == (Leaf(C), Internal(0))
        assert (arrays.left[2], arrays.right[2]) == (Leaf(D), Internal(1))
        assert arrays.parent_address == (1, 2, None)
        assert arrays.internal_freqs == (2, 4, 8)
        lengths = compute_bit_lengths(arrays, ABCD)
        assert lengths == {A: 3, B: 3, C: 2, D: 1}
        assert weighted_length(lengths, ABCD) == 14

    def test_536_symbols(self, rng):
        table = random_table(rng, 536)
        assert build_tree_restructured(table).num_internal == 535

    def test_instrumentation(self, rng):
        table = random_table(rng, 200)
        trace = Counter()
        arrays = build_tree_restructured(table, trace=trace)
        assert trace["node_created"] == 199
        assert trace["reorder"] == 0
        assert trace["leaf_read"] == 200
        assert trace["internal_read"] == 198
        assert arrays == build_tree_restructured(table)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_deterministic(self, backend, rng):
        table = random_table(rng, 300)
        a = build_tree_restructured(table, backend=backend)
        b = build_tree_restructured(table, backend=backend)
        assert a == b
        assert repr(a) == repr(b)

    def test_overflow(self):
        with pytest.raises(AccumulatorOverflowError):
            build_tree_restructured([(0, 2**63), (1, 2**63)])

    def test_rejects_short_table(self):
        with pytest.raises(InvalidInputError):
            build_tree_restructured([(0, 1)])

    def test_rejects_unsorted(self):
        with pytest.raises(InvalidInputError):
            build_tree_restructured([(0, 5), (1, 1)])


class TestBitLengths:
    def test_two_symbols(self):
        assert compute_bit_lengths(build_tree_restructured([(A, 1), (B, 1)])) == {A: 1, B: 1}

    def test_cycle_detected(self):
        bad = HuffmanTreeArrays(
            left=(Leaf(0), Internal(2), Leaf(2)),
            right=(Leaf(1), Leaf(3), Internal(1)),
            parent_address=(2, 2, None),
        )
        with pytest.raises(StructuralError):
            compute_bit_lengths(bad)

    def test_missing_parent(self):
        arrays = build_tree_restructured(ABCD)
        bad = HuffmanTreeArrays(arrays.left, arrays.right, (None, 2, None))
        with pytest.raises(StructuralError):
            compute_bit_lengths(bad)

    def test_backward_parent(self):
        arrays = build_tree_restructured(ABCD)
        bad = HuffmanTreeArrays(arrays.left, arrays.right, (1, 0, None))
        with pytest.raises(StructuralError):
            compute_bit_lengths(bad)

    def test_leaf_symbols_must_match_table(self):
        bad = HuffmanTreeArrays((Leaf(0), Leaf(2)), (Leaf(1), Internal(0)), (1, None))
        with pytest.raises(StructuralError):
            compute_bit_lengths(bad, [(0, 1), (1, 1)])


@settings(max_examples=200, deadline=None)
@given(sorted_tables)
def test_restructured_is_optimal(table):
    arrays = build_tree_restructured(table)
    lengths = compute_bit_lengths(arrays, table)
    assert weighted_length(lengths, table) == weighted_length(build_tree_reference(table), table)
    assert kraft_sum(lengths) == 1


@settings(max_examples=200, deadline=None)
@given(sorted_tables)
def test_internal_frequencies_nondecreasing(table):
    arrays = build_tree_restructured(table)
    f = arrays.internal_freqs
    assert all(a <= b for a, b in zip(f, f[1:]))
    assert f[-1] == sum(x for _, x in table)


@settings(max_examples=100, deadline=None)
@given(sorted_tables)
def test_parent_chain_reaches_root(table):
    arrays = build_tree_restructured(table)
    root = arrays.num_internal - 1
    for t in range(arrays.num_internal):
        steps = 0
        while t != root:
            t = arrays.parent_address[t]
            steps += 1
            assert steps <= root
    internal_children = [c.index for c in arrays.left + arrays.right if isinstance(c, Internal)]
    assert sorted(internal_children) == list(range(root))


def test_reference_kraft_equality(rng):
    for n in (2, 3, 17, 256):
        lengths = build_tree_reference(random_table(rng, n))
        assert kraft_sum(lengths) == 1


def test_equal_frequencies_give_balanced_tree():
    table = [(s, 7) for s in range(16)]
    assert set(compute_bit_lengths(build_tree_restructured(table)).values()) == {4}
    assert set(build_tree_reference(table).values()) == {4}


def test_numpy_symbols_rejected():
    with pytest.raises(InvalidInputError):
        SortedFreqTable([(np.float64(0), 1), (1, 1)])
