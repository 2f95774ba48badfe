import numpy as np
import pytest

from hlsrestruct.errors import InvalidInputError
from hlsrestruct.formats import (
    parse_pgm,
    pgm_bytes,
    read_freq_csv,
    read_lengths_csv,
    read_pgm,
    read_tokens,
    write_arrays_csv,
    write_freq_csv,
    write_lengths_csv,
    write_pgm,
    write_raw_csv,
    write_tokens,
)
from hlsrestruct.huffman import SortedFreqTable, build_tree_restructured, compute_bit_lengths
from hlsrestruct.stencil import Image, convolve_reference


def test_pgm_round_trip(tmp_path, rng):
    img = Image(rng.integers(0, 256, (5, 7)))
    write_pgm(tmp_path / "a.pgm", img)
    assert read_pgm(tmp_path / "a.pgm") == img


def test_pgm_with_comments():
    data = b"P5\n# made by hand\n3 2 # width height\n255\n" + bytes(range(6))
    assert parse_pgm(data).pixels.tolist() == [[0, 1, 2], [3, 4, 5]]


def test_pgm_raster_may_start_with_whitespace_byte():
    data = b"P5 2 1 255\n" + bytes([10, 32])
    assert parse_pgm(data).pixels.tolist() == [[10, 32]]


@pytest.mark.parametrize("data,fragment", [
    (b"P2\n2 2\n255\n0 0 0 0", "P5"),
    (b"P5\n2 2\n65535\n" + bytes(8), "maxval"),
    (b"P5\n2 2\n255\n" + bytes(3), "truncated"),
    (b"P5\n2", "header"),
    (b"P5\nx 2\n255\n" + bytes(4), "header"),
    (b"P5\n0 2\n255\n", "size"),
])
def test_pgm_errors(data, fragment):
    with pytest.raises(InvalidInputError, match=fragment):
        parse_pgm(data)


def test_pgm_bytes_header():
    assert pgm_bytes(Image(np.zeros((2, 3), np.uint8))).startswith(b"P5\n3 2\n255\n")


def test_display_response_written_as_pgm(tmp_path, rng):
    resp = convolve_reference(rng.integers(0, 256, (6, 6)), mode="display")
    write_pgm(tmp_path / "d.pgm", resp)
    assert read_pgm(tmp_path / "d.pgm").pixels.tolist() == resp.values.tolist()


def test_freq_csv_round_trip(tmp_path):
    t = SortedFreqTable([(9, 1), (3, 4), (5, 4)])
    write_freq_csv(tmp_path / "f.csv", t)
    assert read_freq_csv(tmp_path / "f.csv") == t


@pytest.mark.parametrize("text,fragment", [
    ("", "empty"),
    ("sym,count\n1,2\n", "header"),
    ("symbol,freq\n", "no frequency"),
    ("symbol,freq\n1,2,3\n", "2 columns"),
    ("symbol,freq\na,2\n2,3\n", "integers"),
    ("symbol,freq\n1,5\n2,3\n", "not sorted"),
])
def test_freq_csv_errors(tmp_path, text, fragment):
    p = tmp_path / "f.csv"
    p.write_text(text)
    with pytest.raises(InvalidInputError, match=fragment):
        read_freq_csv(p)


def test_lengths_round_trip(tmp_path):
    t = SortedFreqTable([(0, 1), (1, 1), (2, 2), (3, 4)])
    lengths = compute_bit_lengths(build_tree_restructured(t), t)
    write_lengths_csv(tmp_path / "l.csv", lengths, t)
    assert read_lengths_csv(tmp_path / "l.csv") == lengths


def test_arrays_csv(tmp_path):
    write_arrays_csv(tmp_path / "a.csv", build_tree_restructured([(0, 1), (1, 1), (2, 2), (3, 4)]))
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert lines[0] == "node,left_kind,left,right_kind,right,parent,freq"
    assert lines[1:] == ["0,leaf,0,leaf,1,1,2", "1,leaf,2,internal,0,2,4", "2,leaf,3,internal,1,,8"]


def test_raw_csv(tmp_path):
    resp = convolve_reference(np.arange(1, 17).reshape(4, 4))
    write_raw_csv(tmp_path / "r.csv", resp)
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "row,col,value"
    assert len(lines) == 17
    assert "1,1,40" in lines


def test_tokens(tmp_path, rng):
    img = Image(rng.integers(0, 256, (3, 4)))
    write_pgm(tmp_path / "i.pgm", img)
    tokens, shape = read_tokens(tmp_path / "i.pgm")
    assert shape == (3, 4) and tokens == img.pixels.ravel().tolist()
    write_tokens(tmp_path / "o.pgm", tokens, shape)
    assert (tmp_path / "o.pgm").read_bytes() == (tmp_path / "i.pgm").read_bytes()
    write_tokens(tmp_path / "t.csv", [-3, 700])
    assert read_tokens(tmp_path / "t.csv") == ([-3, 700], None)


def test_tokens_errors(tmp_path):
    with pytest.raises(InvalidInputError):
        write_tokens(tmp_path / "o.pgm", [1, 2, 3], (2, 2))
    with pytest.raises(InvalidInputError):
        write_tokens(tmp_path / "o.pgm", [1, 2, 3, 400], (2, 2))
    (tmp_path / "bad.csv").write_text("v\n1\n")
    with pytest.raises(InvalidInputError):
        read_tokens(tmp_path / "bad.csv")
