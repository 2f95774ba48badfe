from fractions import Fraction

import pytest

from hlsrestruct.cycle_model import (
    PAPER_TABLE,
    CalibrationProfile,
    LoopSchedule,
    compare,
    estimate_cycles,
    get_profile,
    throughput,
)
from hlsrestruct.errors import ConfigurationError, InvalidInputError


def conv(style, w=640, h=480):
    return estimate_cycles(LoopSchedule("conv", style, width=w, height=h))


def huff(style, n=536):
    return estimate_cycles(LoopSchedule("huffman", style, n=n))


class TestConv:
    def test_restructured_640x480(self):
        est = conv("restructured")
        assert est.total_cycles == 307200
        assert est.latency == 641

    def test_software_640x480(self):
        assert conv("software").total_cycles == 20889601

    def test_smallest_image(self):
        assert conv("restructured", 3, 3).total_cycles == 9

    def test_cycles_ratio(self):
        assert compare("conv", {"width": 640, "height": 480}).cycle_ratio == pytest.approx(68.0, rel=1e-3)

    def test_throughput(self):
        assert conv("restructured").throughput(127.8) == pytest.approx(416.0, rel=0.01)
        assert conv("restructured").throughput(128.0) == pytest.approx(416.7, abs=0.05)
        assert conv("software").throughput(129.1) == pytest.approx(6.18, rel=0.01)

    @pytest.mark.parametrize("style", ["software", "restructured"])
    def test_linear_in_pixels(self, style):
        a = conv(style, 100, 100).total_cycles
        b = conv(style, 200, 100).total_cycles
        c = conv(style, 200, 200).total_cycles
        off = 0 if style == "restructured" else 1
        assert (b - off) == 2 * (a - off) and (c - off) == 4 * (a - off)

    @pytest.mark.parametrize("w,h", [(2, 5), (5, 2), (0, 5)])
    def test_too_small(self, w, h):
        with pytest.raises(InvalidInputError):
            LoopSchedule("conv", "restructured", width=w, height=h)


class TestHuffman:
    def test_536_symbols(self):
        assert huff("software").total_cycles == 7889921
        assert huff("restructured").total_cycles == 3142

    def test_ratio(self):
        assert compare("huffman", {"n": 536}).cycle_ratio == pytest.approx(2511, rel=0.02)

    def test_throughputs(self):
        assert huff("restructured").throughput(100) == pytest.approx(31827, rel=0.02)
        assert huff("software").throughput(100) == pytest.approx(12.67, rel=0.02)

    def test_monotone_in_n(self):
        for style in ("software", "restructured"):
            cycles = [huff(style, n).total_cycles for n in range(2, 300)]
            assert all(a < b for a, b in zip(cycles, cycles[1:]))

    def test_software_grows_quadratically(self):
        r1 = huff("software", 1000).total_cycles / huff("software", 500).total_cycles
        r2 = huff("restructured", 1000).total_cycles / huff("restructured", 500).total_cycles
        assert 3.5 < r1 < 4.0
        assert 1.9 < r2 < 2.1

    @pytest.mark.parametrize("n", [0, -3, 2.5, True])
    def test_bad_n(self, n):
        with pytest.raises(InvalidInputError):
            LoopSchedule("huffman", "software", n=n)


def test_throughput_unit():
    assert throughput(1, 1.0) == 1e6


@pytest.mark.parametrize("f", [0, -1.0])
def test_throughput_bad_frequency(f):
    with pytest.raises(InvalidInputError):
        throughput(100, f)


def test_self_compare_is_one():
    rep = compare("conv", {"width": 64, "height": 48}, styles=("restructured", "restructured"),
                  freqs=(150, 150))
    assert rep.cycle_ratio == 1
    assert rep.throughput_ratio == 1
    assert rep.frequency_ratio == 1


def test_throughput_ratio_folds_in_clock():
    rep = compare("conv", {"width": 640, "height": 480}, styles=("restructured", "software"),
                  freqs=(127.8, 129.1))
    t1, t2 = rep.throughputs
    assert rep.throughput_ratio == pytest.approx(t1 / t2)
    assert rep.throughput_ratio == pytest.approx((20889601 / 307200) * (127.8 / 129.1))


def test_unknown_profile():
    with pytest.raises(ConfigurationError):
        get_profile("no-such-profile")
    with pytest.raises(ConfigurationError):
        estimate_cycles(LoopSchedule("huffman", "software", n=4), "no-such-profile")


def test_profile_round_trip():
    d = PAPER_TABLE.to_dict()
    assert d["huffman_node_cost"] == "349/119"
    assert CalibrationProfile.from_dict(d) == PAPER_TABLE


def test_custom_profile_changes_estimate():
    prof = CalibrationProfile("slow", conv_pixel_cost=Fraction(10))
    est = estimate_cycles(LoopSchedule("conv", "software", width=10, height=10), prof)
    assert est.total_cycles == 1001
    assert est.profile == "slow"


@pytest.mark.parametrize("data", [{"name": "x", "bogus": 1}, {"conv_pixel_cost": 2},
                                  {"name": "x", "conv_pixel_cost": 0},
                                  {"name": "x", "conv_overhead": -1}])
def test_bad_profile(data):
    with pytest.raises(ConfigurationError):
        CalibrationProfile.from_dict(data)


def test_estimates_are_integers():
    for n in range(2, 50):
        assert isinstance(huff("restructured", n).total_cycles, int)
