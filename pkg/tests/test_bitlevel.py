import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from approxpupil.bitlevel import (
    AdderConfig,
    CellKind,
    Word,
    add_values,
    compare_ge_values,
    fa_approx,
    fa_carry_only,
    fa_exact,
    ripple_add,
    ripple_sub,
    truncated_compare_ge,
)
from approxpupil.errors import ConfigurationError

BITS3 = list(itertools.product((0, 1), repeat=3))


def loa_oracle(x, y, k):
    """Closed form of an LOA adder: OR'd low part, exact high part with carry a[k-1]&b[k-1]."""
    if k == 0:
        return x + y
    low = (x | y) & ((1 << k) - 1)
    carry = (x >> (k - 1)) & (y >> (k - 1)) & 1
    return low + (((x >> k) + (y >> k) + carry) << k)


def w(v, width=8):
    return Word.from_int(v, width)


class TestCells:
    @pytest.mark.parametrize("a,b,c,expected", [
        (0, 0, 0, (0, 0)), (1, 1, 0, (0, 1)), (1, 1, 1, (1, 1))])
    def test_fa_exact_examples(self, a, b, c, expected):
        assert fa_exact(a, b, c) == expected

    @pytest.mark.parametrize("a,b,c", BITS3)
    def test_fa_exact_is_binary_addition(self, a, b, c):
        s, cout = fa_exact(a, b, c)
        assert s + 2 * cout == a + b + c

    @pytest.mark.parametrize("a,b,c,expected", [
        (1, 1, 0, (0, 1)), (1, 0, 0, (0, 0)), (0, 1, 1, (0, 1))])
    def test_fa_carry_only_examples(self, a, b, c, expected):
        assert fa_carry_only(a, b, c) == expected

    @pytest.mark.parametrize("a,b,c", BITS3)
    def test_carry_only_carry_matches_exact(self, a, b, c):
        assert fa_carry_only(a, b, c)[1] == fa_exact(a, b, c)[1]
        assert fa_carry_only(a, b, c)[0] == 0

    @pytest.mark.parametrize("a,b,c,expected", [
        (1, 1, 0, (1, 1)), (1, 0, 1, (1, 0)), (0, 0, 0, (0, 0))])
    def test_fa_approx_examples(self, a, b, c, expected):
        assert fa_approx(a, b, c) == expected

    @pytest.mark.parametrize("a,b,c", BITS3)
    def test_fa_approx_truth_table(self, a, b, c):
        assert fa_approx(a, b, c) == (a | b, a & b)

    def test_cells_accept_arrays(self):
        a = np.array([0, 1, 1, 1])
        b = np.array([0, 0, 1, 1])
        c = np.array([0, 1, 0, 1])
        s, cout = fa_exact(a, b, c)
        assert s.tolist() == [0, 0, 0, 1]
        assert cout.tolist() == [0, 1, 1, 1]


class TestWordAndConfig:
    def test_word_roundtrip(self):
        assert w(0b1011).bits == (1, 1, 0, 1, 0, 0, 0, 0)
        assert w(200).value == 200
        assert w(200).width == 8

    def test_word_rejects_overflow(self):
        with pytest.raises(ValueError):
            Word.from_int(256, 8)

    def test_word_rejects_non_bits(self):
        with pytest.raises(ValueError):
            Word((0, 2))

    def test_config_prefix(self):
        cfg = AdderConfig.build(8, 5)
        assert cfg.approx_prefix == 5
        assert cfg.prefix_kind is CellKind.APPROX_LOA
        assert cfg.cells[5:] == (CellKind.EXACT,) * 3

    def test_config_rejects_gapped_prefix(self):
        with pytest.raises(ConfigurationError):
            AdderConfig((CellKind.APPROX_LOA, CellKind.EXACT, CellKind.APPROX_LOA))

    def test_config_rejects_exact_below_approx(self):
        with pytest.raises(ConfigurationError):
            AdderConfig((CellKind.EXACT, CellKind.CARRY_ONLY))


class TestRippleAdd:
    def test_loa_example(self):
        cfg = AdderConfig.build(8, 5, CellKind.APPROX_LOA)
        out = ripple_add(w(23), w(9), cfg)
        assert out.width == 9
        assert out.value == 31
        assert loa_oracle(23, 9, 5) == 31

    @pytest.mark.parametrize("cfg", [
        AdderConfig.exact(8), AdderConfig.build(8, 5), AdderConfig.build(8, 4, CellKind.CARRY_ONLY)])
    def test_zero_identity(self, cfg):
        assert ripple_add(w(0), w(0), cfg).value == 0

    def test_carry_only_example(self):
        cfg = AdderConfig.build(8, 4, CellKind.CARRY_ONLY)
        out = ripple_add(w(16), w(16), cfg).value
        assert out >> 4 == 32 >> 4
        assert out & 0xF == 0

    def test_width_mismatch(self):
        with pytest.raises(ConfigurationError):
            ripple_add(w(1, 8), w(1, 7), AdderConfig.exact(8))
        with pytest.raises(ConfigurationError):
            ripple_add(w(1, 7), w(1, 7), AdderConfig.exact(8))

    def test_exact_exhaustive_width8(self):
        x = np.arange(256)[:, None]
        y = np.arange(256)[None, :]
        assert np.array_equal(add_values(x, y, AdderConfig.exact(8)), x + y)

    @pytest.mark.parametrize("width", range(1, 11))
    def test_carry_only_upper_bits_exhaustive(self, width):
        x = np.arange(1 << width)[:, None]
        y = np.arange(1 << width)[None, :]
        for k in range(width + 1):
            cfg = AdderConfig.build(width, k, CellKind.CARRY_ONLY)
            got = add_values(x, y, cfg)
            assert np.array_equal(got >> k, (x + y) >> k)
            assert not np.any(got & ((1 << k) - 1))

    @given(st.integers(11, 24).flatmap(lambda n: st.tuples(
        st.just(n), st.integers(0, n), st.integers(0, 2 ** n - 1), st.integers(0, 2 ** n - 1))))
    def test_carry_only_upper_bits_sampled(self, case):
        width, k, x, y = case
        got = ripple_add(w(x, width), w(y, width), AdderConfig.build(width, k, CellKind.CARRY_ONLY))
        assert got.value >> k == (x + y) >> k

    @pytest.mark.parametrize("k", range(0, 6))
    def test_loa_matches_closed_form_exhaustive(self, k):
        x = np.arange(256)[:, None]
        y = np.arange(256)[None, :]
        assert np.array_equal(add_values(x, y, AdderConfig.build(8, k)), loa_oracle(x, y, k))

    @pytest.mark.parametrize("k", range(1, 6))
    def test_loa_error_bound_exhaustive(self, k):
        x = np.arange(256)[:, None]
        y = np.arange(256)[None, :]
        # bound confirmed on the oracle first, then on the adder
        assert np.abs(loa_oracle(x, y, k) - (x + y)).max() < 2 ** k
        assert np.abs(add_values(x, y, AdderConfig.build(8, k)) - (x + y)).max() < 2 ** k


class TestRippleSub:
    def test_examples(self):
        cfg = AdderConfig.exact(8)
        assert ripple_sub(w(9), w(9), cfg) == 0
        assert ripple_sub(w(255), w(0), cfg) == 255
        assert ripple_sub(w(100), w(37), cfg) == 100 - 37

    def test_negative_result(self):
        assert ripple_sub(w(3), w(10), AdderConfig.exact(8)) == -7

    def test_exact_exhaustive(self):
        from approxpupil.bitlevel import sub_values
        x = np.arange(256)[:, None]
        y = np.arange(256)[None, :]
        assert np.array_equal(sub_values(x, y, AdderConfig.exact(8)), x - y)

    def test_loa_drops_injected_carry(self):
        # x + ~x is all ones under OR as well, so x - x reads -1
        cfg = AdderConfig.build(12, 5)
        for x in (0, 1, 96, 765, 4095):
            assert ripple_sub(w(x, 12), w(x, 12), cfg) == -1

    def test_width_mismatch(self):
        with pytest.raises(ConfigurationError):
            ripple_sub(w(1, 8), w(1, 9), AdderConfig.exact(8))


class TestTruncatedCompare:
    @pytest.mark.parametrize("x,expected", [(200, 1), (95, 0), (96, 1)])
    def test_examples(self, x, expected):
        assert truncated_compare_ge(w(x), w(96), 5) == expected

    def test_k_too_large(self):
        with pytest.raises(ConfigurationError):
            truncated_compare_ge(w(1), w(0), 8)

    def test_threshold_width_mismatch(self):
        with pytest.raises(ConfigurationError):
            truncated_compare_ge(w(1), w(0, 9), 1)

    @pytest.mark.parametrize("k", range(8))
    def test_aligned_threshold_is_exact_ge(self, k):
        x = np.arange(256)
        for t in range(0, 256, 1 << k):
            assert np.array_equal(compare_ge_values(x, t, k, 8), (x >= t).astype(int))

    @given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 7))
    def test_matches_shifted_comparison(self, x, t, k):
        assert truncated_compare_ge(w(x), w(t), k) == int((x >> k) >= (t >> k))
