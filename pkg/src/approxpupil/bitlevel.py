"""Bit-accurate full-adder cells and the ripple adders built from them.

Every cell function is written with plain bitwise operators, so it works on
Python ints and on numpy integer arrays alike.  The word-level helpers
(`add_values`, `sub_values`, `compare_ge_values`) exploit this to evaluate a
whole image plane one bit position at a time; `ripple_add` and friends wrap
the same core for single `Word` operands.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigurationError


class CellKind(enum.Enum):
    EXACT = "exact"
    CARRY_ONLY = "carryonly"
    APPROX_LOA = "loa"


def fa_exact(a, b, cin):
    """Exact full adder: returns ``(sum, cout)``."""
    s = a ^ b ^ cin
    cout = (a & b) | (a & cin) | (b & cin)
    return s, cout


def fa_carry_only(a, b, cin):
    """Exact carry-out; the sum output is tied to 0."""
    cout = (a & b) | (a & cin) | (b & cin)
    return a & 0, cout


def fa_approx(a, b, cin):
    """Lower-part-OR cell: ``sum = a | b``, ``cout = a & b``; `cin` is ignored."""
    return a | b, a & b


CELL_FUNCTIONS = {
    CellKind.EXACT: fa_exact,
    CellKind.CARRY_ONLY: fa_carry_only,
    CellKind.APPROX_LOA: fa_approx,
}


@dataclass(frozen=True)
class Word:
    """Unsigned bit vector, least-significant bit first."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1:
            raise ConfigurationError("a Word needs at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"bits must be 0 or 1, got {self.bits!r}")

    @classmethod
    def from_int(cls, value: int, width: int) -> "Word":
        if width < 1:
            raise ConfigurationError(f"width must be positive, got {width}")
        if not 0 <= value < (1 << width):
            raise ValueError(f"{value} does not fit in {width} unsigned bits")
        return cls(tuple((value >> i) & 1 for i in range(width)))

    @property
    def width(self) -> int:
        return len(self.bits)

    @property
    def value(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class AdderConfig:
    """Per-position cell layout of a ``width``-bit ripple adder (index 0 = LSB)."""

    cells: tuple[CellKind, ...]

    def __post_init__(self):
        if not self.cells:
            raise ConfigurationError("adder width must be at least 1")
        prefix = self.approx_prefix
        if any(c is CellKind.EXACT for c in self.cells[:prefix]) or any(
            c is not CellKind.EXACT for c in self.cells[prefix:]
        ):
            raise ConfigurationError(
                "approximate cells must form a contiguous LSB prefix: "
                + ",".join(c.value for c in self.cells)
            )

    @classmethod
    def build(cls, width: int, approx_bits: int = 0,
              kind: CellKind = CellKind.APPROX_LOA) -> "AdderConfig":
        """`approx_bits` low cells of `kind`, exact cells above them."""
        if width < 1:
            raise ConfigurationError(f"adder width must be positive, got {width}")
        if not 0 <= approx_bits <= width:
            raise ConfigurationError(
                f"approximate prefix {approx_bits} outside 0..{width}")
        if approx_bits and kind is CellKind.EXACT:
            raise ConfigurationError("prefix kind must be an approximate cell")
        return cls((kind,) * approx_bits + (CellKind.EXACT,) * (width - approx_bits))

    @classmethod
    def exact(cls, width: int) -> "AdderConfig":
        return cls.build(width, 0)

    @property
    def width(self) -> int:
        return len(self.cells)

    @property
    def approx_prefix(self) -> int:
        n = 0
        for c in self.cells:
            if c is CellKind.EXACT:
                break
            n += 1
        return n

    @property
    def prefix_kind(self) -> CellKind:
        return self.cells[0] if self.approx_prefix else CellKind.EXACT

    @property
    def is_exact(self) -> bool:
        return self.approx_prefix == 0

    def with_carry_only_as_exact(self) -> "AdderConfig":
        return AdderConfig(tuple(
            CellKind.EXACT if c is CellKind.CARRY_ONLY else c for c in self.cells))

    def describe(self) -> str:
        if self.is_exact:
            return f"{self.width}b exact"
        return f"{self.width}b {self.approx_prefix}x{self.prefix_kind.value}"


def _ripple(x, y, cells: Sequence[CellKind], carry_in=0):
    carry = carry_in
    out = 0
    for i, kind in enumerate(cells):
        s, carry = CELL_FUNCTIONS[kind]((x >> i) & 1, (y >> i) & 1, carry)
        out = out | (s << i)
    return out | (carry << len(cells))


def add_values(x, y, cfg: AdderConfig):
    """Ripple-add unsigned ints or integer arrays; the result has ``cfg.width + 1`` bits.

    Operands must already fit in ``cfg.width`` bits; this is not re-checked
    on arrays for speed.
    """
    return _ripple(x, y, cfg.cells)


def sub_values(x, y, cfg: AdderConfig):
    """Two's-complement ``x - y`` through the configured adder, returned signed.

    Computed as ``x + ~y + 1``.  An LOA cell at the LSB drops the injected
    carry-in, so subtraction under an LOA prefix is biased low by one.
    """
    width = cfg.width
    mask = (1 << width) - 1
    raw = _ripple(x, (~y) & mask, cfg.cells, carry_in=1)
    return raw - (1 << width)


def compare_ge_values(x, threshold: int, k: int, width: int):
    """Truncated magnitude comparator: ``(x >> k) >= (threshold >> k)`` as 0/1.

    Modeled as the carry-out of an exact ``(width - k)``-bit subtractor over
    the retained upper bits.
    """
    if not 0 <= k < width:
        raise ConfigurationError(
            f"ignored LSB count {k} must be in 0..{width - 1} for a {width}-bit comparator")
    kept = width - k
    mask = (1 << kept) - 1
    hi_x = x >> k
    hi_t = (threshold >> k) & mask
    raw = _ripple(hi_x, (~hi_t) & mask, (CellKind.EXACT,) * kept, carry_in=1)
    return raw >> kept


def _check_widths(x: Word, y: Word, cfg: AdderConfig):
    if x.width != cfg.width or y.width != cfg.width:
        raise ConfigurationError(
            f"operand widths {x.width}/{y.width} do not match adder width {cfg.width}")


def ripple_add(x: Word, y: Word, cfg: AdderConfig) -> Word:
    _check_widths(x, y, cfg)
    return Word.from_int(add_values(x.value, y.value, cfg), cfg.width + 1)


def ripple_sub(x: Word, y: Word, cfg: AdderConfig) -> int:
    _check_widths(x, y, cfg)
    return sub_values(x.value, y.value, cfg)


def truncated_compare_ge(x: Word, threshold: Word, k: int) -> int:
    if threshold.width != x.width:
        raise ConfigurationError(
            f"threshold width {threshold.width} != operand width {x.width}")
    return compare_ge_values(x.value, threshold.value, k, x.width)
