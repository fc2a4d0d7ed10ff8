"""Exhaustive error statistics and cell/bit cost proxies for configured adders."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .bitlevel import AdderConfig, CellKind, add_values
from .errors import ConfigurationError

MAX_EXHAUSTIVE_WIDTH = 12
_CHUNK_ROWS = 256


@dataclass(frozen=True)
class ErrorStats:
    width: int
    approx_prefix: int
    cell_kind: str
    discarded_lsbs: int
    total_cases: int
    error_cases: int
    error_rate: float
    mean_error_distance: float
    max_error_distance: int
    min_signed_error: int
    max_signed_error: int

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class CostReport:
    exact_cells: int
    carry_only_cells: int
    approx_cells: int
    comparator_bits_exact: int
    comparator_bits_truncated: int
    comparator_reduction: Fraction

    def as_dict(self):
        d = asdict(self)
        d["comparator_reduction"] = float(self.comparator_reduction)
        return d


def characterize_adder(cfg: AdderConfig, discard_lsbs: int = 0) -> ErrorStats:
    """Compare `cfg` against exact addition over every operand pair.

    With ``discard_lsbs = s`` the bottom ``s`` bits of both results are
    masked off before comparison, which is how a datapath that shifts right
    by ``s`` afterwards sees the adder.
    """
    width = cfg.width
    if width > MAX_EXHAUSTIVE_WIDTH:
        raise ConfigurationError(
            f"exhaustive characterization is capped at {MAX_EXHAUSTIVE_WIDTH} bits "
            f"({1 << (2 * MAX_EXHAUSTIVE_WIDTH)} pairs); width {width} would need "
            "a sampling mode, which is not provided")
    if not 0 <= discard_lsbs <= width:
        raise ConfigurationError(f"discard_lsbs {discard_lsbs} outside 0..{width}")

    n = 1 << width
    keep = ~((1 << discard_lsbs) - 1)
    ys = np.arange(n, dtype=np.int64)
    error_cases = 0
    abs_sum = 0
    max_abs = 0
    lo = hi = 0
    # Chunked over x so width 12 stays within a few hundred MB.
    for start in range(0, n, _CHUNK_ROWS):
        xs = np.arange(start, min(start + _CHUNK_ROWS, n), dtype=np.int64)[:, None]
        approx = add_values(xs, ys[None, :], cfg) & keep
        exact = (xs + ys[None, :]) & keep
        err = approx - exact
        error_cases += int(np.count_nonzero(err))
        ae = np.abs(err)
        abs_sum += int(ae.sum())
        max_abs = max(max_abs, int(ae.max()))
        lo = min(lo, int(err.min()))
        hi = max(hi, int(err.max()))

    total = n * n
    return ErrorStats(
        width=width,
        approx_prefix=cfg.approx_prefix,
        cell_kind=cfg.prefix_kind.value,
        discarded_lsbs=discard_lsbs,
        total_cases=total,
        error_cases=error_cases,
        error_rate=error_cases / total,
        mean_error_distance=abs_sum / total,
        max_error_distance=max_abs,
        min_signed_error=lo,
        max_signed_error=hi,
    )


def cost_model(cfg: AdderConfig, comparator_width: int, k: int) -> CostReport:
    if not 0 <= k < comparator_width:
        raise ConfigurationError(
            f"ignored LSBs {k} must be below comparator width {comparator_width}")
    counts = {kind: 0 for kind in CellKind}
    for c in cfg.cells:
        counts[c] += 1
    truncated = comparator_width - k
    return CostReport(
        exact_cells=counts[CellKind.EXACT],
        carry_only_cells=counts[CellKind.CARRY_ONLY],
        approx_cells=counts[CellKind.APPROX_LOA],
        comparator_bits_exact=comparator_width,
        comparator_bits_truncated=truncated,
        comparator_reduction=1 - Fraction(truncated, comparator_width),
    )
