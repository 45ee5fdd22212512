"""12-bit two's-complement datapath arithmetic.

Values are ``raw / 2**frac_bits``. Every register is 12 bits wide and
saturates instead of wrapping. The error term ``e = b - R_ii s`` is the
difference of two 12-bit words and is kept exactly in 13 bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "WIDTH",
    "RAW_MIN",
    "RAW_MAX",
    "DEFAULT_FRAC_BITS",
    "FixedWord",
    "saturate",
    "quantize",
    "fx_mul_sym",
    "fx_error",
    "fx_b_unit",
    "fx_direct_enumerate",
    "fx_ped_step",
]

WIDTH = 12
RAW_MIN = -(1 << (WIDTH - 1))
RAW_MAX = (1 << (WIDTH - 1)) - 1
DEFAULT_FRAC_BITS = 7

SYMBOLS = (-3, -1, 1, 3)


def saturate(value: int, width: int = WIDTH) -> int:
    hi = (1 << (width - 1)) - 1
    lo = -(1 << (width - 1))
    return hi if value > hi else lo if value < lo else value


@dataclass(frozen=True)
class FixedWord:
    raw: int
    frac_bits: int = DEFAULT_FRAC_BITS

    def __post_init__(self):
        if not RAW_MIN <= self.raw <= RAW_MAX:
            raise ValueError(f"raw value {self.raw} does not fit in {WIDTH} bits")

    @classmethod
    def from_float(cls, x: float, frac_bits: int = DEFAULT_FRAC_BITS) -> "FixedWord":
        """Round to nearest and saturate."""
        return cls(saturate(int(np.floor(x * (1 << frac_bits) + 0.5))), frac_bits)

    @property
    def value(self) -> float:
        return self.raw / (1 << self.frac_bits)

    @property
    def is_max(self) -> bool:
        return self.raw == RAW_MAX


def quantize(x: float, frac_bits: int = DEFAULT_FRAC_BITS) -> tuple[FixedWord, bool]:
    """Quantized word and whether saturation occurred."""
    wide = int(np.floor(x * (1 << frac_bits) + 0.5))
    return FixedWord(saturate(wide), frac_bits), not RAW_MIN <= wide <= RAW_MAX


def fx_mul_sym(r: FixedWord, s: int) -> FixedWord:
    """``r * s`` for ``s`` in {+-1, +-3} using negation, shift and add only."""
    raw = r.raw
    if s == 3:
        out = raw + (raw << 1)
    elif s == 1:
        out = raw
    elif s == -1:
        out = -raw
    elif s == -3:
        out = -raw - (raw << 1)
    else:
        raise ValueError(f"symbol {s} not in {SYMBOLS}")
    return FixedWord(saturate(out), r.frac_bits)


def fx_error(b: FixedWord, r_ii: FixedWord, s: int) -> int:
    """Raw 13-bit ``e = b - R_ii s``."""
    return b.raw - fx_mul_sym(r_ii, s).raw


def fx_b_unit(y: FixedWord, terms: Iterable[tuple[FixedWord, int]]) -> FixedWord:
    """``y - sum R_ij s_j`` as one compressor-tree sum.

    The shift-add partial products are summed exactly and saturated once at
    the output, so no individual product is clipped.
    """
    acc = y.raw
    for r, s in terms:
        raw = r.raw
        if s == 3:
            acc -= raw + (raw << 1)
        elif s == 1:
            acc -= raw
        elif s == -1:
            acc += raw
        elif s == -3:
            acc += raw + (raw << 1)
        else:
            raise ValueError(f"symbol {s} not in {SYMBOLS}")
    return FixedWord(saturate(acc), y.frac_bits)


def fx_direct_enumerate(b: FixedWord, r_ii: FixedWord, symbols=SYMBOLS) -> int:
    """Symbol with the smallest ``|e|``; the smaller symbol wins ties."""
    best, best_err = None, None
    for s in symbols:
        err = abs(fx_error(b, r_ii, s))
        if best_err is None or err < best_err:
            best, best_err = s, err
    return best


def fx_ped_step(d_prev: FixedWord, b: FixedWord, r_ii: FixedWord, s: int) -> FixedWord:
    """``d_prev + e**2`` with a single positive saturation at the end."""
    e = fx_error(b, r_ii, s)
    sq = (e * e) >> d_prev.frac_bits
    return FixedWord(saturate(d_prev.raw + sq), d_prev.frac_bits)
