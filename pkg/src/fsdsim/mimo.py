"""MIMO system model: QAM mapping, Rayleigh channel, AWGN and the real-valued
decomposition of the complex system.

Conventions used throughout the package
---------------------------------------
* A complex frame ``s`` of ``n_t`` symbols becomes the real vector
  ``s_real = [Re(s), Im(s)]`` of length ``2 n_t``. Array index ``i`` of a
  real vector is tree level ``i``; detection starts at the highest index.
* Symbol ``t`` carries bits ``bits[t*M:(t+1)*M]``. The first ``M/2`` bits
  (MSB first) label the real part, the remaining ``M/2`` the imaginary part.
* Per real dimension the labelling is Gray: for 16-QAM
  ``00, 01, 11, 10 -> -3, -1, +1, +3``.
* Symbol energy is not normalised (16-QAM average energy is 10).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputShapeError, ParameterError

__all__ = [
    "Constellation",
    "QAM16",
    "QPSK",
    "ComplexChannel",
    "TransmitFrame",
    "RealSystem",
    "map_bits",
    "demap_real",
    "real_to_bits",
    "real_bit_index",
    "generate_channel",
    "apply_channel",
    "realify",
    "noise_var_from_snr",
]


@dataclass(frozen=True)
class Constellation:
    """Square QAM constellation with ``order`` bits per complex symbol."""

    order: int = 4
    alphabet: np.ndarray = field(init=False, repr=False, compare=False)
    labels: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.order < 2 or self.order % 2:
            raise ParameterError(f"QAM order must be even and >= 2, got {self.order}")
        nb = 2 ** (self.order // 2)
        alphabet = np.arange(-(nb - 1), nb, 2, dtype=float)
        idx = np.arange(nb)
        gray = idx ^ (idx >> 1)
        # labels[k] = bit pattern (MSB first) of alphabet[k]
        labels = (gray[:, None] >> np.arange(self.order // 2 - 1, -1, -1)) & 1
        alphabet.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "labels", labels.astype(np.int8))

    @property
    def bits_per_dim(self) -> int:
        return self.order // 2

    @property
    def n_branches(self) -> int:
        """Children per tree node, i.e. the size of the real alphabet."""
        return len(self.alphabet)

    @property
    def size(self) -> int:
        return 2**self.order

    @property
    def average_energy(self) -> float:
        return 2.0 * float(np.mean(self.alphabet**2))

    def symbol_index(self, values) -> np.ndarray:
        """Position of each real value in the alphabet."""
        values = np.asarray(values, dtype=float)
        idx = np.rint((values + self.n_branches - 1) / 2).astype(int)
        if np.any(idx < 0) or np.any(idx >= self.n_branches) or np.any(
            self.alphabet[np.clip(idx, 0, self.n_branches - 1)] != values
        ):
            raise InputShapeError("value outside the real alphabet")
        return idx

    def label_index(self, bit_groups) -> np.ndarray:
        """Alphabet position for rows of ``bits_per_dim`` bits."""
        bit_groups = np.asarray(bit_groups, dtype=int)
        weights = 1 << np.arange(self.bits_per_dim - 1, -1, -1)
        gray = bit_groups @ weights
        # inverse Gray code
        idx = gray.copy()
        shift = gray >> 1
        while np.any(shift):
            idx ^= shift
            shift >>= 1
        return idx


QAM16 = Constellation(4)
QPSK = Constellation(2)


@dataclass(frozen=True)
class ComplexChannel:
    H: np.ndarray

    def __post_init__(self):
        if self.H.ndim != 2:
            raise InputShapeError("channel matrix must be 2-D")

    @property
    def n_r(self) -> int:
        return self.H.shape[0]

    @property
    def n_t(self) -> int:
        return self.H.shape[1]


@dataclass(frozen=True)
class TransmitFrame:
    bits: np.ndarray
    s: np.ndarray
    s_real: np.ndarray


@dataclass(frozen=True)
class RealSystem:
    """Real-valued equivalent ``y_real = H_real s_real + n_real``.

    ``sigma2`` is the noise variance per real dimension (half the complex
    noise variance). Zero is allowed for noise-free experiments.
    """

    H_real: np.ndarray
    y_real: np.ndarray
    sigma2: float

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ParameterError("noise variance must be non-negative")


def map_bits(bits, constellation: Constellation = QAM16, n_t: int = 4) -> TransmitFrame:
    bits = np.asarray(bits, dtype=np.int8).ravel()
    m = constellation.order
    if bits.size != m * n_t:
        raise InputShapeError(f"expected {m * n_t} bits, got {bits.size}")
    if np.any((bits != 0) & (bits != 1)):
        raise InputShapeError("bits must be 0 or 1")
    half = constellation.bits_per_dim
    groups = bits.reshape(n_t, 2, half)
    re = constellation.alphabet[constellation.label_index(groups[:, 0, :])]
    im = constellation.alphabet[constellation.label_index(groups[:, 1, :])]
    return TransmitFrame(bits=bits, s=re + 1j * im, s_real=np.concatenate([re, im]))


def real_bit_index(n_t: int, constellation: Constellation = QAM16) -> np.ndarray:
    """Frame bit positions carried by each real dimension.

    Row ``i`` lists the ``bits_per_dim`` frame-bit indices labelled by
    ``s_real[i]``.
    """
    half = constellation.bits_per_dim
    rows = []
    for i in range(2 * n_t):
        t, part = (i, 0) if i < n_t else (i - n_t, 1)
        start = t * constellation.order + part * half
        rows.append(np.arange(start, start + half))
    return np.array(rows)


def real_to_bits(s_real, constellation: Constellation = QAM16) -> np.ndarray:
    """Demap real symbol vectors to frame bits.

    Accepts a single vector of length ``2 n_t`` or a ``(K, 2 n_t)`` batch and
    returns ``(M n_t,)`` or ``(K, M n_t)`` bits respectively.
    """
    s_real = np.asarray(s_real, dtype=float)
    single = s_real.ndim == 1
    batch = np.atleast_2d(s_real)
    n_t = batch.shape[1] // 2
    idx = constellation.symbol_index(batch)
    labels = constellation.labels[idx]  # (K, 2n_t, half)
    out = np.empty((batch.shape[0], constellation.order * n_t), dtype=np.int8)
    out[:, real_bit_index(n_t, constellation)] = labels
    return out[0] if single else out


def demap_real(s_real, constellation: Constellation = QAM16) -> np.ndarray:
    return real_to_bits(s_real, constellation)


def generate_channel(seed, n_t: int = 4, n_r: int = 4) -> ComplexChannel:
    """i.i.d. CN(0, 1) channel. ``seed`` may be an int or a ``Generator``."""
    if n_t < 1 or n_r < 1:
        raise ParameterError("antenna counts must be >= 1")
    rng = np.random.default_rng(seed)
    H = (rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t))) / np.sqrt(2)
    return ComplexChannel(H)


def apply_channel(channel: ComplexChannel, frame: TransmitFrame, noise_var: float, rng=None) -> np.ndarray:
    """``y = H s + n`` with ``n ~ CN(0, noise_var I)``."""
    if noise_var < 0:
        raise ParameterError("noise variance must be non-negative")
    if frame.s.shape != (channel.n_t,):
        raise InputShapeError(f"frame has {frame.s.size} symbols, channel expects {channel.n_t}")
    y = channel.H @ frame.s
    if noise_var > 0:
        rng = np.random.default_rng(rng)
        n = rng.standard_normal(channel.n_r) + 1j * rng.standard_normal(channel.n_r)
        y = y + np.sqrt(noise_var / 2) * n
    return y


def realify(channel: ComplexChannel, y, noise_var: float = 0.0) -> RealSystem:
    """Real-valued decomposition. ``noise_var`` is the complex noise variance."""
    H = channel.H
    y = np.asarray(y)
    H_real = np.block([[H.real, -H.imag], [H.imag, H.real]])
    y_real = np.concatenate([y.real, y.imag]).astype(float)
    return RealSystem(H_real=H_real, y_real=y_real, sigma2=noise_var / 2)


def noise_var_from_snr(snr_db: float, constellation: Constellation = QAM16) -> float:
    """Complex noise variance N0 for a given Es/N0 in dB."""
    return constellation.average_energy / 10 ** (snr_db / 10)
