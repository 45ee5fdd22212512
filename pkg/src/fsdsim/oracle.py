"""Ground-truth detectors used to grade the FSD.

Everything here is exact: full enumeration of the lattice, a depth-first
Schnorr-Euchner sphere decoder (SEE-SD) with radius updates, its exact top-K
list variant and the max-log LLR evaluated over every lattice point.

Ties between equal distances are broken by lexicographic order of the path
read from the top level down, which is also the enumeration order of
:func:`lattice_points`.
"""

from __future__ import annotations

import functools
import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNoiseError, InputShapeError, LatticeTooLargeError
from .fsd import CandidateList
from .mimo import QAM16, Constellation, real_bit_index

__all__ = [
    "MAX_LATTICE",
    "MlSolution",
    "lattice_points",
    "exhaustive_peds",
    "exhaustive_ml",
    "see_sd",
    "see_lsd",
    "exhaustive_maxlog_llr",
]

MAX_LATTICE = 2**20


@dataclass(frozen=True)
class MlSolution:
    path: np.ndarray
    ped: float
    visited_nodes: int


def _check_size(n: int, constellation: Constellation) -> int:
    size = constellation.n_branches**n
    if size > MAX_LATTICE:
        raise LatticeTooLargeError(f"{size} lattice points exceeds the limit of {MAX_LATTICE}")
    return size


@functools.lru_cache(maxsize=8)
def _lattice_digits(n: int, nb: int) -> np.ndarray:
    idx = np.arange(nb**n)
    digits = (idx[:, None] // nb ** np.arange(n)[None, :]) % nb
    digits.setflags(write=False)
    return digits


def lattice_points(n: int, constellation: Constellation = QAM16) -> np.ndarray:
    """All ``nb**n`` real symbol vectors, top level most significant."""
    _check_size(n, constellation)
    return constellation.alphabet[_lattice_digits(n, constellation.n_branches)]


@functools.lru_cache(maxsize=64)
def _lattice_signs(n: int, constellation: Constellation, perm: tuple[int, ...]) -> np.ndarray:
    """+-1 frame bits of every lattice point after undoing ``perm``."""
    digits = _lattice_digits(n, constellation.n_branches)
    unperm = np.empty_like(digits)
    unperm[:, list(perm)] = digits
    labels = constellation.labels[unperm]  # (N, n, bits_per_dim)
    bits = np.empty((len(digits), constellation.order * n // 2), dtype=np.int8)
    bits[:, real_bit_index(n // 2, constellation)] = labels
    x = 2 * bits - 1
    x.setflags(write=False)
    return x


def exhaustive_peds(R, y_zf, constellation: Constellation = QAM16) -> np.ndarray:
    """``||y_zf - R s||^2`` for every lattice point, in lattice order."""
    R = np.asarray(R, dtype=float)
    y_zf = np.asarray(y_zf, dtype=float)
    n = len(y_zf)
    if R.shape != (n, n):
        raise InputShapeError(f"R has shape {R.shape}, y_zf has length {n}")
    _check_size(n, constellation)
    alphabet = constellation.alphabet
    nb = len(alphabet)
    peds = np.zeros(1)
    # acc[:, :level] holds the interference of already fixed symbols
    acc = np.zeros((1, n))
    for level in range(n - 1, -1, -1):
        k = len(peds)
        b = np.repeat(y_zf[level] - acc[:, level], nb)
        sym = np.tile(alphabet, k)
        e = b - R[level, level] * sym
        peds = np.repeat(peds, nb) + e * e
        if level:
            acc = np.repeat(acc[:, :level], nb, axis=0) + sym[:, None] * R[None, :level, level]
    return peds


def exhaustive_ml(R, y_zf, constellation: Constellation = QAM16) -> MlSolution:
    peds = exhaustive_peds(R, y_zf, constellation)
    best = int(np.argmin(peds))
    n = len(y_zf)
    nb = constellation.n_branches
    digits = (best // nb ** np.arange(n)) % nb
    return MlSolution(path=constellation.alphabet[digits], ped=float(peds[best]), visited_nodes=len(peds))


class _DepthFirst:
    """Shared state for the Schnorr-Euchner searches."""

    def __init__(self, R, y_zf, constellation: Constellation):
        R = np.asarray(R, dtype=float)
        self.y = [float(v) for v in y_zf]
        self.n = len(self.y)
        if R.shape != (self.n, self.n):
            raise InputShapeError(f"R has shape {R.shape}, y_zf has length {self.n}")
        self.R = R.tolist()
        self.alphabet = [float(a) for a in constellation.alphabet]
        self.path = [0.0] * self.n
        self.visited = 0

    def children(self, level: int):
        row = self.R[level]
        path = self.path
        b = self.y[level] - sum(row[j] * path[j] for j in range(level + 1, self.n))
        r = row[level]
        # Schnorr-Euchner order: closest child first
        return sorted((abs(b - r * s), s) for s in self.alphabet)

    def key(self) -> tuple[float, ...]:
        return tuple(reversed(self.path))


def see_sd(R, y_zf, constellation: Constellation = QAM16) -> MlSolution:
    """Depth-first sphere decoder with radius shrinking; exact ML."""
    st = _DepthFirst(R, y_zf, constellation)
    best = [math.inf, None, None]

    def descend(level: int, d_parent: float):
        for dist, s in st.children(level):
            d = d_parent + dist * dist
            if d > best[0]:
                break
            st.visited += 1
            st.path[level] = s
            if level == 0:
                key = st.key()
                if d < best[0] or (d == best[0] and key < best[2]):
                    best[:] = [d, list(st.path), key]
            else:
                descend(level - 1, d)

    descend(st.n - 1, 0.0)
    return MlSolution(path=np.array(best[1]), ped=best[0], visited_nodes=st.visited)


def see_lsd(R, y_zf, k: int, constellation: Constellation = QAM16) -> CandidateList:
    """List SEE-SD: the ``k`` smallest-distance lattice points, sorted.

    The radius stays infinite until ``k`` leaves are collected, then tracks
    the current ``k``-th best distance.
    """
    st = _DepthFirst(R, y_zf, constellation)
    if k < 1 or k > constellation.n_branches**st.n:
        raise InputShapeError(f"list size {k} outside [1, {constellation.n_branches ** st.n}]")
    heap: list = []  # max-heap on (ped, key) via negation

    def radius() -> float:
        return -heap[0][0] if len(heap) == k else math.inf

    def descend(level: int, d_parent: float):
        for dist, s in st.children(level):
            d = d_parent + dist * dist
            if d > radius():
                break
            st.visited += 1
            st.path[level] = s
            if level == 0:
                neg_key = tuple(-v for v in st.key())
                entry = (-d, neg_key, tuple(st.path))
                if len(heap) < k:
                    heapq.heappush(heap, entry)
                elif entry > heap[0]:
                    heapq.heapreplace(heap, entry)
            else:
                descend(level - 1, d)

    descend(st.n - 1, 0.0)
    ranked = sorted(heap, key=lambda e: (-e[0], tuple(-v for v in e[1])))
    return CandidateList(
        paths=np.array([e[2] for e in ranked]),
        peds=np.array([-e[0] for e in ranked]),
        visited_nodes=st.visited,
    )


def exhaustive_maxlog_llr(
    R,
    y_zf,
    sigma2: float,
    l_a=None,
    perm=None,
    constellation: Constellation = QAM16,
) -> np.ndarray:
    """Max-log extrinsic LLRs over the whole lattice.

    ``sigma2`` is the noise variance per real dimension. Bits map to
    ``0 -> -1`` and ``1 -> +1``; a positive LLR favours bit value 1. Output
    is indexed by frame bit. ``perm`` maps detection order back to antenna
    order as returned by the QRD.
    """
    if sigma2 <= 0:
        raise DegenerateNoiseError("noise variance must be positive for LLRs")
    n = len(y_zf)
    peds = exhaustive_peds(R, y_zf, constellation)
    perm = tuple(range(n)) if perm is None else tuple(int(p) for p in perm)
    x = _lattice_signs(n, constellation, perm)
    n_bits = x.shape[1]
    l_a = np.zeros(n_bits) if l_a is None else np.asarray(l_a, dtype=float)
    if l_a.shape != (n_bits,):
        raise InputShapeError(f"a-priori vector must have length {n_bits}")
    base = -peds / sigma2
    if np.any(l_a):
        base = base + x @ l_a
    out = np.empty(n_bits)
    for k in range(n_bits):
        metric = base - x[:, k] * l_a[k] if l_a[k] else base
        plus = x[:, k] > 0
        out[k] = 0.5 * metric[plus].max() - 0.5 * metric[~plus].max()
    return out
