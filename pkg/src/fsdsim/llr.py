"""Max-log LLRs computed from a candidate list."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNoiseError, InputShapeError
from .fsd import CandidateList
from .mimo import QAM16, Constellation, real_to_bits

__all__ = ["DEFAULT_LLR_MAX", "LlrVector", "list_llr"]

DEFAULT_LLR_MAX = 8.0


@dataclass(frozen=True)
class LlrVector:
    """Extrinsic LLRs per frame bit.

    ``clamped[k]`` marks bits whose value was limited to ``+-l_max``, either
    because one hypothesis set was missing from the list or because the
    magnitude exceeded ``l_max``. ``empty_side[k]`` marks only the former.
    """

    values: np.ndarray
    l_max: float
    clamped: np.ndarray
    empty_side: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def list_llr(
    candidates: CandidateList,
    perm,
    sigma2: float,
    l_a=None,
    constellation: Constellation = QAM16,
    l_max: float = DEFAULT_LLR_MAX,
) -> LlrVector:
    """Max-log LLR of every frame bit, with maxima taken over the list only.

    For bit ``k`` the metric of a candidate with bit vector ``x`` (in +-1)
    is ``-ped / sigma2 + sum_{j != k} x_j L_A[j]``; the LLR is half the best
    metric with ``x_k = +1`` minus half the best with ``x_k = -1``.
    ``sigma2`` is the noise variance per real dimension. Bits absent on one
    side saturate at ``+-l_max``.
    """
    if sigma2 <= 0:
        raise DegenerateNoiseError("noise variance must be positive for LLRs")
    if len(candidates) == 0:
        raise InputShapeError("empty candidate list")
    paths = np.asarray(candidates.paths, dtype=float)
    if perm is not None:
        unperm = np.empty_like(paths)
        unperm[:, np.asarray(perm)] = paths
        paths = unperm
    x = 2.0 * real_to_bits(paths, constellation) - 1.0
    n_bits = x.shape[1]
    l_a = np.zeros(n_bits) if l_a is None else np.asarray(l_a, dtype=float)
    if l_a.shape != (n_bits,):
        raise InputShapeError(f"a-priori vector must have length {n_bits}")

    metric = -np.asarray(candidates.peds, dtype=float)[:, None] / sigma2
    metric = metric + (x @ l_a)[:, None] - x * l_a[None, :]
    plus = x > 0
    best_plus = np.where(plus, metric, -np.inf).max(axis=0)
    best_minus = np.where(~plus, metric, -np.inf).max(axis=0)

    empty_minus = ~np.any(~plus, axis=0)
    empty_plus = ~np.any(plus, axis=0)
    with np.errstate(invalid="ignore"):
        raw = 0.5 * best_plus - 0.5 * best_minus
    raw[empty_minus] = l_max
    raw[empty_plus] = -l_max
    values = np.clip(raw, -l_max, l_max)
    clamped = (empty_minus | empty_plus) | (np.abs(raw) > l_max)
    return LlrVector(values=values, l_max=l_max, clamped=clamped, empty_side=empty_minus | empty_plus)
