"""QR and sorted QR decomposition by modified Gram-Schmidt."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputShapeError, SingularChannelError

__all__ = ["QrdResult", "qr_decompose", "sorted_qr_decompose", "zf_transform", "decompose", "RANK_TOL"]

RANK_TOL = 1e-12


@dataclass(frozen=True)
class QrdResult:
    """``H[:, perm] = Q @ R`` with ``R`` upper triangular, positive diagonal.

    ``y_zf`` is filled in by :func:`decompose`; it stays ``None`` otherwise.
    """

    Q: np.ndarray
    R: np.ndarray
    perm: np.ndarray
    y_zf: np.ndarray | None = None

    def unpermute(self, paths) -> np.ndarray:
        """Map detection-order symbol vectors back to antenna order."""
        paths = np.asarray(paths)
        out = np.empty_like(paths)
        out[..., self.perm] = paths
        return out

    def permute(self, s_real) -> np.ndarray:
        return np.asarray(s_real)[..., self.perm]


def _mgs(H, sort: bool) -> QrdResult:
    H = np.array(H, dtype=float)
    if H.ndim != 2 or H.shape[0] < H.shape[1]:
        raise InputShapeError(f"need a tall or square matrix, got shape {H.shape}")
    m, n = H.shape
    Q = H.copy()
    R = np.zeros((n, n))
    perm = np.arange(n)
    norms = np.sum(Q**2, axis=0)
    for i in range(n):
        if sort:
            # weakest remaining column first; ties go to the lowest original index
            k = min(range(i, n), key=lambda col: (norms[col], perm[col]))
            if k != i:
                Q[:, [i, k]] = Q[:, [k, i]]
                R[:, [i, k]] = R[:, [k, i]]
                norms[[i, k]] = norms[[k, i]]
                perm[[i, k]] = perm[[k, i]]
        r_ii = np.linalg.norm(Q[:, i])
        if r_ii < RANK_TOL:
            raise SingularChannelError(f"column {perm[i]} is linearly dependent (residual {r_ii:.3g})")
        R[i, i] = r_ii
        Q[:, i] /= r_ii
        for col in range(i + 1, n):
            R[i, col] = Q[:, i] @ Q[:, col]
            Q[:, col] -= R[i, col] * Q[:, i]
            norms[col] = Q[:, col] @ Q[:, col]
    return QrdResult(Q=Q, R=R, perm=perm)


def qr_decompose(H) -> QrdResult:
    return _mgs(H, sort=False)


def sorted_qr_decompose(H) -> QrdResult:
    """Sorted QRD: at every step the remaining column with the smallest
    residual norm is orthogonalised next.

    The weakest stream lands at index 0 and is therefore detected last, while
    the strongest streams end up at the top of the search tree.
    """
    return _mgs(H, sort=True)


def zf_transform(qrd: QrdResult, y_real) -> np.ndarray:
    y_real = np.asarray(y_real, dtype=float)
    if y_real.shape != (qrd.Q.shape[0],):
        raise InputShapeError(f"received vector has shape {y_real.shape}, expected ({qrd.Q.shape[0]},)")
    return qrd.Q.T @ y_real


def decompose(H_real, y_real, mode: str = "sorted") -> QrdResult:
    """QRD (``mode`` is ``"plain"`` or ``"sorted"``) with ``y_zf`` attached."""
    if mode == "plain":
        q = qr_decompose(H_real)
    elif mode == "sorted":
        q = sorted_qr_decompose(H_real)
    else:
        raise ValueError(f"unknown qrd mode {mode!r}")
    return QrdResult(q.Q, q.R, q.perm, zf_transform(q, y_real))
