"""Full SVD with a deterministic sign convention."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SvdFactors:
    U: np.ndarray  # m x m
    S: np.ndarray  # min(m, n), non-increasing
    V: np.ndarray  # n x n

    def compose(self) -> np.ndarray:
        return svd_compose(self.U, self.S, self.V)


def _fix_signs(U, V):
    # largest-magnitude entry of each U column made nonnegative; paired V column follows
    r = min(U.shape[1], V.shape[1])
    rows = np.argmax(np.abs(U), axis=0)
    signs = np.where(U[rows, np.arange(U.shape[1])] < 0, -1.0, 1.0)
    U = U * signs
    V = V.copy()
    V[:, :r] *= signs[:r]
    if V.shape[1] > r:
        # unpaired right vectors get the same rule on their own
        extra = V[:, r:]
        rows = np.argmax(np.abs(extra), axis=0)
        extra *= np.where(extra[rows, np.arange(extra.shape[1])] < 0, -1.0, 1.0)
    return U, V


def svd(A) -> SvdFactors:
    """Factor ``A = U diag(S) V^T`` with orthogonal U, V.

    Backed by LAPACK (``numpy.linalg.svd``); signs are normalized so the
    factors of a matrix with distinct singular values are reproducible.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or min(A.shape) < 1:
        raise ValueError(f"svd needs a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("svd input contains non-finite values")
    U, S, Vt = np.linalg.svd(A, full_matrices=True)
    U, V = _fix_signs(U, Vt.T)
    return SvdFactors(U, S, V)


def svd_compose(U, S, V) -> np.ndarray:
    """``U @ diag(S) @ V.T`` with a rectangular diagonal; S may be negative."""
    U = np.asarray(U, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    S = np.asarray(S, dtype=np.float64)
    if U.ndim != 2 or V.ndim != 2 or S.ndim != 1:
        raise ValueError("svd_compose expects 2-D U, V and 1-D S")
    if U.shape[0] != U.shape[1] or V.shape[0] != V.shape[1]:
        raise ValueError("U and V must be square")
    r = min(U.shape[0], V.shape[0])
    if S.shape[0] != r:
        raise ValueError(f"S must have {r} entries for {U.shape[0]}x{V.shape[0]} output, got {S.shape[0]}")
    return (U[:, :r] * S) @ V[:, :r].T
