"""2-D Walsh-Hadamard transform in natural (Hadamard) order.

Unnormalized convention: the forward transform returns ``H @ f @ H`` and
the inverse divides by ``N**2``, so integer images map to integer
coefficients and the round trip is exact.
"""

from __future__ import annotations

import numpy as np


def is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def bit(z: int, k: int) -> int:
    """k-th bit of the binary representation of z (b_0 is least significant)."""
    return (z >> k) & 1


def hadamard_matrix(n: int) -> np.ndarray:
    """Kernel ``H[u, x] = (-1) ** sum_i b_i(x) b_i(u)``, built entry by entry."""
    if not is_pow2(n):
        raise ValueError(f"WHT size must be a power of two, got {n}")
    idx = np.arange(n)
    parity = np.zeros((n, n), dtype=np.int64)
    for i in range(max(n.bit_length() - 1, 0)):
        parity += np.outer((idx >> i) & 1, (idx >> i) & 1)
    return np.where(parity % 2 == 0, 1, -1).astype(np.int64)


def _check_square(a: np.ndarray) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"WHT needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if not is_pow2(n):
        raise ValueError(f"WHT side must be a power of two, got {n}")
    return n


def _as_work_array(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype.kind in "iub":
        return a.astype(np.int64)
    if a.dtype == object:
        return a.copy()
    return a.astype(np.float64)


def fwht_axis0(a: np.ndarray) -> np.ndarray:
    """Unnormalized fast WHT along the first axis (butterfly, O(N log N))."""
    n = a.shape[0]
    rest = a.shape[1:]
    h = 1
    while h < n:
        blocks = a.reshape(n // (2 * h), 2, h, *rest)
        top, bottom = blocks[:, 0], blocks[:, 1]
        a = np.stack((top + bottom, top - bottom), axis=1).reshape(n, *rest)
        h *= 2
    return a


def wht_forward_2d(f) -> np.ndarray:
    """Return ``H @ f @ H`` for a square power-of-two matrix."""
    a = _as_work_array(f)
    _check_square(a)
    a = fwht_axis0(a)
    return fwht_axis0(a.T).T.copy()


def wht_inverse_2d(coefs) -> np.ndarray:
    """Inverse of :func:`wht_forward_2d`.

    Integer input yields an integer result (division by ``N**2`` is exact
    for any matrix that came out of the forward transform); real input
    yields the real inverse.
    """
    a = _as_work_array(coefs)
    n = _check_square(a)
    a = wht_forward_2d(a)
    norm = n * n
    if a.dtype == np.float64:
        return a / norm
    q, r = a // norm, a % norm
    if np.any(r != 0):
        raise ValueError("integer coefficients are not in the range of the forward WHT")
    return q


def wht_naive_2d(f) -> np.ndarray:
    """O(N^2)-per-axis reference evaluation via the explicit kernel matrix."""
    a = np.asarray(f, dtype=object)
    n = _check_square(a)
    h = hadamard_matrix(n).astype(object)
    return h.dot(a).dot(h)
