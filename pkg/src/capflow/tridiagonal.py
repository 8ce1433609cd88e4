"""Thomas algorithm for tridiagonal systems."""
from __future__ import annotations

import numpy as np

__all__ = ["solve_tridiagonal", "is_strictly_diagonally_dominant"]


def is_strictly_diagonally_dominant(lower, diag, upper) -> bool:
    """``lower[i]`` sits in row ``i + 1``, ``upper[i]`` in row ``i``."""
    off = np.zeros_like(diag)
    off[1:] += np.abs(lower)
    off[:-1] += np.abs(upper)
    return bool(np.all(np.abs(diag) > off))


def solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    """Solve ``A x = rhs`` for tridiagonal ``A`` by forward elimination and back substitution.

    Parameters
    ----------
    lower : array of length m-1
        Sub-diagonal, ``A[i+1, i]``.
    diag : array of length m
        Main diagonal.
    upper : array of length m-1
        Super-diagonal, ``A[i, i+1]``.
    rhs : array of length m

    No pivoting is done; callers are expected to pass diagonally dominant
    systems.
    """
    a = np.asarray(lower, dtype=float)
    b = np.asarray(diag, dtype=float)
    c = np.asarray(upper, dtype=float)
    d = np.asarray(rhs, dtype=float)
    m = b.shape[0]
    if a.shape != (m - 1,) or c.shape != (m - 1,) or d.shape != (m,):
        raise ValueError("inconsistent tridiagonal band lengths")

    # plain floats: the recurrences are sequential, numpy scalars only add overhead
    a, b, c, d = a.tolist(), b.tolist(), c.tolist(), d.tolist()
    cp = [0.0] * max(m - 1, 1)
    dp = [0.0] * m
    piv = b[0]
    if piv == 0.0:
        raise ZeroDivisionError("zero pivot in tridiagonal solve")
    if m > 1:
        cp[0] = c[0] / piv
    dp[0] = d[0] / piv
    for i in range(1, m):
        piv = b[i] - a[i - 1] * cp[i - 1]
        if piv == 0.0:
            raise ZeroDivisionError("zero pivot in tridiagonal solve")
        if i < m - 1:
            cp[i] = c[i] / piv
        dp[i] = (d[i] - a[i - 1] * dp[i - 1]) / piv

    x = [0.0] * m
    x[-1] = dp[-1]
    for i in range(m - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return np.array(x)
