"""Linear convolution, its lifted matrix operator, and rank-k null-space tests.

All routines are pure functions on 1-D/2-D numpy arrays.  Integer inputs are
kept in integer arithmetic end to end, so small-integer examples reproduce
bit-exactly; float inputs go through ordinary double precision.
"""

from __future__ import annotations

import numpy as np

DEFAULT_RANK_TOL = 1e-9


def pad_tail(w: np.ndarray) -> np.ndarray:
    """Append one zero: w in R^k -> (w; 0) in R^{k+1}."""
    w = np.asarray(w)
    return np.concatenate([w, w[:1] * 0])


def pad_head(w: np.ndarray) -> np.ndarray:
    """Prepend one zero: w in R^k -> (0; w) in R^{k+1}."""
    w = np.asarray(w)
    return np.concatenate([w[:1] * 0, w])


def convolve(x, y) -> np.ndarray:
    """Full linear convolution z of x in R^m and y in R^n, z in R^{m+n-1}.

    z(l) = sum_j x(j) * y(l+1-j) over the valid index range (1-based).
    Computed by direct O(m*n) summation (no FFT), so it is exact on
    integer inputs and bilinear in (x, y).
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.ndim != 1 or y.ndim != 1:
        raise ValueError("convolve expects 1-D arrays")
    if x.size == 0 or y.size == 0:
        raise ValueError("convolve requires non-empty inputs")
    return np.convolve(x, y)


def lift_apply(W) -> np.ndarray:
    """Anti-diagonal sums of an m-by-n matrix, giving a vector in R^{m+n-1}.

    This is the unique linear operator with lift_apply(outer(x, y)) equal to
    convolve(x, y) for all x, y.  Entry l (0-based) sums W[i, j] over i+j = l.
    """
    W = np.asarray(W)
    if W.ndim != 2 or W.size == 0:
        raise ValueError("lift_apply expects a non-empty 2-D array")
    m, n = W.shape
    flipped = np.fliplr(W)
    out = np.zeros(m + n - 1, dtype=W.dtype if W.dtype != bool else np.int64)
    for l in range(m + n - 1):
        out[l] = flipped.diagonal(n - 1 - l).sum()
    return out


def delay_matrix(l: int, n: int, m: int) -> np.ndarray:
    """0/1 Toeplitz matrix D in {0,1}^{(m+n-1) x n} delaying by l-1 samples.

    D @ h places h in R^n at offset l-1 of a length-(m+n-1) vector, so a
    sparse gain vector g supported on {l_j} satisfies
    sum_j g(l_j) * delay_matrix(l_j, n, m) @ h == convolve(g, h).
    """
    if not 1 <= l <= m:
        raise ValueError(f"delay l={l} out of range [1, {m}]")
    if n < 1:
        raise ValueError("n must be >= 1")
    D = np.zeros((m + n - 1, n))
    cols = np.arange(n)
    D[cols + (l - 1), cols] = 1.0
    return D


def channel_superposition(g, h) -> np.ndarray:
    """Superpose delayed, scaled copies of h according to the gains g.

    Evaluates sum over the support of g of g(j) * delay_matrix(j, ...) @ h,
    which coincides with convolve(g, h) to machine precision.
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if g.ndim != 1 or h.ndim != 1 or g.size == 0 or h.size == 0:
        raise ValueError("channel_superposition expects non-empty 1-D arrays")
    m, n = g.size, h.size
    z = np.zeros(m + n - 1)
    for j in np.flatnonzero(g):
        z += g[j] * (delay_matrix(int(j) + 1, n, m) @ h)
    return z


def rank2_null_matrix(u, v) -> np.ndarray:
    """Canonical rank-two matrix annihilated by lift_apply.

    For u in R^{m-1} and v in R^{n-1} returns
        Q = (u;0)(0,v^T) - (0;u)(v^T,0)  in R^{m x n},
    which satisfies lift_apply(Q) == 0 identically and has rank exactly 2
    whenever u != 0 and v != 0.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    if u.ndim != 1 or v.ndim != 1 or u.size < 1 or v.size < 1:
        raise ValueError("rank2_null_matrix expects non-empty 1-D arrays")
    return np.outer(pad_tail(u), pad_head(v)) - np.outer(pad_head(u), pad_tail(v))


def numerical_rank(W, tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values above tol times the largest one."""
    W = np.asarray(W, dtype=float)
    s = np.linalg.svd(W, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def in_nullspace(W, k: int, tol: float = DEFAULT_RANK_TOL) -> bool:
    """Whether W lies in the rank-k null space of the lifted operator.

    True iff numerical_rank(W, tol) <= k and the lifted image is zero to
    within tol in the sup norm.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    W = np.asarray(W, dtype=float)
    if numerical_rank(W, tol) > k:
        return False
    return float(np.max(np.abs(lift_apply(W)))) <= tol
