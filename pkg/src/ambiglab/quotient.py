"""Finite shift-rotation decompositions of a vector with nonzero endpoints.

A vector w in R^d with w(1) != 0 and w(d) != 0 may admit finitely many
decompositions

    w = cos(g) * (w*; 0) - sin(g) * (0; w*),      w* in R^{d-1},

with at most 2d-2 of them, and at least one when d is even.  ``decompose``
finds all of them through a polynomial-root characterization;
``decompose_oracle`` is an independent brute-force grid/bisection sweep used
to cross-validate it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convolution import pad_head, pad_tail

DEFAULT_TOL = 1e-9
_REAL_IMAG_TOL = 1e-8
_CLUSTER_TOL = 1e-7
TWO_PI = 2.0 * math.pi


@dataclass(eq=False)
class QuotientElement:
    """One decomposition (w*, gamma) of a source vector."""

    w_star: np.ndarray
    gamma: float

    def to_json(self) -> dict:
        return {"w_star": [float(v) for v in self.w_star], "gamma": float(self.gamma)}


def reconstruct(w_star, gamma: float) -> np.ndarray:
    """Rebuild the source vector from one decomposition element.

    Entrywise (1-based): w(1) = cos(g) w*(1); w(j) = cos(g) w*(j) -
    sin(g) w*(j-1) for the interior; w(d) = -sin(g) w*(d-1).
    """
    w_star = np.asarray(w_star, dtype=float)
    if w_star.ndim != 1 or w_star.size < 1:
        raise ValueError("w_star must be a non-empty 1-D array")
    return math.cos(gamma) * pad_tail(w_star) - math.sin(gamma) * pad_head(w_star)


def _validate(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise ValueError("decomposition requires a 1-D vector of length >= 2")
    if w[0] == 0.0 or w[-1] == 0.0:
        raise ValueError("pathological vector: endpoints must be nonzero")
    return w


def _factor_at(w: np.ndarray, gamma: float) -> np.ndarray:
    """Solve the defining triangular recursion for w* at a fixed angle.

    The forward sweep amplifies rounding by tan(gamma) per step, the
    backward sweep by its inverse, so the stable direction is chosen from
    |tan(gamma)|.
    """
    c, s = math.cos(gamma), math.sin(gamma)
    d = w.size
    ws = np.empty(d - 1)
    if abs(s) <= abs(c):
        ws[0] = w[0] / c
        for j in range(1, d - 1):
            ws[j] = (w[j] + s * ws[j - 1]) / c
    else:
        ws[d - 2] = -w[d - 1] / s
        for j in range(d - 3, -1, -1):
            ws[j] = (c * ws[j + 1] - w[j + 1]) / s
    return ws


def _terminal_residual(w: np.ndarray, gamma: float) -> float:
    """Last defining equation after a forward sweep; zero at a decomposition."""
    c, s = math.cos(gamma), math.sin(gamma)
    with np.errstate(over="ignore", invalid="ignore"):
        ws = w[0] / c
        for j in range(1, w.size - 1):
            ws = (w[j] + s * ws) / c
        return float(w[-1] + s * ws)


def _terminal_residual_grid(w: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    """Vectorized terminal residual over many angles at once."""
    c, s = np.cos(gammas), np.sin(gammas)
    ws = np.full_like(gammas, w[0]) / c
    for j in range(1, w.size - 1):
        ws = (w[j] + s * ws) / c
    return w[-1] + s * ws


def _element_at(w: np.ndarray, gamma: float, tol: float) -> QuotientElement | None:
    ws = _factor_at(w, gamma)
    resid = float(np.max(np.abs(reconstruct(ws, gamma) - w)))
    if resid <= tol * float(np.max(np.abs(w))):
        return QuotientElement(ws, gamma % TWO_PI)
    return None


def decompose(w, tol: float = DEFAULT_TOL) -> list[QuotientElement]:
    """All decomposition elements of w, angles reported in [0, 2*pi).

    The admissible tan(gamma) values are exactly the real roots of
    P(s) = sum_i w(i) s^{d-i}, a degree-(d-1) polynomial with leading
    coefficient w(1) != 0.  Each real root yields the two angles
    arctan(s) and arctan(s) + pi, whose factors differ by sign.  Roots come
    from companion-matrix eigenvalues, are kept when their imaginary part is
    below 1e-8 * (1 + |root|), polished by two Newton steps, and clustered
    so numerically split multiple roots emit one element each.
    """
    w = _validate(w)
    d = w.size
    coeffs = w  # highest-degree first
    deriv = np.polyder(coeffs)

    roots = np.roots(coeffs)
    real = [float(z.real) for z in roots
            if abs(z.imag) <= _REAL_IMAG_TOL * (1.0 + abs(z))]
    polished = []
    for s in real:
        for _ in range(2):
            dp = np.polyval(deriv, s)
            if dp == 0.0:
                break
            s = s - np.polyval(coeffs, s) / dp
        polished.append(float(s))

    polished.sort()
    clustered: list[float] = []
    for s in polished:
        if clustered and abs(s - clustered[-1]) < _CLUSTER_TOL:
            continue
        clustered.append(s)

    out: list[QuotientElement] = []
    for s in clustered:
        base = math.atan(s)
        for gamma in (base % TWO_PI, (base + math.pi) % TWO_PI):
            elem = _element_at(w, gamma, tol)
            if elem is not None:
                out.append(elem)
    out.sort(key=lambda e: e.gamma)
    return out


def decompose_oracle(w, grid_points: int = 4096,
                     tol: float = DEFAULT_TOL) -> list[QuotientElement]:
    """Brute-force sweep over gamma; independent cross-check of decompose.

    The terminal residual is pi-periodic, so a uniform grid over [0, pi)
    (grid_points counts the full [0, 2*pi) sweep) is scanned, excluding
    cos(gamma) ~ 0 itself but keeping sentinel points just beside it so
    near-vertical solutions are still bracketed.  Sign changes of the
    residual are refined by bisection; every angle found contributes both
    gamma and gamma + pi.  Coarse grids may miss tightly spaced roots; that
    is a documented resolution limit, not an error.
    """
    w = _validate(w)
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    half = grid_points // 2  # coarse grids only degrade recall, never error
    step = math.pi / half
    pole = math.pi / 2.0
    delta = 1e-12

    grid = sorted(set(np.arange(half) * step) | {pole - delta, pole + delta})
    with np.errstate(over="ignore", invalid="ignore"):
        resid = _terminal_residual_grid(w, np.asarray(grid))

    scale = float(np.max(np.abs(w)))
    found: list[float] = []

    def bisect(lo: float, hi: float, flo: float) -> float:
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fmid = _terminal_residual(w, mid)
            if fmid == 0.0:
                return mid
            if (flo < 0) == (fmid < 0):
                lo, flo = mid, fmid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    npts = len(grid)
    for i in range(npts):
        j = (i + 1) % npts
        gi = float(grid[i])
        gj = float(grid[j]) if j > 0 else math.pi  # wrap: residual is pi-periodic
        if gi < pole < gj:  # the pole flips sign spuriously
            continue
        fi, fj = resid[i], resid[j]
        if fi == 0.0:
            found.append(gi)
        elif (fi < 0) != (fj < 0):
            found.append(bisect(gi, gj, fi))
        elif abs(fi) <= tol * scale:
            found.append(gi)

    out: list[QuotientElement] = []
    seen: list[float] = []
    candidates = [g % math.pi for g in found]
    for base in sorted(candidates):
        if seen and min(abs(base - s) for s in seen) < 1e-6:
            continue
        emitted = False
        for gamma in (base, base + math.pi):
            elem = _element_at(w, gamma, tol)
            if elem is not None:
                out.append(elem)
                emitted = True
        if emitted:
            seen.append(base)
    out.sort(key=lambda e: e.gamma)
    return out
