"""Index-set algebra and the feasible cone families.

Three cone kinds over R^d are supported, all excluding pathological
endpoints (first and last entry must be nonzero):

* ``unconstrained``        -- only the endpoint conditions;
* ``zero``       (set L)   -- additionally w(L) = 0;
* ``coded``      (L, b)    -- additionally w(L) = c*b for some nonzero c.

Index sets are 1-based sorted tuples of distinct integers, matching the
JSON wire format ``{"kind", "d", "lambda", "b"}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleSpecError

DEFAULT_TOL = 1e-9
SAMPLE_MARGIN = 1e-3
_KINDS = ("unconstrained", "zero", "coded")


# ---------------------------------------------------------------------------
# index-set helpers

def as_index_set(indices) -> tuple[int, ...]:
    """Normalize to a strictly increasing tuple of ints (may be empty)."""
    out = tuple(sorted({int(j) for j in indices}))
    for j in out:
        if j < 1:
            raise ValueError(f"index {j} is not a positive integer")
    return out


def shift_minus_one(lam) -> tuple[int, ...]:
    """Minkowski shift {j - 1 : j in lam}; domain validity is the caller's."""
    return tuple(sorted(int(j) - 1 for j in set(lam)))


def p_of(lam) -> int:
    """Constrained-index count |lam U (lam - 1)|."""
    s = set(lam)
    return len(s | {j - 1 for j in s})


def _require_subset(lam, lo: int, hi: int, what: str) -> None:
    if not lam:
        raise ValueError(f"{what}: index set must be non-empty")
    if lam[0] < lo or lam[-1] > hi:
        raise ValueError(f"{what}: indices must lie in [{lo}, {hi}], got {lam}")


def _collinear(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    """Second singular value of the stacked 2-by-k matrix below tol * first."""
    s = np.linalg.svd(np.vstack([a, b]), compute_uv=False)
    if s.size < 2:
        return True
    return bool(s[0] == 0.0 or s[1] <= tol * s[0])


# ---------------------------------------------------------------------------
# cone specification

@dataclass(frozen=True)
class ConeSpec:
    """One feasible cone: kind, ambient dimension, index set, optional code.

    Normalizations applied at construction: a coded spec with an all-zero
    code collapses to the zero kind, and a zero/coded spec with an empty
    index set collapses to unconstrained.
    """

    kind: str
    d: int
    lam: tuple[int, ...] = ()
    b: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown cone kind {self.kind!r}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        lam = as_index_set(self.lam)
        object.__setattr__(self, "lam", lam)
        if lam and lam[-1] > self.d:
            raise ValueError(f"index {lam[-1]} exceeds dimension {self.d}")
        if self.kind == "coded":
            if self.b is None:
                raise ValueError("coded cone requires a code vector")
            b = tuple(float(v) for v in self.b)
            if len(b) != len(lam):
                raise ValueError("code length must match the index set size")
            if all(v == 0.0 for v in b):
                object.__setattr__(self, "kind", "zero")
                object.__setattr__(self, "b", None)
            else:
                object.__setattr__(self, "b", b)
        else:
            object.__setattr__(self, "b", None)
        if self.kind != "unconstrained" and not lam:
            object.__setattr__(self, "kind", "unconstrained")

    @property
    def b_array(self) -> np.ndarray:
        return np.asarray(self.b, dtype=float)

    @property
    def is_repetition(self) -> bool:
        """Coded spec whose code is collinear with the all-ones vector."""
        if self.kind != "coded":
            return False
        b = self.b_array
        return _collinear(b, np.ones_like(b), DEFAULT_TOL)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "d": self.d, "lambda": list(self.lam)}
        if self.kind == "coded":
            out["b"] = list(self.b)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ConeSpec":
        return cls(kind=obj["kind"], d=int(obj["d"]),
                   lam=tuple(obj.get("lambda", ())), b=obj.get("b"))


def unconstrained(d: int) -> ConeSpec:
    return ConeSpec("unconstrained", d)


def zero(lam, d: int) -> ConeSpec:
    return ConeSpec("zero", d, as_index_set(lam))


def coded(lam, b, d: int) -> ConeSpec:
    return ConeSpec("coded", d, as_index_set(lam), tuple(float(v) for v in b))


# ---------------------------------------------------------------------------
# membership and sampling

def member(w, spec: ConeSpec, tol: float = DEFAULT_TOL) -> bool:
    """Cone membership with relative tolerances.

    Endpoint nonzeroness is tested strictly (|w(1)|, |w(d)| > tol).  For the
    coded kind the scalar c is recovered by least-squares projection onto
    span(b) and the fit must satisfy
    ||w(L) - c*b||_inf <= tol * (1 + |c| * ||b||_inf) with |c| > tol.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size != spec.d:
        raise ValueError(f"vector length {w.size} does not match d={spec.d}")
    if abs(w[0]) <= tol or abs(w[-1]) <= tol:
        return False
    if spec.kind == "unconstrained":
        return True
    idx = np.asarray(spec.lam, dtype=int) - 1
    wl = w[idx]
    if spec.kind == "zero":
        return bool(float(np.max(np.abs(wl))) <= tol)
    b = spec.b_array
    c = float(wl @ b) / float(b @ b)
    if abs(c) <= tol:
        return False
    resid = float(np.max(np.abs(wl - c * b)))
    return bool(resid <= tol * (1.0 + abs(c) * float(np.max(np.abs(b)))))


def code_scalar(w, spec: ConeSpec) -> float:
    """Least-squares scalar c with w(L) ~ c*b for a coded spec."""
    if spec.kind != "coded":
        raise ValueError("code_scalar requires a coded spec")
    w = np.asarray(w, dtype=float)
    idx = np.asarray(spec.lam, dtype=int) - 1
    b = spec.b_array
    return float(w[idx] @ b) / float(b @ b)


def sample(spec: ConeSpec, rng, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Draw a member of the cone; deterministic for a given seed.

    Free entries are i.i.d. standard normal, redrawn while any required
    nonzero entry (the endpoints, and the coded scalar c) is within
    SAMPLE_MARGIN of zero.  ``rng`` may be an integer seed or a Generator.
    """
    rng = np.random.default_rng(rng)
    d = spec.d
    lam_set = set(spec.lam)
    if spec.kind == "zero" and (1 in lam_set or d in lam_set):
        raise InfeasibleSpecError(
            f"zero cone with an endpoint in the index set is empty: {spec}")
    if spec.kind == "coded":
        if 1 in lam_set and spec.b[0] == 0.0:
            raise InfeasibleSpecError("coded cone forces w(1) = 0")
        if d in lam_set and spec.b[-1] == 0.0:
            raise InfeasibleSpecError("coded cone forces w(d) = 0")

    idx = np.asarray(spec.lam, dtype=int) - 1
    for _ in range(100):
        w = rng.standard_normal(d)
        for pos in (0, d - 1):
            while abs(w[pos]) < SAMPLE_MARGIN:
                w[pos] = rng.standard_normal()
        if spec.kind == "zero":
            w[idx] = 0.0
        elif spec.kind == "coded":
            c = rng.standard_normal()
            while abs(c) < SAMPLE_MARGIN:
                c = rng.standard_normal()
            w[idx] = c * spec.b_array
        if member(w, spec, tol):
            return w
    raise InfeasibleSpecError(f"could not sample a member of {spec}")


# ---------------------------------------------------------------------------
# pair classification

@dataclass(frozen=True)
class PairType:
    """Category of an (index set, code) pair.

    ``label`` is one of type0/type1/type2/unclassified.  For type1 pairs,
    ``r`` is the overlap collinearity ratio; ``lam_star`` holds the 1-based
    positions (within the sorted index set) of the overlapping indices and
    is present only when the code is not collinear with the all-ones vector.
    """

    label: str
    lam_star: tuple[int, ...] | None = None
    r: float | None = None

    @property
    def t(self) -> int | None:
        return {"type0": 0, "type1": 1, "type2": 2}.get(self.label)

    def to_json(self) -> dict:
        out = {"label": self.label}
        if self.lam_star is not None:
            out["lam_star"] = list(self.lam_star)
        if self.r is not None:
            out["r"] = self.r
        return out


def overlap_positions(lam) -> tuple[int, ...]:
    """1-based positions, within sorted lam, of the elements of lam n (lam-1)."""
    lam = as_index_set(lam)
    s = set(lam)
    return tuple(i + 1 for i, j in enumerate(lam) if j + 1 in s)


def classify_pair(lam, b, d: int, tol: float = DEFAULT_TOL) -> PairType:
    """Classify an (index set, code) pair into type 0, 1, 2, or unclassified.

    type0: zero code with d >= 5 and lam inside {3, ..., d-2};
    type2: nonzero code, no two adjacent indices;
    type1: nonzero code with adjacent indices, and either b collinear with
           the all-ones vector, or b restricted to the overlap positions
           collinear (nonzero ratio r) with b at the shifted positions.
    Everything else is unclassified.  Collinearity is a second-singular-value
    test at relative tolerance tol.
    """
    lam = as_index_set(lam)
    if d < 3:
        raise ValueError("d must be >= 3")
    _require_subset(lam, 2, d - 1, "classify_pair")
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or b.size != len(lam):
        raise ValueError("code length must match the index set size")

    if float(np.max(np.abs(b))) <= tol:
        if d >= 5 and lam[0] >= 3 and lam[-1] <= d - 2:
            return PairType("type0")
        return PairType("unclassified")

    stars = overlap_positions(lam)
    if not stars:
        return PairType("type2")

    ones = np.ones_like(b)
    if _collinear(b, ones, tol):
        return PairType("type1", lam_star=None, r=1.0)

    pos = np.asarray(stars, dtype=int) - 1
    bs, bs1 = b[pos], b[pos + 1]
    scale = float(np.max(np.abs(b)))
    if float(np.max(np.abs(bs))) <= tol * scale or float(np.max(np.abs(bs1))) <= tol * scale:
        return PairType("unclassified")
    if not _collinear(bs, bs1, tol):
        return PairType("unclassified")
    r = float(bs1 @ bs) / float(bs @ bs)
    if abs(r) <= tol:
        return PairType("unclassified")
    return PairType("type1", lam_star=stars, r=r)


def geometric_profile(lam, r: float, d: int) -> ConeSpec:
    """Coded cone with code (1, r, r^2, ...) on a contiguous index set."""
    lam = as_index_set(lam)
    if not lam:
        raise ValueError("geometric_profile: index set must be non-empty")
    if lam != tuple(range(lam[0], lam[-1] + 1)):
        raise ValueError(f"geometric_profile: index set {lam} is not contiguous")
    if not 0.0 < abs(r) < 1.0:
        raise ValueError(f"geometric_profile: need 0 < |r| < 1, got r={r}")
    b = tuple(float(r) ** k for k in range(len(lam)))
    return coded(lam, b, d)


def angle_of_ratio(r: float) -> float:
    """Excluded-angle offset arctan(r) for a type1 ratio r."""
    return math.atan(r)
