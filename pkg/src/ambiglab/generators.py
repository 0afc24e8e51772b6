"""Certified unidentifiability witnesses for constrained blind deconvolution.

Every generator emits an ``AdversarialInstance``: two vector pairs that are
not scalar-equivalent yet convolve to the same output, together with the
generating parameters, the cones both pairs live in, and the claimed
dimension of the ambiguity family the instance was drawn from.

All pairs come from one parametric map.  Given u in R^{m-1},
v in R^{n-1} and angles (theta, phi):

    x  = cos(theta) (u; 0) - sin(theta) (0; u)
    y  = sin(phi)   (0; v) - cos(phi)   (v; 0)

and the certificate pair (x', y') uses the same u, v with the two angles
exchanged.  Then outer(x, y) - outer(x', y') = sin(phi - theta) * Q(u, v)
with Q the canonical rank-two null matrix of the lifted operator, so both
pairs share one convolution.  The generators differ only in how u and v are
constrained so that all four vectors stay inside the requested cones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import cones as cn
from .convolution import convolve, pad_head, pad_tail
from .errors import (InfeasibleSpecError, InternalConsistencyError,
                     NoCertificateFoundError, UnsupportedPairTypeError)
from .quotient import decompose, reconstruct

ANGLE_MARGIN = 1e-3
SCALAR_MARGIN = 1e-3
SELF_CHECK_TOL = 1e-10
NONCOLLINEAR_TOL = 1e-6


# ---------------------------------------------------------------------------
# data types

@dataclass(eq=False)
class SignalPair:
    """One candidate solution (x, y) of the deconvolution problem."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x)
        self.y = np.asarray(self.y)

    @property
    def m(self) -> int:
        return self.x.size

    @property
    def n(self) -> int:
        return self.y.size

    def convolved(self) -> np.ndarray:
        return convolve(self.x, self.y)


@dataclass(eq=False)
class AdversarialInstance:
    """A certified witness: two inequivalent pairs with equal convolutions."""

    pair1: SignalPair
    pair2: SignalPair
    u: np.ndarray
    v: np.ndarray
    theta: float
    phi: float
    cone1: cn.ConeSpec
    cone2: cn.ConeSpec
    claimed_dim: int
    c1: float | None = None
    c2: float | None = None
    c1p: float | None = None
    c2p: float | None = None

    @property
    def m(self) -> int:
        return self.pair1.m

    @property
    def n(self) -> int:
        return self.pair1.n

    def to_json(self) -> dict:
        def vec(a):
            return [float(t) for t in a]

        return {
            "m": self.m,
            "n": self.n,
            "pair1": {"x": vec(self.pair1.x), "y": vec(self.pair1.y)},
            "pair2": {"x": vec(self.pair2.x), "y": vec(self.pair2.y)},
            "params": {
                "u": vec(self.u), "v": vec(self.v),
                "theta": float(self.theta), "phi": float(self.phi),
                "c1": self.c1, "c2": self.c2,
                "c1p": self.c1p, "c2p": self.c2p,
            },
            "cones": [self.cone1.to_json(), self.cone2.to_json()],
            "claimed_dim": int(self.claimed_dim),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AdversarialInstance":
        p = obj["params"]
        return cls(
            pair1=SignalPair(np.asarray(obj["pair1"]["x"], dtype=float),
                             np.asarray(obj["pair1"]["y"], dtype=float)),
            pair2=SignalPair(np.asarray(obj["pair2"]["x"], dtype=float),
                             np.asarray(obj["pair2"]["y"], dtype=float)),
            u=np.asarray(p["u"], dtype=float),
            v=np.asarray(p["v"], dtype=float),
            theta=float(p["theta"]), phi=float(p["phi"]),
            cone1=cn.ConeSpec.from_json(obj["cones"][0]),
            cone2=cn.ConeSpec.from_json(obj["cones"][1]),
            claimed_dim=int(obj["claimed_dim"]),
            c1=p.get("c1"), c2=p.get("c2"),
            c1p=p.get("c1p"), c2p=p.get("c2p"),
        )


# ---------------------------------------------------------------------------
# the parametric map

def build_pair_from_params(u, v, theta: float, phi: float) -> SignalPair:
    """First pair of the family: x from (u, theta), y from (v, phi)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    x = math.cos(theta) * pad_tail(u) - math.sin(theta) * pad_head(u)
    y = math.sin(phi) * pad_head(v) - math.cos(phi) * pad_tail(v)
    return SignalPair(x, y)


def certificate_from_params(u, v, theta: float, phi: float) -> SignalPair:
    """Certificate pair: same u, v with the roles of the angles exchanged."""
    return build_pair_from_params(u, v, phi, theta)


def rotational_family(x1, y1, x2, y2, theta: float, phi: float,
                      tol: float = 1e-9) -> tuple[SignalPair, SignalPair]:
    """Rotate two seed pairs with a common convolution into two new ones.

    Given convolve(x1, y1) == convolve(x2, y2) with x1, x2 non-collinear and
    theta != phi (mod pi), returns

        x1' = x1 cos(theta) - x2 sin(theta),  y1' = y1 sin(phi) - y2 cos(phi)
        x2' = x1 cos(phi) - x2 sin(phi),      y2' = y1 sin(theta) - y2 cos(theta)

    whose convolutions again coincide and equal
    z0 sin(theta+phi) - (x2*y1) sin(theta) sin(phi) - (x1*y2) cos(theta) cos(phi).
    """
    x1 = np.asarray(x1, dtype=float)
    y1 = np.asarray(y1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    z1, z2 = convolve(x1, y1), convolve(x2, y2)
    scale = max(float(np.max(np.abs(z1))), 1.0)
    if float(np.max(np.abs(z1 - z2))) > tol * scale:
        raise ValueError("seed pairs must share a common convolution")
    s = np.linalg.svd(np.vstack([x1, x2]), compute_uv=False)
    if s[1] <= NONCOLLINEAR_TOL * s[0]:
        raise ValueError("seed vectors x1, x2 must be non-collinear")
    if abs(math.sin(theta - phi)) <= tol:
        raise ValueError("theta and phi must differ (mod pi)")
    p1 = SignalPair(x1 * math.cos(theta) - x2 * math.sin(theta),
                    y1 * math.sin(phi) - y2 * math.cos(phi))
    p2 = SignalPair(x1 * math.cos(phi) - x2 * math.sin(phi),
                    y1 * math.sin(theta) - y2 * math.cos(theta))
    return p1, p2


def rotated_output(z0, x2y1, x1y2, theta: float, phi: float) -> np.ndarray:
    """Closed form of the common convolution of a rotated pair family."""
    return (np.asarray(z0, dtype=float) * math.sin(theta + phi)
            - np.asarray(x2y1, dtype=float) * math.sin(theta) * math.sin(phi)
            - np.asarray(x1y2, dtype=float) * math.cos(theta) * math.cos(phi))


# ---------------------------------------------------------------------------
# angle sampling

def _circ_dist(a: float, b: float, period: float) -> float:
    r = (a - b) % period
    return min(r, period - r)


def angle_admissible(a: float, excluded: tuple[float, ...],
                     margin: float = ANGLE_MARGIN) -> bool:
    """Distance (mod pi) to every excluded offset exceeds the margin."""
    return all(_circ_dist(a, e, math.pi) > margin for e in excluded)


def sample_angle(rng, excluded: tuple[float, ...],
                 margin: float = ANGLE_MARGIN) -> float:
    """Uniform draw from [0, pi) rejected near the excluded offsets (mod pi)."""
    rng = np.random.default_rng(rng)
    for _ in range(1000):
        a = float(rng.uniform(0.0, math.pi))
        if angle_admissible(a, excluded, margin):
            return a
    raise InfeasibleSpecError("excluded angle set leaves no room to sample")


def _sample_angle_pair(rng, extra: tuple[float, ...] = ()) -> tuple[float, float]:
    base = (0.0, math.pi / 2.0) + extra
    theta = sample_angle(rng, base)
    phi = sample_angle(rng, base + (theta,))
    return theta, phi


# ---------------------------------------------------------------------------
# normalization and self-check

def _normalize(pair: SignalPair) -> SignalPair:
    """Canonical representative: ||x||_2 = 1 with the inverse scale on y."""
    a = float(np.linalg.norm(pair.x))
    return SignalPair(pair.x / a, pair.y * a)


def noncollinear(a, b, tol: float = NONCOLLINEAR_TOL) -> bool:
    s = np.linalg.svd(np.vstack([a, b]), compute_uv=False)
    return bool(s[0] > 0.0 and s[1] > tol * s[0])


def _self_check(inst: AdversarialInstance, membership_tol: float) -> None:
    z1, z2 = inst.pair1.convolved(), inst.pair2.convolved()
    resid = float(np.max(np.abs(z1 - z2))) / float(np.max(np.abs(z1)))
    if resid > SELF_CHECK_TOL:
        raise InternalConsistencyError(f"convolution residual {resid:.3e}")
    for w, spec, name in ((inst.pair1.x, inst.cone1, "x"),
                          (inst.pair1.y, inst.cone2, "y"),
                          (inst.pair2.x, inst.cone1, "x'"),
                          (inst.pair2.y, inst.cone2, "y'")):
        if not cn.member(w, spec, membership_tol):
            raise InternalConsistencyError(f"{name} escaped its cone {spec}")
    if not noncollinear(inst.pair1.x, inst.pair2.x):
        raise InternalConsistencyError("certificate x' is collinear with x")


# ---------------------------------------------------------------------------
# generators

def gen_sparse_instance(lam1, lam2, m: int, n: int, seed) -> AdversarialInstance:
    """Witness over a product of two zero-pattern cones.

    Requires m, n >= 5 and nonempty index sets inside {3, ..., m-2} and
    {3, ..., n-2}.  u and v are drawn zero on the index sets and their
    shifts, which makes all four generated vectors vanish on the requested
    patterns.  Claimed ambiguity dimension: m + n - 1 - p1 - p2.
    """
    lam1, lam2 = cn.as_index_set(lam1), cn.as_index_set(lam2)
    if m < 5 or n < 5:
        raise ValueError("gen_sparse_instance requires m, n >= 5")
    cn._require_subset(lam1, 3, m - 2, "lam1")
    cn._require_subset(lam2, 3, n - 2, "lam2")
    rng = np.random.default_rng(seed)

    u = cn.sample(cn.zero(set(lam1) | set(cn.shift_minus_one(lam1)), m - 1), rng)
    v = cn.sample(cn.zero(set(lam2) | set(cn.shift_minus_one(lam2)), n - 1), rng)
    theta, phi = _sample_angle_pair(rng)

    p1, p2 = cn.p_of(lam1), cn.p_of(lam2)
    inst = AdversarialInstance(
        pair1=_normalize(build_pair_from_params(u, v, theta, phi)),
        pair2=_normalize(certificate_from_params(u, v, theta, phi)),
        u=u, v=v, theta=theta, phi=phi,
        cone1=cn.zero(lam1, m), cone2=cn.zero(lam2, n),
        claimed_dim=m + n - 1 - p1 - p2,
    )
    _self_check(inst, cn.DEFAULT_TOL)
    return inst


def gen_mixed_instance(lam, m: int, y, seed) -> AdversarialInstance:
    """Witness with a zero-pattern left factor and a *given* right factor.

    The supplied y (even length >= 4, nonzero endpoints) is decomposed into
    its finite set of shift-rotation elements; an element whose angle stays
    clear of the excluded set is selected (best-conditioned first) and its
    factor becomes v.  The emitted instance keeps y verbatim in pair1 -- the
    canonical scaling is applied to u instead of to the pair.  Claimed
    ambiguity dimension: m + n - p - 1.

    Raises NoCertificateFoundError when every decomposition element is
    inadmissible (a measure-zero event for generic y); y is never resampled.
    """
    lam = cn.as_index_set(lam)
    y = np.asarray(y, dtype=float)
    n = y.size
    if m < 5:
        raise ValueError("gen_mixed_instance requires m >= 5")
    if n < 4 or n % 2 != 0:
        raise ValueError("gen_mixed_instance requires even n >= 4")
    cn._require_subset(lam, 3, m - 2, "lam")
    if y[0] == 0.0 or y[-1] == 0.0:
        raise ValueError("y has a pathological zero endpoint")
    rng = np.random.default_rng(seed)

    elements = decompose(y)
    y_scale = float(np.max(np.abs(y)))
    admissible = []
    for el in elements:
        gap = _circ_dist(el.gamma, 0.0, math.pi / 2.0)
        if gap <= ANGLE_MARGIN:
            continue
        recon = float(np.max(np.abs(reconstruct(el.w_star, el.gamma) - y)))
        if recon > 1e-11 * y_scale:
            continue
        admissible.append((gap, recon, el))
    if not admissible:
        diag = ", ".join(f"gamma={el.gamma:.6f} |cos|={abs(math.cos(el.gamma)):.2e} "
                         f"|sin|={abs(math.sin(el.gamma)):.2e}" for el in elements)
        raise NoCertificateFoundError(
            f"no admissible decomposition angle for y (candidates: {diag or 'none'})")
    admissible.sort(key=lambda t: (-t[0], t[1]))
    _, _, chosen = admissible[0]
    # the decomposition is in head/tail form; the generative y-formula
    # realizes the same vector with v = w* and the angle advanced by pi
    v, phi = chosen.w_star, (chosen.gamma + math.pi) % (2.0 * math.pi)

    theta = sample_angle(rng, (0.0, math.pi / 2.0, phi))
    u = cn.sample(cn.zero(set(lam) | set(cn.shift_minus_one(lam)), m - 1), rng)
    # scale u so that ||x||_2 = 1 while y stays bit-exact
    x_raw = build_pair_from_params(u, v, theta, phi).x
    u = u / float(np.linalg.norm(x_raw))

    pair1 = build_pair_from_params(u, v, theta, phi)
    pair1 = SignalPair(pair1.x, y.copy())  # y verbatim, not the reconstruction
    inst = AdversarialInstance(
        pair1=pair1,
        pair2=_normalize(certificate_from_params(u, v, theta, phi)),
        u=u, v=v, theta=theta, phi=phi,
        cone1=cn.zero(lam, m), cone2=cn.unconstrained(n),
        claimed_dim=m + n - cn.p_of(lam) - 1,
    )
    _self_check(inst, cn.DEFAULT_TOL)
    return inst


def _coded_scalars_x(c1: float, c2: float, theta: float, phi: float) -> tuple[float, float]:
    """Subspace coefficients (alpha, beta) for u(L) and u(L-1) on the x side."""
    den = math.sin(phi - theta)
    return ((c1 * math.sin(phi) - c2 * math.sin(theta)) / den,
            (c1 * math.cos(phi) - c2 * math.cos(theta)) / den)


def _coded_scalars_y(c1: float, c2: float, theta: float, phi: float) -> tuple[float, float]:
    """Subspace coefficients (alpha, beta) for v(L) and v(L-1) on the y side."""
    den = math.sin(phi - theta)
    return ((c1 * math.sin(theta) - c2 * math.sin(phi)) / den,
            (c1 * math.cos(theta) - c2 * math.cos(phi)) / den)


def _assemble_coded_factor(dim: int, lam: tuple[int, ...], b: np.ndarray,
                           alpha: float, beta: float, rng) -> np.ndarray:
    """Fill u in R^dim with u(L) = alpha*b, u(L-1) = beta*b, free entries random.

    Overlapping indices are written by the L route; the L-1 route must agree
    there (exactly for exact codes), and the residual is checked by the
    caller.  Raises when a forced endpoint is structurally zero.
    """
    u = rng.standard_normal(dim)
    lam0 = np.asarray(lam, dtype=int) - 1          # positions of L in u
    shift0 = lam0 - 1                              # positions of L - 1 in u
    u[shift0] = beta * b
    u[lam0] = alpha * b
    constrained = set(lam0) | set(shift0)
    for pos in (0, dim - 1):
        if pos in constrained:
            continue
        while abs(u[pos]) < SCALAR_MARGIN:
            u[pos] = rng.standard_normal()
    for pos in (0, dim - 1):
        if pos in constrained and u[pos] == 0.0:
            raise InfeasibleSpecError(
                "coded constraint forces a zero endpoint of the factor")
    return u


def _gen_coded_side(which: str, lam, b, signal_dim: int, ptype: cn.PairType,
                    theta: float, phi: float, rng, tol: float):
    """Consistent factor + membership scalars for one coded/zero side.

    Returns (factor, c1, c2) where the scalars are None for type-0 sides.
    """
    scal = _coded_scalars_x if which == "x" else _coded_scalars_y
    dim = signal_dim - 1
    lam = cn.as_index_set(lam)

    if ptype.label == "type0":
        factor = cn.sample(cn.zero(set(lam) | set(cn.shift_minus_one(lam)), dim), rng)
        return factor, None, None

    b = np.asarray(b, dtype=float)
    if ptype.label == "type2":
        for _ in range(1000):
            c1, c2 = (float(t) for t in rng.standard_normal(2))
            alpha, beta = scal(c1, c2, theta, phi)
            if min(abs(c1), abs(c2), abs(alpha), abs(beta)) < SCALAR_MARGIN:
                continue
            factor = _assemble_coded_factor(dim, lam, b, alpha, beta, rng)
            if abs(factor[0]) > tol and abs(factor[-1]) > tol:
                return factor, c1, c2
        raise InfeasibleSpecError(f"no admissible scalars for the {which} side")

    # type 1: the scalar ratio is pinned by the overlap consistency
    r = ptype.r
    B = cn.angle_of_ratio(r)
    ratio = (math.sin(phi - B) / math.sin(theta - B) if which == "x"
             else math.sin(theta - B) / math.sin(phi - B))
    stars = ptype.lam_star or cn.overlap_positions(lam)
    pos = np.asarray(stars, dtype=int) - 1
    for _ in range(1000):
        c1 = float(rng.standard_normal())
        c2 = c1 * ratio
        alpha, beta = scal(c1, c2, theta, phi)
        if min(abs(c1), abs(c2), abs(alpha), abs(beta)) < SCALAR_MARGIN:
            continue
        overlap_resid = float(np.max(np.abs(alpha * b[pos] - beta * b[pos + 1])))
        scale = max(abs(alpha), abs(beta)) * float(np.max(np.abs(b)))
        if overlap_resid > tol * scale:
            raise InternalConsistencyError(
                f"type-1 overlap assignments disagree by {overlap_resid:.3e} "
                f"(code not exactly collinear at tolerance {tol:g})")
        factor = _assemble_coded_factor(dim, lam, b, alpha, beta, rng)
        if abs(factor[0]) > tol and abs(factor[-1]) > tol:
            return factor, c1, c2
    raise InfeasibleSpecError(f"no admissible scalars for the {which} side")


def gen_coded_instance(lam1, b, lam2, bp, m: int, n: int, seed,
                       tol: float = cn.DEFAULT_TOL) -> AdversarialInstance:
    """Witness over a product of subspace-coded cones.

    Both (index set, code) pairs must classify as type 0, 1, or 2 at the
    given tolerance; unclassified pairs are rejected.  Type-0 sides reduce
    to the zero-pattern construction; type-2 sides carry two free membership
    scalars; type-1 sides one, with the second pinned by the overlap
    consistency ratio.  Claimed ambiguity dimension:
    m + n - 1 - p - p' + t + t'.
    """
    lam1, lam2 = cn.as_index_set(lam1), cn.as_index_set(lam2)
    if m < 3 or n < 3:
        raise ValueError("gen_coded_instance requires m, n >= 3")
    cn._require_subset(lam1, 2, m - 1, "lam1")
    cn._require_subset(lam2, 2, n - 1, "lam2")
    t1 = cn.classify_pair(lam1, b, m, tol)
    t2 = cn.classify_pair(lam2, bp, n, tol)
    if t1.t is None or t2.t is None:
        raise UnsupportedPairTypeError(
            f"pair types ({t1.label}, {t2.label}) are not generatable")
    rng = np.random.default_rng(seed)

    extra = tuple(cn.angle_of_ratio(t.r) for t in (t1, t2) if t.label == "type1")
    theta, phi = _sample_angle_pair(rng, extra)

    u, c1, c2 = _gen_coded_side("x", lam1, b, m, t1, theta, phi, rng, tol)
    v, c1p, c2p = _gen_coded_side("y", lam2, bp, n, t2, theta, phi, rng, tol)

    pair1 = build_pair_from_params(u, v, theta, phi)
    pair2 = certificate_from_params(u, v, theta, phi)
    a1 = float(np.linalg.norm(pair1.x))
    a2 = float(np.linalg.norm(pair2.x))
    inst = AdversarialInstance(
        pair1=_normalize(pair1), pair2=_normalize(pair2),
        u=u, v=v, theta=theta, phi=phi,
        cone1=cn.coded(lam1, b, m) if t1.label != "type0" else cn.zero(lam1, m),
        cone2=cn.coded(lam2, bp, n) if t2.label != "type0" else cn.zero(lam2, n),
        claimed_dim=m + n - 1 - cn.p_of(lam1) - cn.p_of(lam2) + t1.t + t2.t,
        c1=None if c1 is None else c1 / a1,
        c2=None if c2 is None else c2 / a2,
        c1p=None if c1p is None else c1p * a1,
        c2p=None if c2p is None else c2p * a2,
    )
    _check_code_scalars(inst, tol)
    _self_check(inst, max(tol, cn.DEFAULT_TOL))
    return inst


def _check_code_scalars(inst: AdversarialInstance, tol: float) -> None:
    """Verify the stored membership scalars against the emitted vectors."""
    checks = [(inst.pair1.x, inst.cone1, inst.c1), (inst.pair2.x, inst.cone1, inst.c2),
              (inst.pair1.y, inst.cone2, inst.c1p), (inst.pair2.y, inst.cone2, inst.c2p)]
    for w, spec, c in checks:
        if spec.kind != "coded" or c is None:
            continue
        idx = np.asarray(spec.lam, dtype=int) - 1
        resid = float(np.max(np.abs(np.asarray(w)[idx] - c * spec.b_array)))
        bound = tol * (1.0 + abs(c) * float(np.max(np.abs(spec.b_array))))
        if resid > bound:
            raise InternalConsistencyError(
                f"membership scalar check failed: residual {resid:.3e} > {bound:.3e}")
