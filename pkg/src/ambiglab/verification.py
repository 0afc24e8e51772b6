"""Independent auditing of witnesses and numerical ambiguity-dimension probes.

``verify_instance`` re-derives every certified property of an instance from
the emitted vectors alone (never trusting the generator's bookkeeping).
``AmbiguityFamily`` describes one parametric family of witnesses; its
generic dimension is measured as the rank of a central-difference Jacobian
of the parameters-to-pair map at random admissible points, majority-voted
across trials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import cones as cn
from .convolution import convolve, pad_head, pad_tail
from .errors import (IllConditionedPointError, InconclusiveProbeError)
from .generators import (SCALAR_MARGIN, AdversarialInstance,
                         angle_admissible, noncollinear, sample_angle)

DEFAULT_VERIFY_TOL = 1e-10
DEFAULT_MEMBERSHIP_TOL = cn.DEFAULT_TOL
DEFAULT_FD_STEP = 1e-5
DEFAULT_SVD_TOL = 1e-6


# ---------------------------------------------------------------------------
# instance auditing

@dataclass
class VerificationReport:
    """Per-instance audit results; ``passed`` aggregates every check."""

    conv_residual: float
    membership: tuple[bool, bool, bool, bool]
    noncollinear: bool
    pathology_free: bool
    equivalent_pairs: bool
    passed: bool

    def to_json(self) -> dict:
        return {
            "conv_residual": float(self.conv_residual),
            "membership": [bool(f) for f in self.membership],
            "noncollinear": bool(self.noncollinear),
            "pathology_free": bool(self.pathology_free),
            "equivalent_pairs": bool(self.equivalent_pairs),
            "pass": bool(self.passed),
        }


def check_pathology(x, y, tol: float = DEFAULT_MEMBERSHIP_TOL) -> bool:
    """True iff all four endpoint magnitudes strictly exceed tol."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return bool(min(abs(x[0]), abs(x[-1]), abs(y[0]), abs(y[-1])) > tol)


def scaling_equivalent(pair1, pair2, tol: float = DEFAULT_VERIFY_TOL) -> bool:
    """Whether pair2 == (a*x, y/a) for a common nonzero scalar a.

    The scalar is estimated by least squares on the larger-magnitude side
    and cross-checked on both sides.
    """
    x, y = np.asarray(pair1.x, float), np.asarray(pair1.y, float)
    xp, yp = np.asarray(pair2.x, float), np.asarray(pair2.y, float)
    if x.size != xp.size or y.size != yp.size:
        return False
    if np.linalg.norm(x) >= np.linalg.norm(y):
        denom = float(x @ x)
        if denom == 0.0:
            return False
        a = float(xp @ x) / denom
    else:
        denom = float(yp @ yp)
        if denom == 0.0:
            return False
        a = float(yp @ y) / denom  # y' ~ y/a  =>  a ~ <y, y'>/<y', y'>
    if a == 0.0 or not math.isfinite(a):
        return False
    rx = float(np.max(np.abs(xp - a * x))) / max(float(np.max(np.abs(xp))), 1e-300)
    ry = float(np.max(np.abs(yp - y / a))) / max(float(np.max(np.abs(yp))), 1e-300)
    return rx <= tol and ry <= tol


def verify_instance(inst: AdversarialInstance,
                    tol: float = DEFAULT_VERIFY_TOL,
                    membership_tol: float = DEFAULT_MEMBERSHIP_TOL) -> VerificationReport:
    """Audit a witness: equal convolutions, cone membership, inequivalence.

    All failures land in the report; nothing raises.  ``passed`` requires the
    relative convolution residual below tol, all four membership flags, a
    non-collinear certificate, pathology-free endpoints, and the two pairs
    NOT being scalar-equivalent.
    """
    z1 = convolve(inst.pair1.x, inst.pair1.y)
    z2 = convolve(inst.pair2.x, inst.pair2.y)
    scale = max(float(np.max(np.abs(z1))), 1e-300)
    conv_residual = float(np.max(np.abs(z1 - z2))) / scale

    membership = (
        cn.member(inst.pair1.x, inst.cone1, membership_tol),
        cn.member(inst.pair1.y, inst.cone2, membership_tol),
        cn.member(inst.pair2.x, inst.cone1, membership_tol),
        cn.member(inst.pair2.y, inst.cone2, membership_tol),
    )
    noncol = noncollinear(inst.pair1.x, inst.pair2.x)
    pathology_free = (check_pathology(inst.pair1.x, inst.pair1.y, membership_tol)
                      and check_pathology(inst.pair2.x, inst.pair2.y, membership_tol))
    equivalent = scaling_equivalent(inst.pair1, inst.pair2, max(tol, 1e-8))

    passed = (conv_residual <= tol and all(membership) and noncol
              and pathology_free and not equivalent)
    return VerificationReport(conv_residual, membership, noncol,
                              pathology_free, equivalent, passed)


# ---------------------------------------------------------------------------
# parametric families and dimension probing

@dataclass(frozen=True)
class _Side:
    """Constraint layout for one factor u in R^{dim} of a family."""

    dim: int                      # parameter-space length (signal length - 1)
    kind: str                     # unconstrained | zero | coded1 | coded2
    free_idx: tuple[int, ...]     # 0-based free positions in u
    lam_idx: tuple[int, ...] = ()      # 0-based positions of L
    shift_idx: tuple[int, ...] = ()    # 0-based positions of L - 1
    b: tuple[float, ...] = ()
    r: float = 0.0

    @property
    def n_scales(self) -> int:
        return {"unconstrained": 0, "zero": 0, "coded1": 1, "coded2": 2}[self.kind]

    @property
    def dof(self) -> int:
        return len(self.free_idx) + self.n_scales

    def build(self, params: np.ndarray) -> np.ndarray:
        u = np.zeros(self.dim)
        nf = len(self.free_idx)
        if nf:
            u[list(self.free_idx)] = params[:nf]
        b = np.asarray(self.b, dtype=float)
        if self.kind == "coded2":
            alpha, beta = params[nf], params[nf + 1]
            u[list(self.shift_idx)] = beta * b
            u[list(self.lam_idx)] = alpha * b
        elif self.kind == "coded1":
            s = params[nf]
            u[list(self.shift_idx)] = s * b
            u[list(self.lam_idx)] = (self.r * s) * b
        return u

    def sample_params(self, rng) -> np.ndarray:
        out = rng.standard_normal(self.dof)
        for k in range(len(self.free_idx), self.dof):
            while abs(out[k]) < SCALAR_MARGIN:
                out[k] = rng.standard_normal()
        # keep free endpoints of u away from zero
        for pos in (0, self.dim - 1):
            if pos in self.free_idx:
                k = self.free_idx.index(pos)
                while abs(out[k]) < SCALAR_MARGIN:
                    out[k] = rng.standard_normal()
        return out


def _side_from_cone(spec: cn.ConeSpec, class_tol: float) -> tuple[_Side, int]:
    """Derive the parameter layout and type contribution t of one side."""
    dim = spec.d - 1
    every = tuple(range(dim))
    if spec.kind == "unconstrained":
        return _Side(dim, "unconstrained", every), 0
    lam0 = tuple(j - 1 for j in spec.lam)      # positions of L within the factor
    shift0 = tuple(j - 2 for j in spec.lam)    # positions of L - 1
    constrained = sorted(set(lam0) | set(shift0))
    if constrained[0] < 0 or constrained[-1] >= dim:
        raise ValueError(f"cone {spec}: index set must lie within {{2,...,d-1}}")
    free = tuple(i for i in every if i not in set(constrained))
    if spec.kind == "zero":
        if 0 in constrained or dim - 1 in constrained:
            raise ValueError(f"cone {spec}: zero pattern forces a factor endpoint")
        return _Side(dim, "zero", free), 0
    ptype = cn.classify_pair(spec.lam, spec.b, spec.d, class_tol)
    if ptype.label == "type0":
        return _Side(dim, "zero", free), 0
    if ptype.label == "type2":
        return _Side(dim, "coded2", free, lam0, shift0, spec.b), 2
    if ptype.label == "type1":
        return _Side(dim, "coded1", free, lam0, shift0, spec.b, ptype.r), 1
    raise ValueError(f"cone {spec} has an unclassified (index set, code) pair")


class AmbiguityFamily:
    """Parametric family of unidentifiable pairs over a cone product.

    Parameters are packed as [x-side free entries and scales, y-side free
    entries and scales, theta, phi]; the map sends them to the concatenated
    pair (x, y) in R^{m+n}.  The generic rank of its Jacobian is the
    pre-quotient ambiguity dimension; one is subtracted for the scaling
    direction to compare against the claimed dimension.
    """

    def __init__(self, cone1: cn.ConeSpec, cone2: cn.ConeSpec,
                 class_tol: float = cn.DEFAULT_TOL):
        self.cone1, self.cone2 = cone1, cone2
        self.side1, self.t1 = _side_from_cone(cone1, class_tol)
        self.side2, self.t2 = _side_from_cone(cone2, class_tol)
        self.m, self.n = cone1.d, cone2.d
        excluded = [0.0, math.pi / 2.0]
        for side in (self.side1, self.side2):
            if side.kind == "coded1":
                excluded.append(cn.angle_of_ratio(side.r))
        self.excluded_angles = tuple(excluded)
        # claims are exact for zero/unconstrained products, lower bounds
        # once a coded side contributes extra scale freedom
        self.exact_claim = all(s.kind in ("unconstrained", "zero")
                               for s in (self.side1, self.side2))

    @property
    def n_params(self) -> int:
        return self.side1.dof + self.side2.dof + 2

    @property
    def expected_pre_rank(self) -> int:
        return self.side1.dof + self.side2.dof + 2

    @property
    def claimed_dim(self) -> int:
        return self.expected_pre_rank - 1

    def split(self, params: np.ndarray):
        k1 = self.side1.dof
        k2 = k1 + self.side2.dof
        return params[:k1], params[k1:k2], params[k2], params[k2 + 1]

    def map(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.size != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {params.size}")
        p1, p2, theta, phi = self.split(params)
        u = self.side1.build(p1)
        v = self.side2.build(p2)
        x = math.cos(theta) * pad_tail(u) - math.sin(theta) * pad_head(u)
        y = math.sin(phi) * pad_head(v) - math.cos(phi) * pad_tail(v)
        return np.concatenate([x, y])

    def angles_admissible(self, theta: float, phi: float, margin: float) -> bool:
        return (angle_admissible(theta, self.excluded_angles, margin)
                and angle_admissible(phi, self.excluded_angles + (theta,), margin))

    def sample_point(self, rng) -> np.ndarray:
        rng = np.random.default_rng(rng)
        p1 = self.side1.sample_params(rng)
        p2 = self.side2.sample_params(rng)
        theta = sample_angle(rng, self.excluded_angles)
        phi = sample_angle(rng, self.excluded_angles + (theta,))
        return np.concatenate([p1, p2, [theta, phi]])


def jacobian_rank(family: AmbiguityFamily, point,
                  fd_step: float = DEFAULT_FD_STEP,
                  svd_tol: float = DEFAULT_SVD_TOL) -> int:
    """Numerical rank of the central-difference Jacobian of the family map.

    Raises IllConditionedPointError when the angle coordinates sit closer to
    the excluded set than the probe can tolerate.
    """
    point = np.asarray(point, dtype=float)
    _, _, theta, phi = family.split(point)
    if not family.angles_admissible(theta, phi, max(10.0 * fd_step, 1e-4)):
        raise IllConditionedPointError(
            f"angles ({theta:.6f}, {phi:.6f}) too close to the excluded set")
    cols = []
    for i in range(point.size):
        dp = np.zeros_like(point)
        dp[i] = 0.5 * fd_step
        cols.append((family.map(point + dp) - family.map(point - dp)) / fd_step)
    J = np.column_stack(cols)
    s = np.linalg.svd(J, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > svd_tol * s[0]))


@dataclass
class DimProbeResult:
    """Majority-vote dimension measurement for one family."""

    claimed: int
    measured_pre_quotient: int
    measured_post_quotient: int
    samples: int
    agreement: bool

    def to_json(self) -> dict:
        return {
            "claimed": self.claimed,
            "measured_pre_quotient": self.measured_pre_quotient,
            "measured_post_quotient": self.measured_post_quotient,
            "samples": self.samples,
            "agreement": self.agreement,
        }


def estimate_unidentifiable_dim(family: AmbiguityFamily, trials: int, seed,
                                fd_step: float = DEFAULT_FD_STEP,
                                svd_tol: float = DEFAULT_SVD_TOL) -> DimProbeResult:
    """Probe the family dimension at ``trials`` random admissible points.

    The pre-quotient rank is the majority vote; the post-quotient dimension
    is one less (the scaling direction always lies in the tangent space).
    Agreement means equality with the claim for exact families and
    measured >= claimed where the claim is a lower bound.  Raises
    InconclusiveProbeError on a tie or when more than half the points were
    ill-conditioned.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    ranks = []
    ill = 0
    for _ in range(trials):
        point = family.sample_point(rng)
        try:
            ranks.append(jacobian_rank(family, point, fd_step, svd_tol))
        except IllConditionedPointError:
            ill += 1
    if ill * 2 > trials:
        raise InconclusiveProbeError(
            f"{ill}/{trials} probe points were ill-conditioned")
    values, counts = np.unique(ranks, return_counts=True)
    order = np.argsort(counts)
    if len(values) > 1 and counts[order[-1]] == counts[order[-2]]:
        raise InconclusiveProbeError(f"tied majority among ranks {values.tolist()}")
    pre = int(values[order[-1]])
    post = pre - 1
    claimed = family.claimed_dim
    agreement = (post == claimed) if family.exact_claim else (post >= claimed)
    return DimProbeResult(claimed, pre, post, len(ranks), agreement)
