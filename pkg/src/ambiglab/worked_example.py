"""Fixed reference data for the demo: integer seed pairs and showcase cones.

The seed pairs are small 0/1 vectors whose convolutions coincide while the
left factors are non-collinear, making them the canonical hand-checkable
witness.  Everything here is deterministic so demo output is byte-stable.
"""

from __future__ import annotations

import numpy as np

from . import cones as cn
from .generators import SignalPair

# the two seed pairs sharing one convolution (m = 11, n = 7)
X1 = np.array([1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1], dtype=np.int64)
Y1 = np.array([1, 0, 0, 0, 1, 0, 0], dtype=np.int64)
X2 = np.array([1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0], dtype=np.int64)
Y2 = np.array([1, 0, 1, 0, 1, 0, 1], dtype=np.int64)

# both seed left factors vanish on this pattern
SEED_ZERO_SET = (4, 5, 6, 7, 8)
SEED_DIM = 11


def seed_pairs() -> tuple[SignalPair, SignalPair]:
    return SignalPair(X1.copy(), Y1.copy()), SignalPair(X2.copy(), Y2.copy())


def seed_cone() -> cn.ConeSpec:
    return cn.zero(SEED_ZERO_SET, SEED_DIM)


# showcase coded cone: d = 14, six coded indices, near-geometric code
SHOWCASE_ZERO_SET = (3, 4, 7, 8, 9, 12)
SHOWCASE_DIM = 14
SHOWCASE_CODE = (0.5, 0.835, -0.3, -0.5, -0.835, -0.15)
SHOWCASE_SCALAR = -1.0
# the showcase code is only approximately collinear on its overlap
# (second-singular-value ratio ~3e-4), so classify it at this tolerance
SHOWCASE_CLASS_TOL = 1e-2

# fixed heights for the unconstrained positions of the showcase vectors
_FREE_HEIGHTS = {1: 1.0, 2: -0.7, 5: 0.45, 6: -1.1,
                 10: 0.62, 11: -0.31, 13: 0.8, 14: -0.9}


def showcase_zero_vector() -> np.ndarray:
    """A member of the zero-pattern cone on the showcase index set."""
    s = np.zeros(SHOWCASE_DIM)
    for pos, val in _FREE_HEIGHTS.items():
        s[pos - 1] = val
    return s


def showcase_coded_vector() -> np.ndarray:
    """A member of the showcase coded cone with membership scalar -1."""
    s = showcase_zero_vector()
    for pos, val in zip(SHOWCASE_ZERO_SET, SHOWCASE_CODE):
        s[pos - 1] = SHOWCASE_SCALAR * val
    return s


def showcase_cone() -> cn.ConeSpec:
    return cn.coded(SHOWCASE_ZERO_SET, SHOWCASE_CODE, SHOWCASE_DIM)
