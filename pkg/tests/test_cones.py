import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ambiglab import cones as cn
from ambiglab import worked_example as wx
from ambiglab.errors import InfeasibleSpecError


# ---------------------------------------------------------------------------
# index-set algebra

def test_shift_minus_one():
    assert cn.shift_minus_one((4, 5, 6, 7, 8)) == (3, 4, 5, 6, 7)
    assert cn.shift_minus_one((3, 4, 7, 8, 9, 12)) == (2, 3, 6, 7, 8, 11)
    assert cn.shift_minus_one(()) == ()


def test_p_of():
    assert cn.p_of((4, 5, 6, 7, 8)) == 6
    assert cn.p_of((3, 4, 7, 8, 9, 12)) == 9  # union enumerated by hand
    assert cn.p_of(()) == 0


@given(st.sets(st.integers(2, 30), min_size=1, max_size=10))
@settings(max_examples=100, deadline=None)
def test_p_of_bounds(lam):
    lam = tuple(sorted(lam))
    p = cn.p_of(lam)
    assert len(lam) <= p <= 2 * len(lam)
    isolated = all(j + 1 not in set(lam) for j in lam)
    assert (p == 2 * len(lam)) == isolated


# ---------------------------------------------------------------------------
# cone spec construction and normalization

def test_coded_zero_code_collapses_to_zero_kind():
    spec = cn.coded((2, 4), (0.0, 0.0), 6)
    assert spec.kind == "zero"
    assert spec.b is None


def test_empty_index_set_collapses_to_unconstrained():
    assert cn.zero((), 5).kind == "unconstrained"


def test_repetition_flag():
    assert cn.coded((2, 3), (2.0, 2.0), 5).is_repetition
    assert not cn.coded((2, 3), (1.0, 2.0), 5).is_repetition


def test_spec_validation():
    with pytest.raises(ValueError):
        cn.zero((7,), 6)
    with pytest.raises(ValueError):
        cn.coded((2, 3), (1.0,), 6)
    with pytest.raises(ValueError):
        cn.ConeSpec("weird", 4)


def test_spec_json_round_trip():
    for spec in (cn.unconstrained(7), cn.zero((3, 4), 9),
                 cn.coded((2, 5), (1.0, -0.25), 6)):
        assert cn.ConeSpec.from_json(spec.to_json()) == spec


# ---------------------------------------------------------------------------
# membership

def test_member_zero_cone_reference_vector():
    x1 = np.array([1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1], dtype=float)
    assert cn.member(x1, cn.zero((4, 5, 6, 7, 8), 11))


def test_member_showcase_coded_vector():
    s = wx.showcase_coded_vector()
    assert cn.member(s, wx.showcase_cone())
    assert cn.code_scalar(s, wx.showcase_cone()) == pytest.approx(-1.0)


def test_member_pathological_endpoint_fails_everywhere():
    w = np.array([0.0, 1.0, 2.0, 3.0])
    for spec in (cn.unconstrained(4), cn.zero((2,), 4), cn.coded((2,), (1.0,), 4)):
        assert not cn.member(w, spec)


def test_member_shape_mismatch():
    with pytest.raises(ValueError):
        cn.member(np.ones(3), cn.unconstrained(4))


def test_member_coded_requires_nonzero_scalar():
    spec = cn.coded((2, 3), (1.0, 2.0), 5)
    w = np.array([1.0, 0.0, 0.0, 0.5, 1.0])
    assert not cn.member(w, spec)  # c = 0 on the coded block


def test_coded_zero_code_membership_equals_zero_cone():
    rng = np.random.default_rng(5)
    z = cn.zero((3, 5), 8)
    c = cn.coded((3, 5), (0.0, 0.0), 8)  # normalized to the same spec
    for _ in range(50):
        w = rng.standard_normal(8)
        if rng.random() < 0.5:
            w[[2, 4]] = 0.0
        assert cn.member(w, z) == cn.member(w, c)


@pytest.mark.parametrize("code", [(1.0, 1.0, 1.0), (2.5, 2.5, 2.5)])
def test_repetition_membership_matches_direct_definition(code):
    # any code collinear with all-ones admits the same members: w(L)
    # constant and nonzero
    rng = np.random.default_rng(11)
    lam = (2, 4, 5)
    spec = cn.coded(lam, code, 7)
    idx = np.array(lam) - 1
    for _ in range(200):
        w = rng.standard_normal(7)
        if rng.random() < 0.5:
            w[idx] = rng.standard_normal() * np.ones(3)
        direct = (abs(w[0]) > 1e-9 and abs(w[-1]) > 1e-9
                  and np.ptp(w[idx]) <= 1e-9 and abs(w[idx][0]) > 1e-9)
        assert cn.member(w, spec) == direct


# ---------------------------------------------------------------------------
# sampling

@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_sample_member_round_trip(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(4, 12))
    kind = int(rng.integers(3))
    if kind == 0:
        spec = cn.unconstrained(d)
    elif kind == 1:
        k = int(rng.integers(1, d - 1))
        spec = cn.zero(rng.choice(np.arange(2, d), size=k, replace=False), d)
    else:
        k = int(rng.integers(1, d - 1))
        lam = rng.choice(np.arange(2, d), size=k, replace=False)
        b = rng.standard_normal(k)
        while np.max(np.abs(b)) < 0.1:
            b = rng.standard_normal(k)
        spec = cn.coded(lam, b, d)
    w = cn.sample(spec, seed)
    assert cn.member(w, spec)


def test_sample_zero_entries_and_determinism():
    spec = cn.zero((3,), 5)
    w = cn.sample(spec, 42)
    assert w[2] == 0.0 and abs(w[0]) > 0 and abs(w[4]) > 0
    assert np.array_equal(w, cn.sample(spec, 42))


def test_sample_accepts_generator_stream():
    # a shared stream advances; reseeding reproduces the whole sequence
    spec = cn.unconstrained(6)
    rng = np.random.default_rng(7)
    a, b = cn.sample(spec, rng), cn.sample(spec, rng)
    assert not np.array_equal(a, b)
    rng = np.random.default_rng(7)
    assert np.array_equal(a, cn.sample(spec, rng))
    assert np.array_equal(b, cn.sample(spec, rng))


def test_sample_repetition_constant_on_set():
    spec = cn.coded((2, 3, 4), (1.0, 1.0, 1.0), 6)
    w = cn.sample(spec, 3)
    assert w[1] == w[2] == w[3] != 0.0


def test_sample_infeasible_specs():
    with pytest.raises(InfeasibleSpecError):
        cn.sample(cn.zero((1, 3), 5), 0)
    with pytest.raises(InfeasibleSpecError):
        cn.sample(cn.coded((1, 3), (0.0, 1.0), 5), 0)


# ---------------------------------------------------------------------------
# classification

def test_classify_showcase_pair():
    ptype = cn.classify_pair(wx.SHOWCASE_ZERO_SET, wx.SHOWCASE_CODE,
                             wx.SHOWCASE_DIM, tol=wx.SHOWCASE_CLASS_TOL)
    assert ptype.label == "type1"
    assert ptype.lam_star == (1, 3, 4)
    assert ptype.r == pytest.approx(1.67, abs=5e-3)


def test_classify_type0():
    ptype = cn.classify_pair((4, 5, 6, 7, 8), np.zeros(5), 11)
    assert ptype.label == "type0" and ptype.t == 0


def test_classify_type2_isolated():
    # {3,5,7} and its shift {2,4,6} are disjoint
    assert cn.classify_pair((3, 5, 7), (1.0, 2.0, 3.0), 10).label == "type2"


def test_classify_singleton_coded_is_type2():
    assert cn.classify_pair((4,), (1.0,), 8).label == "type2"


def test_classify_repetition_branch():
    ptype = cn.classify_pair((3, 4), (2.0, 2.0), 7)
    assert ptype.label == "type1" and ptype.lam_star is None and ptype.r == 1.0


def test_classify_unclassified_cases():
    # zero code but the set touches the border allowed for nonzero codes only
    assert cn.classify_pair((2, 3), (0.0, 0.0), 7).label == "unclassified"
    # adjacent indices with non-collinear overlap blocks
    assert cn.classify_pair((3, 4, 5), (1.0, 2.0, 5.0), 9).label == "unclassified"


def test_classify_preconditions():
    with pytest.raises(ValueError):
        cn.classify_pair((), (1.0,), 6)
    with pytest.raises(ValueError):
        cn.classify_pair((1, 2), (1.0, 1.0), 6)
    with pytest.raises(ValueError):
        cn.classify_pair((2,), (1.0, 2.0), 6)


def _reference_label(lam, b, d, tol=1e-9):
    """Independent re-derivation of the category from raw set predicates."""
    lam = tuple(sorted(lam))
    b = np.asarray(b, dtype=float)
    overlap = sorted(set(lam) & {j - 1 for j in lam})
    if np.max(np.abs(b)) <= tol:
        inner = lam[0] >= 3 and lam[-1] <= d - 2 and d >= 5
        return "type0" if inner else "unclassified"
    if not overlap:
        return "type2"
    ones = np.ones_like(b)
    rows = np.vstack([b, ones])
    if np.linalg.svd(rows, compute_uv=False)[1] <= tol * np.linalg.norm(rows, 2):
        return "type1"
    pos = np.array([lam.index(e) for e in overlap])
    bs, bs1 = b[pos], b[pos + 1]
    if min(np.max(np.abs(bs)), np.max(np.abs(bs1))) <= tol * np.max(np.abs(b)):
        return "unclassified"
    stack = np.vstack([bs, bs1])
    sv = np.linalg.svd(stack, compute_uv=False)
    col = sv[-1] <= tol * sv[0] if sv.size > 1 else True
    r = float(bs1 @ bs) / float(bs @ bs)
    return "type1" if (col and abs(r) > tol) else "unclassified"


@given(st.integers(0, 10_000))
@settings(max_examples=150, deadline=None)
def test_classify_matches_reference_predicates(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(5, 14))
    k = int(rng.integers(1, d - 2))
    lam = tuple(sorted(int(j) for j in
                       rng.choice(np.arange(2, d), size=k, replace=False)))
    style = rng.integers(3)
    if style == 0:
        b = np.zeros(k)
    elif style == 1:
        b = np.ones(k) * float(rng.standard_normal())
    else:
        b = rng.standard_normal(k)
    assert cn.classify_pair(lam, b, d).label == _reference_label(lam, b, d)


# ---------------------------------------------------------------------------
# geometric profiles

def test_geometric_profile_values():
    spec = cn.geometric_profile((2, 3, 4), 0.5, 7)
    assert spec.b == (1.0, 0.5, 0.25)
    assert spec.kind == "coded"


def test_geometric_profile_singleton_is_type2_when_isolated():
    spec = cn.geometric_profile((4,), 0.3, 8)
    assert cn.classify_pair(spec.lam, spec.b, 8).label == "type2"


def test_geometric_profile_rejects_bad_input():
    with pytest.raises(ValueError):
        cn.geometric_profile((2, 4), 0.5, 7)  # not contiguous
    with pytest.raises(ValueError):
        cn.geometric_profile((2, 3), 1.0, 7)  # |r| not in (0, 1)
    with pytest.raises(ValueError):
        cn.geometric_profile((2, 3), 0.0, 7)
