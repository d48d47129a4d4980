import itertools

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from opnorm.errors import ModulusMissing, NotMonotone, PointInDomain, PrecheckFailed
from opnorm.extension import (
    ALL,
    STRICT,
    HilbertExtensionState,
    LinearFormExtension,
    PartialFunctional,
    SubadditiveFunctional,
    check_pairwise_inequality,
    extend_complex,
    extend_one_point,
    extend_over_set,
    extend_posneg,
    extend_via_linear,
    extension_constant,
    hilbert_step,
    norm_functional,
)
from opnorm.spaces import FiniteSpace, InnerProductSpace

L1 = norm_functional(FiniteSpace(2, norm_kind="ell1"))
PLANE = PartialFunctional(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([1.0, -1.0]))


def all_pairs_margin(F, p, distinct_only):
    """Oracle: python loop over every pair."""
    worst = np.inf
    n = len(F.values)
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        if distinct_only and i == j:
            continue
        worst = min(worst, float(p(F.points[i] + F.points[j])) - F.values[i] - F.values[j])
    return worst


def test_pairwise_examples():
    v = check_pairwise_inequality(PLANE, L1, STRICT)
    assert v.passes and v.margin == 0.0
    zero = PartialFunctional(np.array([[1.0, 2.0], [0.5, -1.0]]), np.zeros(2))
    assert check_pairwise_inequality(zero, L1, STRICT).margin >= 0
    single = PartialFunctional(np.array([[1.0, 0.0]]), np.array([2.0]))
    v = check_pairwise_inequality(single, L1, ALL)
    assert not v.passes and v.margin == -2.0


def test_one_point_examples():
    out = extend_one_point(PLANE, L1, [0.0, 1.0])
    assert out.values[-1] == 1.0
    assert extension_constant(PLANE, L1, [0.0, 1.0]) == (-1.0, 0)
    origin = PartialFunctional(np.zeros((1, 2)), np.zeros(1))
    out = extend_one_point(origin, L1, [1.0, 0.0], ALL)
    assert out.values[-1] == 1.0
    twice = norm_functional(FiniteSpace(2, norm_kind="ell1"), 2.0)
    out = extend_one_point(PartialFunctional(np.array([[1.0, 0.0]]), np.array([1.0])), twice, [0.0, 1.0])
    assert out.values[-1] == 3.0


def test_one_point_errors():
    with pytest.raises(PointInDomain):
        extend_one_point(PLANE, L1, [1.0, 0.0])
    bad = PartialFunctional(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([5.0, 5.0]))
    with pytest.raises(PrecheckFailed):
        extend_one_point(bad, L1, [2.0, 2.0])


def test_over_set():
    assert extend_over_set(PLANE, L1, []) == PLANE or len(extend_over_set(PLANE, L1, [])) == 2
    F3 = PartialFunctional(np.array([[1.0, 0, 0], [-1.0, 0, 0]]), np.array([1.0, -1.0]))
    p3 = norm_functional(FiniteSpace(3, norm_kind="ell1"))
    out = extend_over_set(F3, p3, [[0, 1.0, 0], [0, 0, 1.0]])
    assert len(out) == 4 and all_pairs_margin(out, p3, True) >= 0


def test_posneg_examples():
    R = FiniteSpace(1, norm_kind="ell1")
    zero = PartialFunctional(np.array([[0.0], [1.0]]), np.zeros(2))
    r = extend_posneg(zero, 1.0, 1.0, [[2.0], [-0.5]], R)
    assert np.all(r.functional.values == 0) and r.holds
    # F(s) = s on {-1, 0, 1} breaks the part hypothesis at the pair (-1, 1): F+(1) + F+(-1) = 1 > 0
    odd = PartialFunctional(np.array([[-1.0], [0.0], [1.0]]), np.array([-1.0, 0.0, 1.0]))
    with pytest.raises(PrecheckFailed, match="positive part"):
        extend_posneg(odd, 1.0, 1.0, [[2.0]], R)
    F = PartialFunctional(np.array([[0.0], [1.0], [2.0]]), np.array([0.0, 1.0, 2.0]))
    targets = [[3.0], [-3.0], [0.5]]
    r = extend_posneg(F, 1.0, 1.0, targets, R)
    assert r.holds
    flipped = extend_posneg(-F, 1.0, 1.0, targets, R)
    assert np.allclose(flipped.functional.values, -r.functional.values)


def test_posneg_pair_bound_needs_nonnegative_parts():
    # the positive part extends below zero at 2.7 and the absolute pair bound breaks
    F = PartialFunctional(np.array([[0.0], [-2.9], [-2.6]]), np.array([0.0, 1.9, 0.6]))
    r = extend_posneg(F, 1.0, 1.0, [[2.7]], FiniteSpace(1, norm_kind="ell1"))
    assert r.plus.values[-1] == pytest.approx(-1.7)
    assert not r.parts_nonnegative
    assert r.pair_margin < 0 and not r.holds
    assert r.point_margin >= 0


def test_posneg_needs_origin():
    F = PartialFunctional(np.array([[1.0]]), np.array([0.5]))
    with pytest.raises(PrecheckFailed):
        extend_posneg(F, 1.0, 1.0, [[2.0]], FiniteSpace(1))


def test_complex_parts():
    zero = PartialFunctional(PLANE.points, np.zeros(2))
    re, im = extend_complex(PLANE, zero, L1, L1, [[0.0, 1.0]])
    assert re.values[-1] == 1.0
    assert np.array_equal(im.values, extend_over_set(zero, L1, [[0.0, 1.0]]).values)
    im_part = PartialFunctional(PLANE.points, np.array([0.5, -0.5]))
    for order in ([[0.0, 1.0], [1.0, 1.0]], [[1.0, 1.0], [0.0, 1.0]]):
        re, im = extend_complex(PLANE, im_part, L1, L1, order)
        assert check_pairwise_inequality(re, L1, STRICT).passes
        assert check_pairwise_inequality(im, L1, STRICT).passes


def test_hilbert_zero_functional_gives_minus_abs_t():
    amb = InnerProductSpace(2)
    p = norm_functional(FiniteSpace(2))
    state = HilbertExtensionState(amb, (0,), lambda v: 0.0)
    t = np.array([-2.0, -0.5, 0.0, 1.0, 3.0])
    new, rep = hilbert_step(state, p, t)
    assert np.allclose(rep.r_values, -np.abs(t))
    assert rep.r_at_zero == 0.0 and rep.holds
    assert new.current == (0, 1)
    assert new.functional(np.array([0.0, 3.0])) == pytest.approx(3.0)


def test_hilbert_linear_stays_lipschitz():
    amb = InnerProductSpace(3)
    p = norm_functional(FiniteSpace(3))
    a = np.array([0.6, -0.3, 0.0])
    state = HilbertExtensionState(amb, (0, 1), lambda v: float(a @ v))
    new, rep = hilbert_step(state, p, np.linspace(-2, 2, 9))
    assert rep.holds and rep.pair_margin >= -1e-12


def test_hilbert_needs_modulus():
    p = SubadditiveFunctional(lambda x: float(np.linalg.norm(x)), sublinear=True)
    state = HilbertExtensionState(InnerProductSpace(2), (0,), lambda v: 0.0)
    with pytest.raises(ModulusMissing):
        hilbert_step(state, p, [0.0, 1.0])


def test_linear_form_examples():
    r = extend_via_linear(LinearFormExtension(np.array([[1.0, 0.0]]), np.array([2.0]), ("power", 2)), InnerProductSpace(2))
    assert r.T_norm == 2.0 and r.pk_norm.value == 4.0 and r.holds
    assert r.operator(np.array([1.0, 0.0]))[0] == 4.0
    zero = extend_via_linear(LinearFormExtension(np.array([[1.0, 0.0]]), np.array([0.0]), ("power", 2)), InnerProductSpace(2))
    assert zero.pk_norm.value == 0.0
    r = extend_via_linear(LinearFormExtension(np.array([[1.0, 0.0, 0.0]]), np.array([1.0])), InnerProductSpace(3))
    assert r.operator(np.array([-0.7, 5.0, 2.0]))[0] == pytest.approx(0.7) and r.pk_norm.value == 1.0


def test_linear_form_rejects_non_monotone_wrapper():
    with pytest.raises(NotMonotone):
        extend_via_linear(LinearFormExtension(np.array([[1.0, 0.0]]), np.array([1.0]), lambda u: np.cos(u)), InnerProductSpace(2))


# -- properties ----------------------------------------------------------------

coords = st.floats(-4, 4).map(lambda v: round(v, 3))
points2 = st.lists(st.tuples(coords, coords), min_size=1, max_size=6, unique=True)


@given(points2, points2, st.lists(st.floats(0.5, 2.0), min_size=2, max_size=2), st.sampled_from([STRICT, ALL]), st.data())
def test_extension_keeps_pairwise_inequality(dom, targets, w, mode, data):
    if mode == ALL and (0.0, 0.0) not in dom:
        dom = dom + [(0.0, 0.0)]
    targets = [t for t in targets if t not in dom]
    assume(targets)
    pts = np.array(dom)
    X = FiniteSpace(2, norm_kind="weighted", weights=tuple(w))
    p = norm_functional(X)
    a = np.array(w) * np.array(data.draw(st.tuples(st.floats(-1, 1), st.floats(-1, 1))))
    slack = np.array(data.draw(st.lists(st.floats(0, 2), min_size=len(pts), max_size=len(pts))))
    vals = pts @ a - slack * np.any(pts != 0, axis=1)
    out = extend_over_set(PartialFunctional(pts, vals), p, targets, mode)
    assert all_pairs_margin(out, p, mode == STRICT) >= -1e-12 * (1 + np.abs(out.values).max())


@given(points2, st.tuples(coords, coords))
def test_constant_is_brute_force_max(dom, y):
    assume(y not in dom)
    pts = np.array(dom)
    vals = -np.abs(pts).sum(axis=1)
    c, _ = extension_constant(PartialFunctional(pts, vals), L1, y)
    assert c == max(v - (abs(x[0] + y[0]) + abs(x[1] + y[1])) for x, v in zip(pts, vals))


@given(st.lists(st.floats(-3, 3).map(lambda v: round(v, 2)), min_size=1, max_size=5, unique=True),
       st.lists(st.floats(-3, 3).map(lambda v: round(v, 2)), min_size=1, max_size=4, unique=True),
       st.floats(0.2, 2.0), st.floats(0.2, 2.0), st.data())
def test_posneg_bound_holds_when_parts_stay_nonnegative(dom, targets, M1, M2, data):
    dom = [d for d in dom if d != 0.0]
    targets = [t for t in targets if t not in dom and t != 0.0]
    assume(targets)
    pts = np.array([[0.0]] + [[d] for d in dom])
    frac = data.draw(st.lists(st.floats(-1, 1), min_size=len(dom), max_size=len(dom)))
    vals = [0.0] + [f * (M1 if f > 0 else M2) * abs(d) for f, d in zip(frac, dom)]
    try:
        r = extend_posneg(PartialFunctional(pts, np.array(vals)), M1, M2, [[t] for t in targets], FiniteSpace(1, norm_kind="ell1"))
    except PrecheckFailed:
        assume(False)
    assert r.point_margin >= -1e-12
    if r.parts_nonnegative:
        assert r.holds


@given(st.integers(2, 8), st.integers(1, 3), st.data())
def test_pk_norm_is_power_of_form_norm(n, k, data):
    m = data.draw(st.integers(1, n))
    rng = np.random.default_rng(data.draw(st.integers(0, 2**31)))
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    c = rng.normal(size=m)
    r = extend_via_linear(LinearFormExtension(Q.T[:m], c, ("power", k)), InnerProductSpace(n))
    assert r.pk_norm.value == pytest.approx(np.linalg.norm(c) ** k, rel=1e-9)
