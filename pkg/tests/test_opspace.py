import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opnorm.errors import ConfigInvalid, HypothesisViolated
from opnorm.opspace import (
    P,
    P_STAR,
    NormKind,
    OperatorHandle,
    check_composition_bound,
    compose,
    constant_operator,
    estimate_norm,
    identity,
    linear_operator,
    norm_equivalence_report,
    restrict,
    zero_operator,
)
from opnorm.spaces import FiniteSpace, SampleSet, real_line

from conftest import on_line

R = real_line()


def brute_p(F, pts):
    """Independent oracle: python loop over points."""
    best = 0.0
    for x in pts:
        nx = abs(float(x))
        if nx > 0:
            best = max(best, abs(float(np.ravel(F(np.array([x])))[0])) / nx)
    return max(best, abs(float(np.ravel(F(np.array([0.0])))[0])))


def test_linear_on_line():
    F = OperatorHandle(lambda x: 2 * x, R, R)
    S = on_line(1, -1, 2, -2, 0)
    assert estimate_norm(F, P, S).value == 2.0 == brute_p(F, [1, -1, 2, -2])


def test_identity_and_zero():
    X = FiniteSpace(3, norm_kind="ellinf")
    S = SampleSet.generate(X, 40, seed=1)
    assert estimate_norm(identity(X), P, S).value == pytest.approx(1.0, abs=1e-15)
    for kind in (P, P_STAR, NormKind("q", 2.0), NormKind("p_k", 3.0)):
        assert estimate_norm(zero_operator(X, X), kind, S).value == 0.0


def test_pk_norm_of_square():
    F = OperatorHandle(lambda x: x * x, R, R)
    assert estimate_norm(F, NormKind("p_k", 2.0), on_line(1, -1, 2, -2, 3, -3, 0)).value == 1.0


def test_equivalence_examples():
    F = OperatorHandle(lambda x: 2 * x, R, R)
    rep = norm_equivalence_report(F, on_line(1, -1, 2, 0))
    assert (rep.p, rep.p_star, rep.holds) == (2.0, 2.0, True)
    const = constant_operator(np.array([1.0]), R, R)
    rep = norm_equivalence_report(const, on_line(0.5, -1, 2, 0))
    assert (rep.p, rep.p_star, rep.holds) == (2.0, 3.0, True)


def test_composition():
    F1 = OperatorHandle(lambda x: 2 * x, R, R)
    F2 = OperatorHandle(lambda y: 3 * y, R, R)
    assert compose(F1, F2)(np.array([1.0]))[0] == 6.0
    sq = OperatorHandle(lambda x: x**2, R, R)
    assert compose(sq, OperatorHandle(lambda y: y + 0, R, R))(np.array([2.0]))[0] == 4.0
    v = check_composition_bound(F1, F2, on_line(1, -1))
    assert v.lhs == 6.0 and v.p1 * v.p2 == 6.0 and v.holds
    cube = OperatorHandle(lambda y: y**3, R, R)
    assert check_composition_bound(sq, cube, on_line(1, -1, 2, -2)).holds


def test_composition_needs_zero_at_origin():
    const = constant_operator(np.array([1.0]), R, R)
    with pytest.raises(HypothesisViolated):
        check_composition_bound(const, identity(R), on_line(1))


def test_restrict():
    sq = OperatorHandle(lambda x: x**2, R, R)
    assert restrict(sq, on_line(0, 1, -1)).value == 1.0
    assert restrict(zero_operator(R, R), on_line(0, 3)).value == 0.0


def test_norm_kind_parse():
    assert NormKind.parse("q:2") == NormKind("q", 2.0)
    assert NormKind.parse("pstar") == P_STAR
    with pytest.raises(ConfigInvalid):
        NormKind.parse("r")
    with pytest.raises(ConfigInvalid):
        NormKind.parse("p:3")


matrices = st.lists(st.floats(-5, 5), min_size=4, max_size=4).map(lambda v: np.array(v).reshape(2, 2))


@given(matrices, st.floats(-4, 4).filter(lambda a: a == 0 or abs(a) > 1e-100), st.sampled_from(["ell1", "ell2", "ellinf"]))
def test_homogeneity_and_equivalence(A, alpha, kind):
    X = FiniteSpace(2, norm_kind=kind)
    S = SampleSet.generate(X, 32, seed=3)
    F = OperatorHandle(lambda x: np.tanh(A @ x) + 0.5, X, X)
    p = estimate_norm(F, P, S).value
    assert estimate_norm(alpha * F, P, S).value == pytest.approx(abs(alpha) * p, rel=1e-12, abs=1e-300)
    rep = norm_equivalence_report(F, S)
    assert rep.p <= rep.p_star <= 2 * rep.p * (1 + 1e-12)


@given(matrices, matrices)
def test_composition_bound_property(A, B):
    X = FiniteSpace(2)
    F1 = OperatorHandle(lambda x: (A @ x) * np.abs(x), X, X)
    F2 = linear_operator(B, X, X)
    assert check_composition_bound(F1, F2, SampleSet.generate(X, 24, seed=5)).holds


@given(matrices)
def test_linear_norm_never_exceeds_spectral_norm(A):
    X = FiniteSpace(2)
    est = estimate_norm(linear_operator(A, X, X), P, SampleSet.generate(X, 64, seed=2)).value
    assert est <= np.linalg.norm(A, 2) * (1 + 1e-12) + 1e-300
