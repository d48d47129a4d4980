import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sci

from opnorm.distrib import (
    IntegralKernel,
    RampWitness,
    _momentum_value,
    additivity_gap,
    as_mapping,
    check_functional_linearity,
    delta,
    deriv_delta,
    eval_delta,
    eval_deriv_delta,
    eval_lambda_m,
    functional_mapping_metric,
    functional_norm,
    integral,
    momentum_operator,
    momentum_witness_ratio,
    position_norm_estimate,
    position_operator,
    ramp_kernel,
    star_square,
    test_function_norm,
    zero_functional,
)
from opnorm.errors import NoUpperBoundAvailable
from opnorm.metricmaps import metric_d
from opnorm.testfn import Bump, CoordinateProduct, FrechetMetricParams, ZeroFunction

E1 = math.exp(-1)
BOX = FrechetMetricParams(domain=((-3.0,), (3.0,)), grid_density=150)


def probes(seed=0, count=12, lo=-1.5, hi=1.5):
    rng = np.random.default_rng(seed)
    return [Bump((float(rng.uniform(lo, hi)),), float(rng.uniform(0.2, 1.2)), float(rng.uniform(0.3, 2.5))) for _ in range(count)]


def test_delta_examples():
    b = Bump()
    assert eval_delta(0.0, b) == pytest.approx(E1, rel=1e-15)
    assert eval_delta(1.5, b) == 0
    assert eval_delta(0.0, 2 * b) == pytest.approx(2 * E1, rel=1e-15)


def test_derivative_delta_examples():
    b = Bump()
    assert abs(eval_deriv_delta(1, b)) < 1e-15
    assert eval_deriv_delta(1, CoordinateProduct(b)) == pytest.approx(-E1, rel=1e-14)
    assert eval_deriv_delta(0, b) == eval_delta(0.0, b)


def test_lambda_against_scipy():
    f = CoordinateProduct(Bump((0.5,), 2.0))
    k = IntegralKernel(lambda t: np.ones_like(t), (0.0, 1.0))
    val, err = eval_lambda_m(k, f)
    ref, _ = sci.quad(lambda t: f(t).real, 0.0, 1.0, epsabs=1e-13)
    assert val.real == pytest.approx(ref, abs=1e-10)
    assert eval_lambda_m(k, ZeroFunction())[0] == 0
    zero_kernel = IntegralKernel(lambda t: np.zeros_like(t), (0.0, 1.0))
    assert eval_lambda_m(zero_kernel, Bump())[0] == 0


def test_kernel_l1_norms():
    assert ramp_kernel(4).L1_norm == pytest.approx(0.125, abs=1e-12)
    assert RampWitness(4).L1_norm == 0.125
    cos3 = IntegralKernel(lambda t: np.cos(3 * t), (-1.0, 1.0), breakpoints=(-np.pi / 6, np.pi / 6))
    ref, _ = sci.quad(lambda t: abs(math.cos(3 * t)), -1, 1, points=[-np.pi / 6, np.pi / 6], epsabs=1e-13)
    assert cos3.L1_norm == pytest.approx(ref, abs=1e-10)


def test_functional_norm_bounds():
    params = FrechetMetricParams(domain=((-3.0,), (3.0,)), grid_density=150, anchors=((0.4,), (0.0,)))
    family = probes()
    r = functional_norm(delta(0.4), family, params)
    assert r.upper == 1.0 and 0 <= r.lower <= 1.0 + 1e-12
    quarter = integral(IntegralKernel(lambda t: np.full_like(t, 0.25), (0.0, 1.0)))
    r = functional_norm(quarter, family, params)
    assert r.upper == pytest.approx(0.25) and np.all(r.ratios <= 0.25 + 1e-6)
    assert functional_norm(zero_functional(), family, params).lower == 0.0


def test_delta_outside_K_N_has_no_bound():
    with pytest.raises(NoUpperBoundAvailable):
        delta(2.99).upper_bound(BOX)


def test_mapping_view_matches_functional_norm():
    family = probes(1, 6)
    params = FrechetMetricParams(domain=((-3.0,), (3.0,)), grid_density=150, anchors=((0.2,),))
    mm = functional_mapping_metric(family, params)
    d = metric_d(as_mapping(delta(0.2), params), mm.zero_mapping(), mm).value
    assert d == pytest.approx(functional_norm(delta(0.2), family, params).lower, rel=1e-14)


def test_linearity_of_point_functionals():
    pairs = list(zip(probes(2, 4), probes(3, 4)))
    assert check_functional_linearity(delta(0.3), pairs) < 1e-12
    assert check_functional_linearity(deriv_delta(2), pairs) < 1e-12


def test_position_operator():
    family = probes(4, 8, -2.5, 2.5)
    F = position_operator(delta(2.0))
    for f in family:
        assert F(f) == pytest.approx(2 * f(2.0), abs=1e-15)
    assert position_operator(zero_functional())(family[0]) == 0
    params = FrechetMetricParams(domain=((-3.0,), (3.0,)), grid_density=150, anchors=((0.5,), (-1.0,)))
    rep = position_norm_estimate([0.5, -1.0], probes(5, 6), params)
    assert rep.holds and rep.bound == 1.0


def test_momentum_operator():
    f = Bump((0.2,), 0.9, 1.5)
    assert momentum_operator(delta(0.1))(f) == pytest.approx(-f.derivative((1,), 0.1))
    assert momentum_operator(zero_functional())(f) == 0
    smooth = IntegralKernel(lambda t: np.sin(np.pi * t) ** 2, (0.0, 1.0))
    dsmooth = IntegralKernel(lambda t: np.pi * np.sin(2 * np.pi * t), (0.0, 1.0))
    assert momentum_operator(integral(smooth))(f) == pytest.approx(integral(dsmooth)(f), abs=1e-9)


def test_ramp_two_paths_agree():
    for n in (4, 8, 16):
        for f in probes(6, 5, -0.2, 0.3):
            direct, parts = _momentum_value(RampWitness(n), f)
            assert direct == pytest.approx(parts, abs=1e-9)


def test_witness_ratio_never_exceeds_one():
    # |F(Lambda_n)(f)| <= ||lambda_n||_1 p_1(f) <= d(f, 0)/(2n), so the certified ratio is at most 1
    params = FrechetMetricParams(domain=((-3.0,), (3.0,)), grid_density=150)
    family = [Bump((0.05 + s,), w) for w in (0.1, 0.3) for s in (0.0, 0.1)]
    rep = momentum_witness_ratio(RampWitness(4), family, params, search_steps=4)
    assert 0 < rep.certified_ratio <= 1.0
    assert rep.path_gap < 1e-8


def test_star_square():
    params = BOX
    f, g = Bump((0.1,), 0.8), Bump((-0.4,), 1.0, 2.0)
    sq = star_square(delta(0.0), params)
    assert sq(f) == pytest.approx(f(0.0) ** 2 / test_function_norm(f, params), rel=1e-12)
    assert additivity_gap(sq, f, g) > 1e-3
    assert star_square(zero_functional(), params)(f) == 0


centers = st.floats(-2.0, 2.0)


@settings(max_examples=25)
@given(centers, st.floats(-1.5, 1.5), st.floats(0.2, 1.5), st.floats(0.1, 3.0))
def test_delta_ratio_at_most_one(c, center, radius, amp):
    params = FrechetMetricParams(domain=((-3.0,), (3.0,)), grid_density=100, anchors=((c,),))
    f = Bump((center,), radius, amp)
    assert abs(delta(c)(f)) <= test_function_norm(f, params) * (1 + 1e-12)


@settings(max_examples=25)
@given(st.floats(-1.5, 1.5), st.floats(0.2, 1.5), st.floats(0.1, 3.0), st.integers(0, 2))
def test_derivative_delta_ratio_at_most_one(center, radius, amp, k):
    params = FrechetMetricParams(domain=((-3.0,), (3.0,)), grid_density=100, anchors=((0.0,),))
    f = Bump((center,), radius, amp)
    assert abs(deriv_delta(k)(f)) <= test_function_norm(f, params) * (1 + 1e-12)
