import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opnorm.errors import ConfigInvalid, GridTooSmall, OrderExceedsOracle
from opnorm.testfn import (
    Bump,
    FrechetMetricParams,
    Gaussian,
    SchwartzParams,
    ZeroFunction,
    default_truncation,
    frechet_from_seminorms,
    frechet_metric,
    frechet_norm,
    multi_indices,
    schwartz_metric,
    schwartz_seminorm,
    seminorm_p_i,
)

E1 = math.exp(-1)
WHOLE_LINE = FrechetMetricParams(a=10, b=1, N=2, step=2.0)


def bump_oracle(x):
    """exp(-1/(1-x^2)) and its first two derivatives in closed form."""
    u = 1 - x * x
    b = math.exp(-1 / u)
    g = -2 * x / u**2
    dg = -2 / u**2 - 8 * x * x / u**3
    return b, b * g, b * (g * g + dg)


@pytest.mark.parametrize("x", [-0.9, -0.4, 0.0, 0.3, 0.75])
def test_bump_derivatives_match_closed_form(x):
    b = Bump()
    want = bump_oracle(x)
    for k in range(3):
        assert b.derivative((k,), x).real == pytest.approx(want[k], rel=1e-12, abs=1e-15)


def test_scaled_bump_chain_rule():
    b = Bump((0.5,), 2.0, 3.0)
    x = 1.1
    _, d1, _ = bump_oracle((x - 0.5) / 2.0)
    assert b.derivative((1,), x).real == pytest.approx(3.0 * d1 / 2.0, rel=1e-12)


def test_bump_vanishes_outside_support():
    b = Bump((1.0,), 0.5)
    assert b(2.0) == 0 and b.derivative((3,), 0.4) == 0


def test_gaussian_hermite_derivatives():
    g = Gaussian()
    for x in (-1.3, 0.0, 0.7, 2.5):
        f = math.exp(-x * x / 2)
        assert g(x).real == pytest.approx(f)
        assert g.derivative((1,), x).real == pytest.approx(-x * f)
        assert g.derivative((2,), x).real == pytest.approx((x * x - 1) * f)
        assert g.derivative((3,), x).real == pytest.approx((3 * x - x**3) * f)


def test_two_dimensional_derivative_by_finite_difference():
    b = Bump((0.1, -0.2), 1.5, 1.0)
    x, h = np.array([0.3, 0.2]), 1e-5
    fd = (b(x + [h, 0]) - b(x - [h, 0])) / (2 * h)
    assert b.derivative((1, 0), x).real == pytest.approx(fd.real, rel=1e-7)
    mixed = (b(x + [h, h]) - b(x + [h, -h]) - b(x + [-h, h]) + b(x - [h, h])) / (4 * h * h)
    assert b.derivative((1, 1), x).real == pytest.approx(mixed.real, rel=1e-4)


def test_order_limit():
    with pytest.raises(OrderExceedsOracle):
        Bump(max_order=3).derivative((4,), 0.0)


def test_multi_indices_count():
    assert len(multi_indices(2, 3)) == 10
    assert len(multi_indices(1, 4)) == 5


def test_seminorm_examples():
    b = Bump()
    assert seminorm_p_i(b, 0, WHOLE_LINE) == pytest.approx(E1, rel=1e-14)
    assert seminorm_p_i(b, 1, WHOLE_LINE) >= E1
    for i in range(3):
        assert seminorm_p_i(ZeroFunction(), i, WHOLE_LINE) == 0.0
        assert seminorm_p_i(3 * b, i, WHOLE_LINE) == pytest.approx(3 * seminorm_p_i(b, i, WHOLE_LINE), rel=1e-14)


def test_series_arithmetic():
    series, value = frechet_from_seminorms([1.0] * 40, base=2.0, offset=1.0, top=1.0)
    assert series == pytest.approx(0.5, abs=1e-12) and value == 1.0
    p = FrechetMetricParams(a=2.0, I=20)
    assert p.tail_bound == pytest.approx(2.0**-20)
    series, value = frechet_from_seminorms([1.0] * 41, base=2.0, offset=1.0, top=1.0, start=0)
    assert series == pytest.approx(1.0, abs=1e-12) and value == 1.0


def test_default_truncation():
    assert default_truncation(10.0) == 9
    I = default_truncation(3.0)
    assert 3.0**-I / 2 <= 1e-9 * (1 + 1e-9)


def test_metric_basics():
    f, g = Bump((0.2,), 0.8, 2.0), Bump((-0.3,), 1.1)
    assert frechet_metric(f, f, WHOLE_LINE).value == 0.0
    m = frechet_metric(f, g, WHOLE_LINE)
    assert m.value == max(m.series, m.top_term)
    assert m.tail_bound == WHOLE_LINE.tail_bound


def test_params_validation():
    with pytest.raises(ConfigInvalid):
        FrechetMetricParams(a=0.5)
    with pytest.raises(ConfigInvalid):
        FrechetMetricParams(b=0.0)
    with pytest.raises(ConfigInvalid):
        SchwartzParams(b=1.0)


def test_exhaustion_grows():
    p = FrechetMetricParams(domain=((-1.0,), (1.0,)))
    widths = [float(np.diff(np.concatenate(p.K(i)))[0]) for i in range(1, 6)]
    assert widths == sorted(widths) and widths[-1] < 2.0


def test_schwartz_seminorms():
    g = Gaussian(width=1 / math.sqrt(2))  # exp(-x^2)
    assert schwartz_seminorm(g, 0) == pytest.approx(1.0, abs=1e-14)
    assert schwartz_seminorm(ZeroFunction(), 2) == 0.0
    x = np.linspace(-12, 12, 2_400_001)
    f = np.exp(-x * x)
    dense = max(np.max((1 + x * x) * f), np.max((1 + x * x) * np.abs(-2 * x * f)))
    assert schwartz_seminorm(g, 1) == pytest.approx(dense, abs=1e-6)


def test_schwartz_window_check():
    with pytest.raises(GridTooSmall):
        schwartz_seminorm(Gaussian(width=3.0), 1, window=4.0)


def test_schwartz_metric_top_term_doubles():
    f, g = Gaussian(width=0.6), Gaussian((0.5,), 0.7)
    p = SchwartzParams(I=4)
    assert schwartz_metric(f, f, p).value == 0.0
    one = schwartz_metric(f, g, p)
    two = schwartz_metric(2 * f, 2 * g, p)
    assert two.top_term == pytest.approx(2 * one.top_term, rel=1e-12)


bumps = st.builds(
    Bump,
    st.tuples(st.floats(-1, 1)),
    st.floats(0.3, 1.5),
    st.floats(0.1, 3) | st.floats(-3, -0.1),
)


@settings(max_examples=15)
@given(bumps, bumps)
def test_metric_symmetric(f, g):
    p = FrechetMetricParams(domain=((-3.0,), (3.0,)), grid_density=100)
    assert frechet_metric(f, g, p).value == pytest.approx(frechet_metric(g, f, p).value, rel=1e-12)


@settings(max_examples=15)
@given(bumps, bumps, bumps)
def test_metric_triangle(f, g, h):
    p = FrechetMetricParams(domain=((-3.0,), (3.0,)), grid_density=100)
    d = lambda u, v: frechet_metric(u, v, p).value
    assert d(f, h) <= d(f, g) + d(g, h) + 1e-9


@settings(max_examples=15)
@given(bumps, st.floats(-5, 5).filter(lambda a: abs(a) > 1e-3))
def test_seminorms_are_homogeneous(f, alpha):
    p = FrechetMetricParams(domain=((-3.0,), (3.0,)), grid_density=100)
    for i in (0, 1, 2):
        assert seminorm_p_i(alpha * f, i, p) == pytest.approx(abs(alpha) * seminorm_p_i(f, i, p), rel=1e-12)
