import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opnorm.errors import NotAlgebra, NotCauchy, NotLinearOnProbes, NotUnital
from opnorm.metricmaps import (
    MappingHandle,
    MappingMetric,
    MatrixAlgebra,
    ScalarAlgebra,
    algebra_laws,
    check_linear_bridge,
    check_membership_criteria,
    completeness_harness,
    mapping_norm,
    metric_d,
    norm_structure_check,
    normed_mapping_metric,
    star_multiply,
    unit_element,
)
from opnorm.spaces import FiniteSpace, MetricDescriptor, SampleSet

ABS = MetricDescriptor(lambda x, y: abs(float(x) - float(y)), True, zero=0.0)


def line_metric(samples=(1.0, -1.0, 2.0, -2.0)):
    return MappingMetric(ABS, list(samples), 0.0, algebra=ScalarAlgebra())


def scalar(f, name="F", linear=None):
    return MappingHandle(f, 0.0, linear, name)


def brute_d(F1, F2, samples):
    return max([abs(F1(x) - F2(x)) / abs(x) for x in samples if x != 0] + [abs(F1(0.0) - F2(0.0))])


def test_metric_examples():
    mm = line_metric()
    F = scalar(lambda x: x)
    assert metric_d(F, F, mm).value == 0.0
    assert metric_d(F, scalar(lambda x: 0.0), mm).value == 1.0


def test_metric_matches_loop_oracle(rng):
    samples = list(rng.uniform(-3, 3, 25))
    mm = line_metric(samples)
    F1, F2 = scalar(lambda x: np.sin(3 * x) + x**2), scalar(lambda x: 0.3 * x - 1)
    assert metric_d(F1, F2, mm).value == brute_d(F1, F2, samples)


def test_overflow_reported_as_inf():
    mm = line_metric((1e-200, 1.0))
    est = metric_d(scalar(lambda x: 1.0 if x else 0.0), scalar(lambda x: 0.0), mm)
    assert est.value == np.inf and est.certificate.tag == "ratio overflow"


def test_membership_criteria():
    mm = line_metric()
    ladder = [2.0**-k for k in range(1, 30)]
    F = scalar(lambda x: 2 * x)
    d = mapping_norm(F, mm)
    rep = check_membership_criteria(F, mm, ladder, [10.0, 100.0], [(e, d * max(e, 1)) for e in (0.5, 1.0, 3.0)])
    assert rep.finite_evidence and not rep.diverging
    rep = check_membership_criteria(scalar(lambda x: 0.0), mm, ladder, [10.0], [(1.0, 0.0)])
    assert rep.finite_evidence and rep.far_max == 0.0
    inv = scalar(lambda x: 1 / abs(x) if x else 0.0)
    rep = check_membership_criteria(inv, mm, ladder, [10.0], [])
    assert rep.diverging and not rep.finite_evidence


def test_linear_bridge():
    mm = line_metric((1.0, 2.0))
    pairs = [(1.0, 0.0), (2.0, 1.0), (0.0, 2.0)]
    v = check_linear_bridge(scalar(lambda x: x, linear=True), mm, pairs)
    assert v.holds and v.d_hat == 1.0
    v = check_linear_bridge(scalar(lambda x: 3 * x, linear=True), mm, pairs)
    assert v.holds and v.d_hat == 3.0
    with pytest.raises(NotLinearOnProbes):
        check_linear_bridge(scalar(lambda x: x**2), mm, pairs)


def test_norm_structure_examples():
    X = FiniteSpace(2)
    mm = normed_mapping_metric(X, X, SampleSet.generate(X, 20, seed=1))
    F = MappingHandle(lambda x: x, X.zero())
    G = MappingHandle(lambda x: -x, X.zero())
    assert mapping_norm(2.0 * F, mm) == pytest.approx(2 * mapping_norm(F, mm), rel=1e-15)
    assert mapping_norm(F + G, mm) == 0.0
    H = MappingHandle(lambda x: np.tanh(x) + 1, X.zero())
    assert norm_structure_check(mm, F, H, G).holds


def test_completeness():
    mm = line_metric([k / 8 for k in range(-16, 17)])
    F, G = scalar(lambda x: 3 * x), scalar(lambda x: x)
    v = completeness_harness([F + 2.0**-n * G for n in range(1, 41)], F, mm)
    assert v.converged
    assert v.limit_distances == [2.0**-n for n in range(1, 41)]
    v = completeness_harness([F] * 4, F, mm)
    assert v.limit_distances == [0.0] * 4
    with pytest.raises(NotCauchy):
        completeness_harness([F, G] * 5, F, mm)


def test_star_product_and_unit():
    mm = line_metric((2.0, -1.0, 0.5))
    x = scalar(lambda t: t)
    assert star_multiply(x, x, mm)(2.0) == 2.0
    assert star_multiply(scalar(lambda t: 0.0), x, mm)(2.0) == 0.0
    e = unit_element(mm)
    assert e(0.0) == 1.0 and e(2.0) == 2.0
    assert mapping_norm(e.mapping, mm) == 1.0
    F = scalar(lambda t: t**3 - 1)
    for t in (2.0, -1.0, 0.5, 0.0):
        assert star_multiply(F, e, mm)(t) == pytest.approx(F(t)) == pytest.approx(star_multiply(e, F, mm)(t))


def test_algebra_errors():
    X = FiniteSpace(2)
    mm = normed_mapping_metric(X, X, SampleSet.generate(X, 4, seed=0))
    F = MappingHandle(lambda x: x, X.zero())
    with pytest.raises(NotAlgebra):
        star_multiply(F, F, mm)
    frob = MappingMetric(ABS, [1.0], 0.0, algebra=MatrixAlgebra(2, "frobenius"))
    with pytest.raises(NotUnital):
        unit_element(frob)


coef = st.floats(-3, 3)


@given(coef, coef, coef, coef, coef, coef)
def test_scalar_algebra_laws(a0, a1, b0, b1, c0, c1):
    mm = line_metric([k / 4 for k in range(-8, 9)])
    F1, F2, F3 = (scalar(lambda t, u=u, v=v: u + v * t) for u, v in ((a0, a1), (b0, b1), (c0, c1)))
    assert algebra_laws(F1, F2, F3, mm).holds


@given(st.lists(st.floats(-2, 2), min_size=8, max_size=8))
def test_matrix_algebra_submultiplicative(entries):
    X = FiniteSpace(2)
    mm = MappingMetric(MetricDescriptor(lambda x, y: float(np.linalg.norm(x - y)), True), list(SampleSet.generate(X, 12, seed=4).points), X.zero(), algebra=MatrixAlgebra(2))
    A, B = np.array(entries[:4]).reshape(2, 2), np.array(entries[4:]).reshape(2, 2)
    F1 = MappingHandle(lambda x: A * float(x.sum()), X.zero())
    F2 = MappingHandle(lambda x: B + np.eye(2) * float(x[0]), X.zero())
    v = algebra_laws(F1, F2, F1, mm)
    assert v.submult_margin >= -1e-12 and v.assoc_gap <= 1e-12


@given(coef, coef, st.floats(-4, 4))
def test_distance_is_homogeneous_and_translation_invariant(a, b, alpha):
    mm = line_metric([0.25, -1.0, 2.0, 3.5])
    F, G = scalar(lambda t: a * t + np.sin(t)), scalar(lambda t: b * t * t)
    d = metric_d(F, G, mm).value
    assert metric_d(alpha * F, alpha * G, mm).value == pytest.approx(abs(alpha) * d, rel=1e-12, abs=1e-12)
    H = scalar(lambda t: np.cos(5 * t))
    assert metric_d(F + H, G + H, mm).value == pytest.approx(d, rel=1e-12, abs=1e-12)
