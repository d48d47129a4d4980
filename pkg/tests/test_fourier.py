import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opnorm.errors import LengthNotPowerOfTwo, WindowTooSmall
from opnorm.fourier import (
    IntegrableFunction,
    check_l1_c0_bound,
    fft_unitary,
    fourier_of,
    fourier_transform,
    gaussian_integrable,
    plancherel_check,
    schwartz_fourier_bounded,
)
from opnorm.testfn import Gaussian, ZeroFunction

T = np.linspace(-5, 5, 21)


def test_gaussian_is_self_dual():
    s = fourier_transform(gaussian_integrable(), T)
    assert np.allclose(s.values, np.exp(-T**2 / 2), atol=1e-10)
    assert s.values[10] == pytest.approx(1.0, abs=1e-6)


def test_zero_function_transform():
    z = IntegrableFunction(lambda X: np.zeros(len(X)), ((-1.0,), (1.0,)), tail_mass=0.0)
    s = fourier_transform(z, T)
    assert np.all(s.values == 0)
    v = check_l1_c0_bound(z, T)
    assert v.holds and v.sup_abs == 0.0 and v.L1_norm == 0.0


def test_shift_leaves_magnitude():
    a = fourier_transform(gaussian_integrable(0.7), T)
    b = fourier_transform(gaussian_integrable(0.7, center=1.3), T)
    assert np.allclose(np.abs(a.values), np.abs(b.values), atol=1e-9)


def test_l1_c0_on_gaussian():
    v = check_l1_c0_bound(gaussian_integrable(), T)
    assert v.sup_abs == pytest.approx(1.0, abs=1e-6)
    assert v.L1_norm == pytest.approx(math.sqrt(2 * math.pi), abs=1e-6)
    assert v.holds and v.holds_sharp


def test_l1_c0_on_mixture():
    parts = [(0.6, -1.0, 0.5), (1.2, 0.8, 0.7), (0.4, 2.0, 1.1)]

    def f(X):
        x = np.asarray(X).reshape(-1)
        return sum(a * np.exp(-((x - c) ** 2) / (2 * w * w)) for w, c, a in parts)

    v = check_l1_c0_bound(IntegrableFunction(f, ((-20.0,), (20.0,))), T)
    assert v.holds


def test_window_too_small():
    with pytest.raises(WindowTooSmall):
        IntegrableFunction(lambda X: np.exp(-np.asarray(X).reshape(-1) ** 2 / 8), ((-2.0,), (2.0,)))


def test_fft_matches_numpy(rng):
    v = rng.normal(size=64) + 1j * rng.normal(size=64)
    assert np.allclose(fft_unitary(v), np.fft.fft(v, norm="ortho"), atol=1e-14)
    assert np.allclose(fft_unitary(fft_unitary(v), inverse=True), v, atol=1e-14)


def test_basis_vector_has_flat_spectrum():
    e = np.zeros(32, complex)
    e[5] = 1
    s = fft_unitary(e)
    assert np.allclose(np.abs(s), 1 / math.sqrt(32))
    assert plancherel_check(e).holds


def test_scaling_and_length_checks(rng):
    v = rng.normal(size=1024) + 1j * rng.normal(size=1024)
    alpha = 2.5 - 0.5j
    assert np.allclose(fft_unitary(alpha * v), alpha * fft_unitary(v), atol=1e-12)
    v = plancherel_check(v)
    assert v.holds and v.norm_gap < 1e-9
    with pytest.raises(LengthNotPowerOfTwo):
        fft_unitary(np.ones(12))


def test_schwartz_amplification():
    rep = schwartz_fourier_bounded([Gaussian()], 0)
    assert rep.ratios[0][0] == pytest.approx(1.0, rel=1e-6)
    zero = schwartz_fourier_bounded([ZeroFunction()], 2)
    assert all(v == 0 for v in zero.seminorms[0])
    dil = schwartz_fourier_bounded([Gaussian((0.0,), 1.0 / s) for s in (1.0, 2.0, 4.0)], 2)
    assert dil.finite and np.all(np.isfinite(dil.ratios))


def test_closed_form_dilation():
    g = fourier_of(Gaussian((0.0,), 0.5))
    t = np.array([0.0, 1.0, 3.0])
    # e^{-(2x)^2/2} transforms to e^{-t^2/8}/2
    assert np.allclose(g(t), np.exp(-t**2 / 8) / 2)


@settings(max_examples=30)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_plancherel_property(m, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**m) + 1j * rng.normal(size=2**m)
    assert np.linalg.norm(fft_unitary(v)) == pytest.approx(np.linalg.norm(v), rel=1e-12)


@settings(max_examples=10)
@given(st.floats(0.4, 2.0), st.floats(-2, 2), st.floats(0.2, 3.0))
def test_sup_never_exceeds_l1(width, center, amp):
    f = gaussian_integrable(width, center, amp)
    v = check_l1_c0_bound(f, np.linspace(-4, 4, 9))
    assert v.holds and v.holds_sharp
