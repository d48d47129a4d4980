"""Continuous Fourier transform by quadrature, a unitary radix-2 FFT, and Schwartz-seminorm amplification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import GridTooSmall, LengthNotPowerOfTwo, QuadratureBudgetExceeded, WindowTooSmall
from .quadrature import _rule
from .spaces import TOL_QUAD
from .testfn import Gaussian, TestFunction, schwartz_seminorm


def _box_nodes(lo, hi, panels: int, order: int = 16):
    """Tensor composite Gauss-Legendre nodes and weights on a box."""
    x, w = _rule(order)
    axes, weights = [], []
    for a, b in zip(lo, hi):
        edges = np.linspace(a, b, panels + 1)
        half = 0.5 * np.diff(edges)[:, None]
        mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
        axes.append((mid + half * x[None, :]).ravel())
        weights.append((half * w[None, :]).ravel())
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    wts = np.ones(len(pts))
    for j, wj in enumerate(np.meshgrid(*weights, indexing="ij")):
        wts = wts * wj.ravel()
    return pts, wts


def integrate_box(func, lo, hi, tol=1e-10, panels=4, max_points=2_000_000):
    """Integrals of a batch ``func(points) -> (m,) or (k, m)`` over a box, doubling panels until stable.

    Returns (values, errors) with one entry per row of the batch.
    """
    lo, hi = np.atleast_1d(lo).astype(float), np.atleast_1d(hi).astype(float)
    pts, wts = _box_nodes(lo, hi, panels)
    prev = np.atleast_2d(func(pts)) @ wts
    while True:
        panels *= 2
        if (16 * panels) ** len(lo) > max_points:
            raise QuadratureBudgetExceeded(f"no convergence to {tol:g} within {max_points} nodes")
        pts, wts = _box_nodes(lo, hi, panels)
        cur = np.atleast_2d(func(pts)) @ wts
        err = np.abs(cur - prev)
        if np.all(err <= tol * np.maximum(1.0, np.abs(cur))):
            return cur, err
        prev = cur


@dataclass
class IntegrableFunction:
    """f on R^dim with a quadrature window; mass outside the window must be negligible.

    ``tail_mass`` is an analytic bound on the integral of |f| outside the
    window; without it the mass in a surrounding shell of the same width is
    measured instead.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    window: tuple
    dim: int = 1
    tail_mass: float | None = None
    tol: float = 1e-11
    name: str = "f"
    L1_norm: float = field(init=False)
    L1_error: float = field(init=False)

    def __post_init__(self):
        lo, hi = (np.atleast_1d(np.asarray(s, float)) for s in self.window)
        if lo.size != self.dim or np.any(hi <= lo):
            raise ValueError("window must be a nonempty box of the right dimension")
        self.window = (lo, hi)
        vals, errs = integrate_box(lambda X: np.abs(self(X)), lo, hi, self.tol)
        self.L1_norm, self.L1_error = float(vals[0]), float(errs[0])
        tail = self.tail_mass if self.tail_mass is not None else self._shell_mass()
        if tail > 1e-8 * max(self.L1_norm, 1e-300) and self.L1_norm > 0:
            raise WindowTooSmall(f"mass {tail:.2e} outside the window exceeds 1e-8 of the L1 norm")
        self.tail_estimate = tail

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, float).reshape(-1, self.dim)
        return np.asarray(self.evaluator(X if self.dim > 1 else X[:, 0]), dtype=complex).reshape(-1)

    def _shell_mass(self) -> float:
        lo, hi = self.window
        w = hi - lo
        total, _ = integrate_box(lambda X: np.abs(self(X)), lo - w, hi + w, self.tol)
        return max(0.0, float(total[0]) - self.L1_norm)


def gaussian_integrable(width: float = 1.0, center=0.0, amplitude: float = 1.0, dim: int = 1, cut: float = 12.0) -> IntegrableFunction:
    c = np.atleast_1d(np.asarray(center, float)) * np.ones(dim)
    return IntegrableFunction(
        lambda X: amplitude * np.exp(-np.sum((np.asarray(X).reshape(len(X), -1) - c) ** 2, axis=1) / (2 * width**2)),
        (c - cut * width, c + cut * width),
        dim,
        name=f"gauss({width:g})",
    )


@dataclass(frozen=True)
class SpectrumSample:
    t_grid: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    sup_abs: float
    capped: tuple = ()


def fourier_transform(f: IntegrableFunction, t_grid, tol: float = 1e-10, cap: bool = False) -> SpectrumSample:
    """f_hat(t) = (2 pi)^(-dim/2) * integral f(x) exp(-i t.x) dx over the window.

    With ``cap`` a frequency whose quadrature does not converge is dropped and
    listed in ``capped``; otherwise QuadratureBudgetExceeded propagates.
    """
    T = np.asarray(t_grid, float).reshape(-1, f.dim)
    lo, hi = f.window
    scale = (2 * np.pi) ** (-f.dim / 2)

    def batch(T):
        return lambda X: f(X)[None, :] * np.exp(-1j * (T @ X.T))

    try:
        vals, errs = integrate_box(batch(T), lo, hi, tol)
        kept, capped = T, ()
    except QuadratureBudgetExceeded:
        if not cap:
            raise
        out = []
        for t in T:
            try:
                v, e = integrate_box(batch(t.reshape(1, -1)), lo, hi, tol)
                out.append((t, v[0], e[0]))
            except QuadratureBudgetExceeded:
                capped += (tuple(t),)
        kept = np.array([o[0] for o in out]).reshape(-1, f.dim)
        vals = np.array([o[1] for o in out])
        errs = np.array([o[2] for o in out])
    vals, errs = scale * vals, scale * errs
    sup = float(np.max(np.abs(vals))) if len(vals) else 0.0
    t_out = kept[:, 0] if f.dim == 1 else kept
    return SpectrumSample(t_out, vals, errs, sup, capped)


@dataclass(frozen=True)
class L1C0Verdict:
    sup_abs: float
    L1_norm: float
    sharp_bound: float
    tolerance: float
    holds: bool
    holds_sharp: bool


def check_l1_c0_bound(f: IntegrableFunction, t_grid, tol: float = TOL_QUAD) -> L1C0Verdict:
    """sup |f_hat| <= ||f||_L1, and the sharper (2 pi)^(-dim/2) ||f||_L1 attained at t = 0 for f >= 0."""
    spec = fourier_transform(f, t_grid)
    slack = tol + f.L1_error + (float(spec.errors.max()) if len(spec.errors) else 0.0)
    sharp = (2 * np.pi) ** (-f.dim / 2) * f.L1_norm
    return L1C0Verdict(spec.sup_abs, f.L1_norm, sharp, slack, spec.sup_abs <= f.L1_norm + slack, spec.sup_abs <= sharp + slack)


# -- discrete transform --------------------------------------------------------


def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=int)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def fft_unitary(v, inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 transform scaled by 1/sqrt(n), so it is unitary."""
    v = np.asarray(v, dtype=complex)
    n = len(v)
    if n < 1 or n & (n - 1):
        raise LengthNotPowerOfTwo(f"length {n} is not a power of two")
    a = v[_bit_reverse(n)].copy()
    sign = 1.0 if inverse else -1.0
    size = 2
    while size <= n:
        half = size // 2
        tw = np.exp(sign * 2j * np.pi * np.arange(half) / size)
        a = a.reshape(-1, size)
        top, bot = a[:, :half].copy(), a[:, half:] * tw
        a[:, :half], a[:, half:] = top + bot, top - bot
        a = a.reshape(-1)
        size *= 2
    return a / math.sqrt(n)


@dataclass(frozen=True)
class PlancherelVerdict:
    norm_gap: float
    roundtrip_gap: float
    linearity_gap: float
    holds: bool


def plancherel_check(v, other=None, alpha: complex = 0.7 - 1.3j, tol: float = 1e-9) -> PlancherelVerdict:
    """||Fv|| = ||v||, inverse(F v) = v and F(alpha v + w) = alpha F v + F w, all to ``tol`` relative."""
    v = np.asarray(v, dtype=complex)
    Fv = fft_unitary(v)
    nv = np.linalg.norm(v)
    norm_gap = abs(np.linalg.norm(Fv) - nv) / max(1.0, nv)
    rt = np.linalg.norm(fft_unitary(Fv, inverse=True) - v) / max(1.0, nv)
    w = np.roll(v[::-1], 1) if other is None else np.asarray(other, dtype=complex)
    lhs = fft_unitary(alpha * v + w)
    rhs = alpha * Fv + fft_unitary(w)
    lin = np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(rhs))
    return PlancherelVerdict(float(norm_gap), float(rt), float(lin), max(norm_gap, rt, lin) <= tol)


# -- Schwartz-space boundedness -----------------------------------------------


class FourierImage(TestFunction):
    """f_hat for a one-variable f, derivatives (-i x)^a under the integral by fixed composite quadrature."""

    def __init__(self, f: TestFunction, window: float, panels: int = 256):
        if f.dim != 1:
            raise ValueError("quadrature transform of test functions is one-dimensional")
        self.f, self.dim, self.max_order = f, 1, f.max_order
        self.support, self.rapid_decrease = None, True
        self._x, self._w = _box_nodes(np.array([-window]), np.array([window]), panels)
        self._fx = f(self._x[:, 0])

    def _derivative(self, alpha, X):
        k = alpha[0]
        x = self._x[:, 0]
        kern = (-1j * x) ** k * self._fx * self._w
        return (np.exp(-1j * np.outer(X[:, 0], x)) @ kern) / math.sqrt(2 * math.pi)


def fourier_of(f: TestFunction, window: float = 20.0) -> TestFunction:
    """Closed form for centered Gaussians, quadrature otherwise."""
    if isinstance(f, Gaussian) and all(c == 0.0 for c in f.center):
        s, n = f.width, f.dim
        return Gaussian(f.center, 1.0 / s, f.amplitude * s**n, f.max_order)
    return FourierImage(f, window)


def adaptive_schwartz_seminorm(f: TestFunction, k: int, window: float = 12.0, density: float = 100.0, doublings: int = 5) -> tuple[float, float]:
    """(||f||_k, window used), widening the window until the boundary envelope is negligible."""
    for _ in range(doublings + 1):
        try:
            return schwartz_seminorm(f, k, window, density), window
        except GridTooSmall:
            window *= 2
    raise GridTooSmall(f"||f||_{k} still not captured at window {window / 2}")


@dataclass(frozen=True)
class AmplificationReport:
    seminorms: list
    image_seminorms: list
    ratios: np.ndarray
    max_ratio_per_k: list
    finite: bool


def schwartz_fourier_bounded(family: Sequence[TestFunction], k_max: int, density: float = 100.0) -> AmplificationReport:
    """||f||_k and ||f_hat||_k for k <= k_max; ratios ||f_hat||_k/||f||_k as boundedness evidence."""
    sem, img = [], []
    for f in family:
        if f.is_zero:
            sem.append([0.0] * (k_max + 1))
            img.append([0.0] * (k_max + 1))
            continue
        fh = fourier_of(f)
        sem.append([adaptive_schwartz_seminorm(f, k, density=density)[0] for k in range(k_max + 1)])
        img.append([adaptive_schwartz_seminorm(fh, k, density=density)[0] for k in range(k_max + 1)])
    S, I = np.array(sem), np.array(img)
    with np.errstate(divide="ignore", invalid="ignore"):
        R = np.where(S > 0, I / np.where(S > 0, S, 1.0), 0.0)
    per_k = [float(R[:, k].max()) if len(R) else 0.0 for k in range(k_max + 1)]
    return AmplificationReport(sem, img, R, per_k, bool(np.all(np.isfinite(R))))
