"""Smooth test functions with exact derivative oracles, the seminorms p_i and ||.||_k, and the Frechet metrics built on them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial import hermite_e

from .errors import ConfigInvalid, GridTooSmall, OrderExceedsOracle

INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def multi_indices(dim: int, order: int) -> list[tuple[int, ...]]:
    """All alpha in N^dim with |alpha| <= order, graded."""
    out = []
    for total in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(dim), total):
            alpha = [0] * dim
            for j in combo:
                alpha[j] += 1
            out.append(tuple(alpha))
    return out


def _points(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x.reshape(1, 1)
    if x.ndim == 1:
        return x.reshape(-1, 1) if dim == 1 else x.reshape(1, dim)
    return x


class TestFunction:
    """A smooth function R^dim -> C with derivatives up to ``max_order``.

    ``support`` is a (lo, hi) box outside which the function and all its
    derivatives vanish, or None. ``rapid_decrease`` marks Schwartz-class
    functions.
    """

    __test__ = False  # keep pytest from collecting the class

    dim: int = 1
    max_order: int = 0
    support: tuple | None = None
    rapid_decrease: bool = False

    def _derivative(self, alpha: tuple, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, alpha, x) -> np.ndarray:
        alpha = tuple(int(a) for a in np.atleast_1d(alpha))
        if len(alpha) != self.dim:
            raise ValueError(f"multi-index {alpha} for a {self.dim}-variable function")
        if sum(alpha) > self.max_order:
            raise OrderExceedsOracle(f"order {sum(alpha)} exceeds the oracle limit {self.max_order}")
        X = _points(x, self.dim)
        out = np.asarray(self._derivative(alpha, X), dtype=complex)
        return out[0] if np.ndim(x) == 0 or (np.ndim(x) == 1 and self.dim > 1) else out

    def __call__(self, x):
        return self.derivative((0,) * self.dim, x)

    # arithmetic ------------------------------------------------------------
    def _terms(self):
        return [(1.0, self)]

    def __add__(self, other: TestFunction) -> TestFunction:
        return Combination(self._terms() + other._terms())

    def __sub__(self, other: TestFunction) -> TestFunction:
        return Combination(self._terms() + [(-c, f) for c, f in other._terms()])

    def __rmul__(self, alpha) -> TestFunction:
        return Combination([(alpha * c, f) for c, f in self._terms()])

    def __mul__(self, alpha) -> TestFunction:
        return self.__rmul__(alpha)

    def __neg__(self) -> TestFunction:
        return -1.0 * self

    def times_coordinate(self, j: int = 0) -> TestFunction:
        return CoordinateProduct(self, j)

    def differentiated(self, beta) -> TestFunction:
        return Differentiated(self, tuple(np.atleast_1d(beta)))

    @property
    def is_zero(self) -> bool:
        return False


# -- canonical bump -----------------------------------------------------------


@lru_cache(maxsize=None)
def bump_polynomial(alpha: tuple) -> tuple:
    """d^alpha exp(-w), w = 1/(1 - |y|^2), as sum c * y^a * w^b * exp(-w).

    Returns ((a, b, c), ...). Uses dw/dy_i = 2 y_i w^2, so
    d_i [y^a w^b e^-w] = a_i y^(a-e_i) w^b + 2 b y^(a+e_i) w^(b+1) - 2 y^(a+e_i) w^(b+2).
    """
    dim = len(alpha)
    if sum(alpha) == 0:
        return (((0,) * dim, 0, 1.0),)
    i = max(j for j, a in enumerate(alpha) if a > 0)
    prev = list(alpha)
    prev[i] -= 1
    acc: dict = {}

    def add(a, b, c):
        key = (a, b)
        acc[key] = acc.get(key, 0.0) + c

    for a, b, c in bump_polynomial(tuple(prev)):
        up = tuple(v + (j == i) for j, v in enumerate(a))
        if a[i] > 0:
            add(tuple(v - (j == i) for j, v in enumerate(a)), b, c * a[i])
        if b > 0:
            add(up, b + 1, 2.0 * b * c)
        add(up, b + 2, -2.0 * c)
    return tuple((a, b, c) for (a, b), c in sorted(acc.items()) if c != 0.0)


@dataclass(frozen=True, eq=False)
class Bump(TestFunction):
    """amplitude * exp(-1/(1 - |(x - center)/radius|^2)) inside the ball, 0 outside."""

    center: tuple = (0.0,)
    radius: float = 1.0
    amplitude: complex = 1.0
    max_order: int = 12

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.center))
        object.__setattr__(self, "center", c)
        if self.radius <= 0:
            raise ConfigInvalid("bump radius must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def support(self):
        c = np.array(self.center)
        return (tuple(c - self.radius), tuple(c + self.radius))

    def _derivative(self, alpha, X):
        Y = (X - np.array(self.center)) / self.radius
        s = np.sum(Y * Y, axis=1)
        inside = s < 1.0
        out = np.zeros(len(X), dtype=complex)
        if not inside.any():
            return out
        Yi = Y[inside]
        w = 1.0 / (1.0 - s[inside])
        lw = np.log(w)
        acc = np.zeros(len(Yi))
        for a, b, c in bump_polynomial(alpha):
            term = c * np.exp(b * lw - w)
            for j, aj in enumerate(a):
                if aj:
                    term = term * Yi[:, j] ** aj
            acc += term
        out[inside] = self.amplitude * acc * self.radius ** (-sum(alpha))
        return out


@dataclass(frozen=True, eq=False)
class Gaussian(TestFunction):
    """amplitude * exp(-|x - center|^2 / (2 width^2)); rapidly decreasing."""

    center: tuple = (0.0,)
    width: float = 1.0
    amplitude: complex = 1.0
    max_order: int = 20
    rapid_decrease: bool = True

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in np.atleast_1d(self.center)))
        if self.width <= 0:
            raise ConfigInvalid("width must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    def _derivative(self, alpha, X):
        U = (X - np.array(self.center)) / self.width
        out = np.full(len(X), self.amplitude, dtype=complex)
        for j, k in enumerate(alpha):
            coef = np.zeros(k + 1)
            coef[k] = 1.0
            out *= (-1.0 / self.width) ** k * hermite_e.hermeval(U[:, j], coef) * np.exp(-0.5 * U[:, j] ** 2)
        return out


def _merge_support(parts) -> tuple | None:
    boxes = [f.support for f in parts]
    if any(b is None for b in boxes):
        return None
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    return (tuple(lo), tuple(hi))


class Combination(TestFunction):
    """sum_j c_j f_j."""

    def __init__(self, terms):
        terms = [(c, f) for c, f in terms if c != 0 and not f.is_zero]
        self.terms = terms
        self.dim = terms[0][1].dim if terms else 1
        self.max_order = min((f.max_order for _, f in terms), default=10**6)
        self.support = _merge_support([f for _, f in terms]) if terms else None
        self.rapid_decrease = all(f.rapid_decrease or f.support is not None for _, f in terms)

    def _terms(self):
        return list(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def _derivative(self, alpha, X):
        out = np.zeros(len(X), dtype=complex)
        for c, f in self.terms:
            out += c * f._derivative(alpha, X)
        return out


class ZeroFunction(Combination):
    def __init__(self, dim: int = 1):
        super().__init__([])
        self.dim = dim
        self.support = (tuple([0.0] * dim), tuple([0.0] * dim))

    def _derivative(self, alpha, X):
        return np.zeros(len(X), dtype=complex)


class Differentiated(TestFunction):
    """d^beta f."""

    def __init__(self, f: TestFunction, beta: tuple):
        self.f, self.beta = f, tuple(int(b) for b in beta)
        self.dim = f.dim
        self.max_order = f.max_order - sum(self.beta)
        if self.max_order < 0:
            raise OrderExceedsOracle("derivative order exceeds the oracle limit")
        self.support = f.support
        self.rapid_decrease = f.rapid_decrease

    def _derivative(self, alpha, X):
        return self.f._derivative(tuple(a + b for a, b in zip(alpha, self.beta)), X)


class CoordinateProduct(TestFunction):
    """x_j f(x); derivatives by the Leibniz rule d^a(x_j f) = x_j d^a f + a_j d^(a - e_j) f."""

    def __init__(self, f: TestFunction, j: int = 0):
        self.f, self.j = f, j
        self.dim, self.max_order = f.dim, f.max_order
        self.support = f.support
        self.rapid_decrease = f.rapid_decrease

    def _derivative(self, alpha, X):
        out = X[:, self.j] * self.f._derivative(alpha, X)
        if alpha[self.j] > 0:
            lower = tuple(a - (k == self.j) for k, a in enumerate(alpha))
            out = out + alpha[self.j] * self.f._derivative(lower, X)
        return out


# -- maxima over boxes --------------------------------------------------------


def _golden_max(h, lo: np.ndarray, hi: np.ndarray, iters: int = 48):
    """Vectorized golden-section search for maxima of h on the brackets [lo, hi]."""
    a, b = lo.copy(), hi.copy()
    c = b - INV_GOLDEN * (b - a)
    d = a + INV_GOLDEN * (b - a)
    hc, hd = h(c), h(d)
    for _ in range(iters):
        left = hc >= hd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = np.where(left, b - INV_GOLDEN * (b - a), d)
        new_d = np.where(left, c, a + INV_GOLDEN * (b - a))
        hn = h(np.where(left, new_c, new_d))
        hd = np.where(left, hc, hn)
        hc = np.where(left, hn, hd)
        c, d = new_c, new_d
    x = np.where(hc >= hd, c, d)
    return x, np.maximum(hc, hd)


def box_grid(lo, hi, density: float, min_points: int = 201, extra: Sequence = ()) -> np.ndarray:
    """Tensor grid on [lo, hi] including its corners, plus the ``extra`` points inside it."""
    lo, hi = np.atleast_1d(np.asarray(lo, float)), np.atleast_1d(np.asarray(hi, float))
    axes = []
    for l, h in zip(lo, hi):
        n = max(int(math.ceil((h - l) * density)) + 1, min_points if len(lo) == 1 else max(21, min_points // 8))
        axes.append(np.linspace(l, h, n))
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    extra = np.asarray(extra, float).reshape(-1, len(lo)) if len(extra) else np.zeros((0, len(lo)))
    keep = np.all((extra >= lo) & (extra <= hi), axis=1)
    return np.vstack([mesh, extra[keep]])


def derivative_candidates(
    f: TestFunction, alpha, lo, hi, density: float = 400.0, weight_power: float = 0.0, refine: bool = True, extra=()
) -> tuple[np.ndarray, np.ndarray]:
    """Points of [lo, hi] and the values (1 + |x|^2)^weight_power |d^alpha f(x)| there.

    The points are a grid plus ``extra``; in one variable every grid local
    maximum is polished by golden-section search and the polished point is
    appended. Each value is attained, so any max over them is a lower bound.
    """
    lo, hi = np.atleast_1d(np.asarray(lo, float)), np.atleast_1d(np.asarray(hi, float))
    if np.any(hi < lo):
        return np.zeros((0, f.dim)), np.zeros(0)
    X = box_grid(lo, hi, density, extra=extra)

    def h(pts):
        pts = pts.reshape(-1, f.dim)
        val = np.abs(f._derivative(alpha, pts))
        if weight_power:
            val = val * (1.0 + np.sum(pts * pts, axis=1)) ** weight_power
        return val

    vals = h(X)
    if refine and f.dim == 1 and len(X) > 2:
        order = np.argsort(X[:, 0])
        xs, vs = X[order, 0], vals[order]
        peak = np.flatnonzero((vs[1:-1] >= vs[:-2]) & (vs[1:-1] >= vs[2:]) & (vs[1:-1] > 0)) + 1
        if peak.size:
            xr, vr = _golden_max(h, xs[peak - 1], xs[peak + 1])
            X = np.vstack([X, xr.reshape(-1, 1)])
            vals = np.concatenate([vals, vr])
    return X, vals


def max_abs_derivative(
    f: TestFunction, alpha, lo, hi, density: float = 400.0, weight_power: float = 0.0, refine: bool = True, extra=()
) -> tuple[float, np.ndarray | None]:
    """max of (1 + |x|^2)^weight_power |d^alpha f(x)| over [lo, hi], as a lower bound, with its argmax."""
    X, vals = derivative_candidates(f, alpha, lo, hi, density, weight_power, refine, extra)
    if not len(vals):
        return 0.0, None
    k = int(np.argmax(vals))
    return float(vals[k]), X[k]


# -- Frechet metric on C^inf(Omega) / D(Omega) --------------------------------


def default_truncation(a: float, tail: float = 1e-9) -> int:
    """Smallest I with a^-I/(a-1) below ``tail`` up to the rounding of the closed form."""
    return max(1, math.ceil(math.log(tail * (a - 1.0)) / math.log(1.0 / a)))


@dataclass(frozen=True)
class FrechetMetricParams:
    """Parameters of max( sum_{i<=I} a^-i p_i/(b + p_i), p_N ).

    ``domain`` is a box (lo, hi) for bounded Omega or None for R^dim. For the
    ``C_inf`` variant, K_i shrinks a bounded box by width/(2(i+1)) on each
    side, or is [-i*step, i*step]^dim on R^dim. The ``D`` variant takes every
    sup over all of Omega. ``anchors`` are added to every grid they fall in.
    """

    a: float = 10.0
    b: float = 1.0
    N: int = 2
    I: int | None = None
    dim: int = 1
    domain: tuple | None = None
    step: float = 1.0
    variant: str = "C_inf"
    grid_density: float = 400.0
    anchors: tuple = ()

    def __post_init__(self):
        if not self.a > 1:
            raise ConfigInvalid(f"a must exceed 1, got {self.a}")
        if not self.b > 0:
            raise ConfigInvalid(f"b must be positive, got {self.b}")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigInvalid("N must be a positive integer")
        if self.variant not in ("C_inf", "D"):
            raise ConfigInvalid(f"unknown metric variant {self.variant!r}")
        if self.I is None:
            object.__setattr__(self, "I", default_truncation(self.a))
        if self.I < 1:
            raise ConfigInvalid("truncation index must be positive")
        if self.domain is not None:
            lo, hi = (tuple(float(v) for v in np.atleast_1d(side)) for side in self.domain)
            if len(lo) != self.dim or any(h <= l for l, h in zip(lo, hi)):
                raise ConfigInvalid("domain must be a nonempty box of the right dimension")
            object.__setattr__(self, "domain", (lo, hi))
        object.__setattr__(self, "anchors", tuple(tuple(float(v) for v in np.atleast_1d(p)) for p in self.anchors))

    @property
    def tail_bound(self) -> float:
        return self.a ** (-self.I) / (self.a - 1.0)

    @property
    def top_order(self) -> int:
        return max(self.I, self.N)

    def K(self, i: int) -> tuple[np.ndarray, np.ndarray] | None:
        """The compact box K_i, or None for the whole of unbounded Omega."""
        if self.variant == "D":
            if self.domain is None:
                return None
            return np.array(self.domain[0]), np.array(self.domain[1])
        if self.domain is None:
            half = i * self.step
            return np.full(self.dim, -half), np.full(self.dim, half)
        lo, hi = np.array(self.domain[0]), np.array(self.domain[1])
        shrink = (hi - lo) / (2.0 * (i + 1))
        return lo + shrink, hi - shrink

    def contains(self, i: int, x) -> bool:
        box = self.K(i)
        if box is None:
            return True
        x = np.atleast_1d(np.asarray(x, float))
        return bool(np.all(x >= box[0]) and np.all(x <= box[1]))


def _search_box(f: TestFunction, box):
    """K intersected with the support of f; None if empty."""
    sup = f.support
    if box is None:
        if sup is None:
            raise GridTooSmall("a sup over unbounded Omega needs a compactly supported function")
        return np.array(sup[0]), np.array(sup[1])
    lo, hi = box
    if sup is not None:
        lo, hi = np.maximum(lo, sup[0]), np.minimum(hi, sup[1])
        if np.any(hi < lo):
            return None
    return lo, hi


def seminorm_table(f: TestFunction, params: FrechetMetricParams, top: int | None = None) -> tuple:
    """(p_0, ..., p_top) from one candidate set per multi-index on the largest box.

    Every K_i corner is on the grid, so restricting the candidates to K_i
    keeps the box boundary in view.
    """
    top = params.top_order if top is None else top
    if top > f.max_order:
        raise OrderExceedsOracle(f"p_{top} needs derivatives of order {top}; oracle stops at {f.max_order}")
    cache = f.__dict__.setdefault("_seminorm_cache", {})
    key = ("p", params, top)
    if key in cache:
        return cache[key]
    if f.is_zero:
        cache[key] = (0.0,) * (top + 1)
        return cache[key]
    boxes = [_search_box(f, params.K(max(i, 1))) for i in range(top + 1)]
    live = [bx for bx in boxes if bx is not None]
    if not live:
        cache[key] = (0.0,) * (top + 1)
        return cache[key]
    lo = np.min([bx[0] for bx in live], axis=0)
    hi = np.max([bx[1] for bx in live], axis=0)
    corners = [c for bx in live for c in (bx[0], bx[1])] if f.dim == 1 else []
    extra = list(params.anchors) + [tuple(c) for c in corners]
    table = np.zeros(top + 1)
    for alpha in multi_indices(f.dim, top):
        X, vals = derivative_candidates(f, alpha, lo, hi, params.grid_density, extra=extra)
        order = sum(alpha)
        for i in range(order, top + 1):
            bx = boxes[i]
            if bx is None:
                continue
            inside = np.all((X >= bx[0] - 1e-15) & (X <= bx[1] + 1e-15), axis=1)
            if inside.any():
                table[i] = max(table[i], float(vals[inside].max()))
    cache[key] = tuple(float(v) for v in table)
    return cache[key]


def seminorm_p_i(f: TestFunction, i: int, params: FrechetMetricParams) -> float:
    """max |d^alpha f| over K_i and |alpha| <= i (grid maximum, a lower bound)."""
    if i > f.max_order:
        raise OrderExceedsOracle(f"p_{i} needs derivatives of order {i}; oracle stops at {f.max_order}")
    return seminorm_table(f, params, max(i, min(params.top_order, f.max_order)))[i]


@dataclass(frozen=True)
class MetricValue:
    """A truncated series metric; ``tail_bound`` bounds the omitted terms."""

    value: float
    series: float
    top_term: float
    tail_bound: float
    seminorms: tuple = field(default=(), compare=False)


def frechet_from_seminorms(seminorms: Sequence[float], base: float, offset: float, top: float, start: int = 1) -> tuple[float, float]:
    """(series, max(series, top)) for sum_j base^-(start+j) s_j/(offset + s_j)."""
    s = np.asarray(seminorms, float)
    k = np.arange(start, start + len(s))
    series = float(np.sum(base ** (-k.astype(float)) * s / (offset + s))) if len(s) else 0.0
    return series, max(series, float(top))


def frechet_metric(f: TestFunction, g: TestFunction, params: FrechetMetricParams) -> MetricValue:
    h = f - g
    return frechet_norm(h, params)


def frechet_norm(h: TestFunction, params: FrechetMetricParams) -> MetricValue:
    """d(h, 0)."""
    if h.is_zero:
        return MetricValue(0.0, 0.0, 0.0, params.tail_bound, ())
    p = seminorm_table(h, params)
    series, value = frechet_from_seminorms(p[1 : params.I + 1], params.a, params.b, p[params.N])
    return MetricValue(value, series, p[params.N], params.tail_bound, p)


# -- Schwartz seminorms and metric --------------------------------------------


@dataclass(frozen=True)
class SchwartzParams:
    """max( sum_{k<=I} b^-k ||.||_k/(a + ||.||_k), ||.||_N ) with a > 0, b > 1; sups over [-R, R]^dim."""

    a: float = 1.0
    b: float = 10.0
    N: int = 1
    I: int | None = None
    dim: int = 1
    window: float = 12.0
    grid_density: float = 100.0
    decay_tol: float = 1e-12

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigInvalid("a must be positive")
        if not self.b > 1:
            raise ConfigInvalid("b must exceed 1")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigInvalid("N must be a positive integer")
        if self.I is None:
            object.__setattr__(self, "I", default_truncation(self.b))

    @property
    def tail_bound(self) -> float:
        return self.b ** (-(self.I + 1)) / (1.0 - 1.0 / self.b)


def schwartz_seminorm(f: TestFunction, k: int, window: float = 12.0, density: float = 100.0, decay_tol: float = 1e-12) -> float:
    """sup over |alpha| <= k and x of (1 + |x|^2)^k |d^alpha f(x)| on [-window, window]^dim.

    Raises GridTooSmall when the weighted envelope on the window boundary is
    not below ``decay_tol`` times the interior maximum.
    """
    if k > f.max_order:
        raise OrderExceedsOracle(f"order {k} exceeds the oracle limit {f.max_order}")
    if f.is_zero:
        return 0.0
    cache = f.__dict__.setdefault("_seminorm_cache", {})
    key = ("schwartz", k, window, density, decay_tol)
    if key in cache:
        return cache[key]
    lo, hi = np.full(f.dim, -window), np.full(f.dim, window)
    best, edge = 0.0, 0.0
    for alpha in multi_indices(f.dim, k):
        v, _ = max_abs_derivative(f, alpha, lo, hi, density, weight_power=k)
        best = max(best, v)
        edge = max(edge, _boundary_max(f, alpha, window, k))
    if best > 0 and edge > decay_tol * best:
        raise GridTooSmall(f"weighted envelope {edge:.2e} at |x| = {window} is not negligible")
    cache[key] = best
    return best


def _boundary_max(f: TestFunction, alpha, window: float, k: int) -> float:
    if f.dim == 1:
        X = np.array([[-window], [window]])
    else:
        side = np.linspace(-window, window, 41)
        faces = []
        for j in range(f.dim):
            for s in (-window, window):
                grids = np.meshgrid(*[side] * (f.dim - 1), indexing="ij")
                P = np.stack([g.ravel() for g in grids], axis=1) if f.dim > 1 else np.zeros((1, 0))
                faces.append(np.insert(P, j, s, axis=1))
        X = np.vstack(faces)
    vals = np.abs(f._derivative(alpha, X)) * (1.0 + np.sum(X * X, axis=1)) ** k
    return float(vals.max())


def schwartz_norm(h: TestFunction, params: SchwartzParams) -> MetricValue:
    if h.is_zero:
        return MetricValue(0.0, 0.0, 0.0, params.tail_bound, ())
    top = max(params.I, params.N)
    s = [schwartz_seminorm(h, k, params.window, params.grid_density, params.decay_tol) for k in range(top + 1)]
    series, value = frechet_from_seminorms(s[: params.I + 1], params.b, params.a, s[params.N], start=0)
    return MetricValue(value, series, s[params.N], params.tail_bound, tuple(s))


def schwartz_metric(f: TestFunction, g: TestFunction, params: SchwartzParams) -> MetricValue:
    return schwartz_norm(f - g, params)
