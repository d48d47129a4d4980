"""Functionals on test functions: point evaluations, derivative evaluations, integral kernels.

Norms are reported as a sandwich: a sampled lower bound max |L(f)|/d(f, 0)
over a probe family and, where an analytic chain exists, an upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NoUpperBoundAvailable, OrderExceedsOracle, SupportNotCovered
from .metricmaps import MappingHandle, MappingMetric, ScalarAlgebra, star_multiply
from .quadrature import integrate
from .spaces import MetricDescriptor
from .testfn import Bump, FrechetMetricParams, TestFunction, ZeroFunction, frechet_norm


class FunctionalHandle:
    """A functional on test functions; ``label`` is a tuple such as ("delta", c)."""

    def __init__(self, evaluator: Callable[[TestFunction], complex], label: tuple = ("user",), bound: Callable | None = None):
        self._evaluator = evaluator
        self.label = label
        self._bound = bound

    def __call__(self, f: TestFunction) -> complex:
        if f.is_zero:
            return 0.0 + 0j
        return complex(self._evaluator(f))

    def __repr__(self):
        return f"FunctionalHandle{self.label}"

    def upper_bound(self, params: FrechetMetricParams) -> float:
        """Analytic bound on sup |L(f)|/d(f, 0), or NoUpperBoundAvailable."""
        if self._bound is None:
            raise NoUpperBoundAvailable(f"no analytic chain for {self.label}")
        return self._bound(params)


def zero_functional() -> FunctionalHandle:
    return FunctionalHandle(lambda f: 0.0, ("zero",), lambda params: 0.0)


def _point(c) -> np.ndarray:
    return np.atleast_1d(np.asarray(c, dtype=float))


def _in_K_N(params: FrechetMetricParams, x) -> bool:
    if params.variant == "D" and params.domain is not None:
        lo, hi = params.domain
        x = _point(x)
        return bool(np.all(x > lo) and np.all(x < hi))
    return params.contains(params.N, x)


def eval_delta(c, f: TestFunction) -> complex:
    return complex(f(_point(c)) if f.dim > 1 else f(float(_point(c)[0])))


def delta(c) -> FunctionalHandle:
    """delta_c(f) = f(c); bounded by 1 when c lies in K_N (in Omega for the D variant)."""
    c = _point(c)

    def bound(params):
        if not _in_K_N(params, c):
            raise NoUpperBoundAvailable(f"c = {c} is outside K_N")
        return 1.0

    return FunctionalHandle(lambda f: eval_delta(c, f), ("delta", tuple(float(v) for v in c)), bound)


def eval_deriv_delta(k, f: TestFunction) -> complex:
    """(-1)^|k| d^k f(0)."""
    k = tuple(int(v) for v in np.atleast_1d(k))
    if sum(k) > f.max_order:
        raise OrderExceedsOracle(f"order {sum(k)} exceeds the oracle limit {f.max_order}")
    zero = np.zeros(f.dim)
    val = f.derivative(k, zero if f.dim > 1 else 0.0)
    return complex((-1) ** sum(k) * val)


def deriv_delta(k) -> FunctionalHandle:
    k = tuple(int(v) for v in np.atleast_1d(k))

    def bound(params):
        if sum(k) > params.N or not _in_K_N(params, np.zeros(len(k))):
            raise NoUpperBoundAvailable("needs |k| <= N and 0 in K_N")
        return 1.0

    return FunctionalHandle(lambda f: eval_deriv_delta(k, f), ("deriv_delta", k), bound)


@dataclass(frozen=True)
class IntegralKernel:
    """A kernel m on the interval ``support`` = (lo, hi), integrated by composite Gauss-Legendre."""

    m: Callable[[np.ndarray], np.ndarray]
    support: tuple
    breakpoints: tuple = ()
    tol: float = 1e-11
    name: str = "m"
    L1_norm: float = field(init=False)
    L1_error: float = field(init=False)

    def __post_init__(self):
        lo, hi = (float(v) for v in self.support)
        object.__setattr__(self, "support", (lo, hi))
        res = integrate(lambda t: np.abs(self.m(t)), lo, hi, self.tol, breakpoints=self.breakpoints)
        object.__setattr__(self, "L1_norm", float(res.value))
        object.__setattr__(self, "L1_error", res.error)


def ramp_kernel(n: int, c: float = 0.0) -> IntegralKernel:
    """lambda_n(t) = n (t - c) on [c, c + 1/n]; its L1 norm is 1/(2n)."""
    return IntegralKernel(lambda t: n * (np.asarray(t) - c), (c, c + 1.0 / n), name=f"ramp{n}")


def eval_lambda_m(kernel: IntegralKernel, f: TestFunction, tol: float = 1e-11) -> tuple[complex, float]:
    """(integral of m f over the overlap of the supports, error bound)."""
    if f.dim != 1:
        raise ValueError("integral functionals are implemented on the line")
    lo, hi = kernel.support
    if f.support is not None:
        lo, hi = max(lo, f.support[0][0]), min(hi, f.support[1][0])
    if hi <= lo:
        return 0.0 + 0j, 0.0
    res = integrate(lambda t: kernel.m(t) * f(t), lo, hi, tol, breakpoints=kernel.breakpoints)
    return complex(res.value), res.error


def integral(kernel: IntegralKernel) -> FunctionalHandle:
    """Lambda_m; bounded by ||m||_L1 when supp m lies in K_N (always, for the D variant)."""

    def bound(params):
        lo, hi = kernel.support
        if params.variant == "D" or (params.contains(params.N, lo) and params.contains(params.N, hi)):
            return kernel.L1_norm + kernel.L1_error
        raise NoUpperBoundAvailable("supp m is not inside K_N")

    return FunctionalHandle(lambda f: eval_lambda_m(kernel, f)[0], ("integral", kernel.name), bound)


def check_functional_linearity(L: FunctionalHandle, pairs: Sequence, scalars=(2.0, -0.5 + 1j), tol: float = 1e-9) -> float:
    """Largest relative gap |L(a f + g) - a L(f) - L(g)| over the probe pairs."""
    worst = 0.0
    for f, g in pairs:
        lf, lg = L(f), L(g)
        for a in scalars:
            lhs = L(a * f + g)
            rhs = a * lf + lg
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))
    return worst


# -- norms --------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionalNorm:
    lower: float
    upper: float | None
    variant: str
    ratios: np.ndarray
    witness: int | None
    certificate: str

    def as_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "variant": self.variant, "certificate": self.certificate}


def test_function_norm(f: TestFunction, params: FrechetMetricParams) -> float:
    return frechet_norm(f, params).value


test_function_norm.__test__ = False


def functional_norm(L: FunctionalHandle, family: Sequence[TestFunction], params: FrechetMetricParams) -> FunctionalNorm:
    """Sampled lower bound max |L(f)|/d(f, 0) plus the analytic upper bound when one is available."""
    if not family:
        raise ValueError("empty probe family")
    ratios = []
    for f in family:
        d = test_function_norm(f, params)
        ratios.append(abs(L(f)) / d if d > 0 else 0.0)
    ratios = np.array(ratios)
    try:
        upper = L.upper_bound(params)
        cert = "sandwich"
    except NoUpperBoundAvailable:
        upper, cert = None, "sampled_lower_bound"
    k = int(np.argmax(ratios))
    return FunctionalNorm(float(ratios[k]), upper, params.variant, ratios, k, cert)


def test_function_metric(params: FrechetMetricParams) -> MetricDescriptor:
    """d on test functions as a MetricDescriptor (depends only on f - g)."""
    return MetricDescriptor(
        lambda f, g: frechet_norm(f - g, params).value,
        translation_invariant=True,
        name=f"frechet[{params.variant}]",
        zero=ZeroFunction(params.dim),
    )


def functional_mapping_metric(family: Sequence[TestFunction], params: FrechetMetricParams) -> MappingMetric:
    """The mapping-space view: X = test functions with d, Y = C; samples are the family."""
    dX = test_function_metric(params)
    return MappingMetric(dX, list(family), dX.zero, algebra=ScalarAlgebra(complex_field=True))


def as_mapping(L: FunctionalHandle, params: FrechetMetricParams) -> MappingHandle:
    return MappingHandle(L, ZeroFunction(params.dim), True, str(L.label))


# -- Example 2 operators -------------------------------------------------------


def position_operator(L: FunctionalHandle) -> FunctionalHandle:
    """phi -> L(x phi)."""
    return FunctionalHandle(lambda f: L(f.times_coordinate(0)), ("position", L.label))


def momentum_operator(L: FunctionalHandle, alpha: int = 1) -> FunctionalHandle:
    """phi -> (-1)^alpha L(phi^(alpha))."""
    if alpha < 1:
        raise ValueError("alpha must be a positive integer")
    return FunctionalHandle(lambda f: (-1) ** alpha * L(f.differentiated((alpha,))), ("momentum", alpha, L.label))


@dataclass(frozen=True)
class PositionNormReport:
    estimate: float
    bound: float
    per_point: dict
    holds: bool


def position_norm_estimate(
    points: Sequence[float], family: Sequence[TestFunction], params: FrechetMetricParams, tol: float = 1e-12
) -> PositionNormReport:
    """max over c of ||F(delta_c)||/||delta_c|| with both norms on the same family, against sup |c|."""
    per = {}
    for c in points:
        d = delta(c)
        num = functional_norm(position_operator(d), family, params).lower
        den = functional_norm(d, family, params).lower
        if den > 0:
            per[float(c)] = num / den
    est = max(per.values(), default=0.0)
    bound = max(abs(float(c)) for c in points)
    return PositionNormReport(est, bound, per, est <= bound + tol * max(1.0, bound))


@dataclass(frozen=True)
class RampWitness:
    n: int
    c: float = 0.0

    @property
    def L1_norm(self) -> float:
        return 1.0 / (2.0 * self.n)

    def kernel(self) -> IntegralKernel:
        return ramp_kernel(self.n, self.c)


@dataclass(frozen=True)
class WitnessReport:
    n: int
    numerator_lb: float
    denominator_ub: float
    certified_ratio: float
    attains_2n: bool
    path_gap: float
    best_probe: TestFunction | None
    trace: list


def _momentum_value(w: RampWitness, f: TestFunction) -> tuple[complex, complex]:
    """F(Lambda_n)(f) two ways: -int lambda_n f' and the integrated-by-parts -f(c+1/n) + n int f."""
    k = w.kernel()
    direct = -eval_lambda_m(k, f.differentiated((1,)))[0]
    lo, hi = w.c, w.c + 1.0 / w.n
    if f.support is not None:
        lo, hi = max(lo, f.support[0][0]), min(hi, f.support[1][0])
    mass = integrate(lambda t: f(t), lo, hi, 1e-11).value if hi > lo else 0.0
    parts = -complex(f(w.c + 1.0 / w.n)) + w.n * mass
    return complex(direct), parts


def _bump_ratio(w: RampWitness, params, center, radius, sign):
    f = Bump((center,), radius, sign)
    d = test_function_norm(f, params)
    if d == 0:
        return 0.0, f, 0.0
    direct, parts = _momentum_value(w, f)
    return abs(direct) / d, f, abs(direct - parts)


def momentum_witness_ratio(
    witness: RampWitness,
    probe_family: Sequence[TestFunction],
    params: FrechetMetricParams,
    search_steps: int = 12,
) -> WitnessReport:
    """Certified lower bound 2n * max_phi |F(Lambda_n)(phi)|/d(phi, 0) of ||F(Lambda_n)||/||Lambda_n||.

    The denominator uses ||Lambda_n|| <= ||lambda_n||_L1 = 1/(2n). After the
    probe family, a coordinate search over bump center and radius starts from
    the best bump probe; every step is kept in ``trace``.
    """
    lo, hi = witness.c, witness.c + 1.0 / witness.n
    if not (_in_K_N(params, lo) and _in_K_N(params, hi)):
        raise SupportNotCovered(f"[{lo}, {hi}] is not inside K_N")
    best, best_f, gap = 0.0, None, 0.0
    for f in probe_family:
        d = test_function_norm(f, params)
        if d == 0:
            continue
        direct, parts = _momentum_value(witness, f)
        gap = max(gap, abs(direct - parts))
        r = abs(direct) / d
        if r > best:
            best, best_f = r, f
    trace = [("family", best)]
    if isinstance(best_f, Bump) and search_steps:
        center, radius, sign = best_f.center[0], best_f.radius, best_f.amplitude
        dc, dr = radius / 4, radius / 4
        for _ in range(search_steps):
            improved = False
            for cand_c, cand_r in ((center + dc, radius), (center - dc, radius), (center, radius + dr), (center, max(radius - dr, 1e-3))):
                r, f, g = _bump_ratio(witness, params, cand_c, cand_r, sign)
                if r > best and params.contains(params.N, cand_c):
                    best, best_f, center, radius, improved = r, f, cand_c, cand_r, True
                    gap = max(gap, g)
            trace.append(((center, radius), best))
            if not improved:
                dc, dr = dc / 2, dr / 2
    den = witness.L1_norm
    cert = best / den
    return WitnessReport(witness.n, best, den, cert, cert >= 2 * witness.n, gap, best_f, trace)


@dataclass(frozen=True)
class GrowthReport:
    reports: list
    ratios: list
    strictly_increasing: bool
    doubling_factors: list
    at_least_linear: bool


def momentum_growth(ns: Sequence[int], c: float, family: Sequence[TestFunction], params: FrechetMetricParams, factor: float = 1.8) -> GrowthReport:
    reps = [momentum_witness_ratio(RampWitness(n, c), family, params) for n in ns]
    ratios = [r.certified_ratio for r in reps]
    inc = all(b > a for a, b in zip(ratios, ratios[1:]))
    factors = [b / a if a > 0 else np.inf for a, b in zip(ratios, ratios[1:])]
    return GrowthReport(reps, ratios, inc, factors, inc and all(f > factor for f in factors))


# -- squares under * -----------------------------------------------------------


def star_square(L: FunctionalHandle, params: FrechetMetricParams) -> FunctionalHandle:
    """(L * L)(f) = L(f)^2 / d(f, 0), and L(0)^2 at f = 0."""
    mm = MappingMetric(test_function_metric(params), [], ZeroFunction(params.dim), algebra=ScalarAlgebra(True))
    m = as_mapping(L, params)
    prod = star_multiply(m, m, mm)
    return FunctionalHandle(lambda f: prod(f), ("star_square", L.label))


def additivity_gap(L: FunctionalHandle, f: TestFunction, g: TestFunction) -> float:
    return abs(L(f + g) - L(f) - L(g))
