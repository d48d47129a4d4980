"""The ratio metric on mappings between metric spaces and the mapping algebra under *.

Points of X may be vectors or any objects the metric descriptors accept
(test functions, for instance); nothing here assumes coordinates except the
linear-bridge check, which needs X to support + and scalar *.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .errors import EmptySamples, HypothesisViolated, NotAlgebra, NotCauchy, NotConverging, NotLinearOnProbes, NotUnital
from .opspace import Certificate, NormEstimate, OperatorHandle
from .spaces import TOL_EXACT, FiniteSpace, MetricDescriptor, SampleSet, close, leq, norm_metric

OVERFLOW = 1e15


class MappingHandle:
    """A map X -> Y between metric spaces, value at the origin cached."""

    def __init__(self, evaluator: Callable, zero_x: Any, linear: bool | None = None, name: str = "F"):
        self._evaluator = evaluator
        self.zero_x = zero_x
        self.linear = linear
        self.name = name
        self.value_at_zero = evaluator(zero_x)

    @classmethod
    def from_operator(cls, F: OperatorHandle) -> MappingHandle:
        return cls(F, F.domain.zero(), F.linear, F.name)

    def __call__(self, x):
        return self._evaluator(x)

    def __repr__(self):
        return f"MappingHandle({self.name})"

    def __add__(self, other: MappingHandle) -> MappingHandle:
        lin = self.linear and other.linear
        return MappingHandle(lambda x: self(x) + other(x), self.zero_x, lin, f"({self.name}+{other.name})")

    def __sub__(self, other: MappingHandle) -> MappingHandle:
        lin = self.linear and other.linear
        return MappingHandle(lambda x: self(x) - other(x), self.zero_x, lin, f"({self.name}-{other.name})")

    def __rmul__(self, alpha) -> MappingHandle:
        return MappingHandle(lambda x: alpha * self(x), self.zero_x, self.linear, f"{alpha}*{self.name}")

    def __neg__(self) -> MappingHandle:
        return -1.0 * self


# -- normed algebras for Y ----------------------------------------------------


@dataclass(frozen=True)
class ScalarAlgebra:
    """R or C with |.|."""

    complex_field: bool = False

    def multiply(self, a, b):
        return a * b

    def norm(self, a) -> float:
        return float(np.abs(a))

    def unit(self):
        return 1.0 + 0j if self.complex_field else 1.0

    def zero(self):
        return 0.0 + 0j if self.complex_field else 0.0

    @property
    def unit_norm(self) -> float:
        return 1.0


@dataclass(frozen=True)
class MatrixAlgebra:
    """n x n matrices; ``induced_inf`` (max row sum) is unital with ||I|| = 1, Frobenius is not."""

    n: int
    norm_kind: str = "induced_inf"

    def multiply(self, a, b):
        return np.asarray(a) @ np.asarray(b)

    def norm(self, a) -> float:
        a = np.abs(np.asarray(a))
        if self.norm_kind == "frobenius":
            return float(np.sqrt((a * a).sum()))
        return float(a.sum(axis=1).max())

    def unit(self):
        return np.eye(self.n)

    def zero(self):
        return np.zeros((self.n, self.n))

    @property
    def unit_norm(self) -> float:
        return self.norm(self.unit())


@dataclass
class MappingMetric:
    """d(F1, F2) = max( sup_{x != 0} d_Y(F1 x, F2 x) / d_X(x, 0), d_Y(F1 0, F2 0) ) over ``samples``.

    ``algebra`` is set when Y is a normed algebra; d_Y is then its norm metric.
    """

    d_X: MetricDescriptor
    samples: Sequence
    zero_x: Any
    zero_y: Any = None
    d_Y: MetricDescriptor | None = None
    algebra: ScalarAlgebra | MatrixAlgebra | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.d_Y is None:
            if self.algebra is None:
                raise ValueError("need d_Y or a normed algebra for Y")
            alg = self.algebra
            self.d_Y = MetricDescriptor(lambda a, b: alg.norm(np.asarray(a) - np.asarray(b)), True, name="algebra norm")
        if self.zero_y is None and self.algebra is not None:
            self.zero_y = self.algebra.zero()
        self.samples = list(self.samples)
        self._dx0 = np.array([self.d_X(x, self.zero_x) for x in self.samples])

    @property
    def distances_to_origin(self) -> np.ndarray:
        return self._dx0

    def with_samples(self, extra: Sequence) -> MappingMetric:
        return MappingMetric(self.d_X, list(self.samples) + list(extra), self.zero_x, self.zero_y, self.d_Y, self.algebra, self.seed)

    def zero_mapping(self) -> MappingHandle:
        zy = self.zero_y
        return MappingHandle(lambda x: zy, self.zero_x, True, "0")


def normed_mapping_metric(X: FiniteSpace, Y: FiniteSpace, samples: SampleSet) -> MappingMetric:
    """The norm-induced instance, on which d(F, 0) is the operator norm p."""
    return MappingMetric(norm_metric(X), list(samples.points), X.zero(), Y.zero(), norm_metric(Y), seed=samples.seed)


def metric_d(F1, F2, mm: MappingMetric) -> NormEstimate:
    """Sampled d(F1, F2); ratios beyond 1e15 are reported as +inf with the witnessing sample."""
    if not mm.samples:
        raise EmptySamples("no samples")
    dY = mm.d_Y
    zero_term = dY(F1(mm.zero_x), F2(mm.zero_x))
    best, witness = 0.0, None
    for x, dx in zip(mm.samples, mm.distances_to_origin):
        if dx <= 0:
            continue
        r = dY(F1(x), F2(x)) / dx
        if r > best:
            best, witness = r, x
    cert = Certificate("sampled_lower_bound", seed=mm.seed, sample_count=len(mm.samples))
    if best > OVERFLOW:
        cert = Certificate("sampled_lower_bound", seed=mm.seed, sample_count=len(mm.samples), tag="ratio overflow")
        return NormEstimate(np.inf, cert, "d", witness, np.inf, zero_term)
    return NormEstimate(max(best, zero_term), cert, "d", witness, best, zero_term)


def mapping_norm(F, mm: MappingMetric) -> float:
    return metric_d(F, mm.zero_mapping(), mm).value


# -- membership ---------------------------------------------------------------


@dataclass(frozen=True)
class MembershipReport:
    near_ratios: np.ndarray
    near_slope: float
    diverging: bool
    far_max: float
    ball_results: list
    finite_evidence: bool


def check_membership_criteria(
    F,
    mm: MappingMetric,
    near_zero_samples: Sequence,
    far_samples: Sequence,
    ball_pairs: Sequence[tuple[float, float]],
) -> MembershipReport:
    """Evidence for d(F, 0) < inf: bounded ratios near 0, bounded images far out, balls into balls.

    Near-zero ratios d_Y(F x, 0)/d_X(x, 0) count as diverging when they grow by
    more than 10x along the ladder with a log-log slope at or below -1/2.
    """
    zero_y = mm.zero_y
    near = sorted(near_zero_samples, key=lambda x: -mm.d_X(x, mm.zero_x))
    dx = np.array([mm.d_X(x, mm.zero_x) for x in near])
    ny = np.array([mm.d_Y(F(x), zero_y) for x in near])
    ratios = ny / dx
    slope = 0.0
    if len(near) >= 2 and np.all(ratios > 0):
        slope = float(np.polyfit(np.log(dx), np.log(ratios), 1)[0])
    diverging = bool(len(near) >= 2 and (ratios[-1] > 10 * ratios[0] or not np.isfinite(ratios[-1])) and slope <= -0.5)
    far_max = max((mm.d_Y(F(x), zero_y) for x in far_samples), default=0.0)
    pool = list(near) + list(far_samples) + list(mm.samples) + [mm.zero_x]
    pool_dx = [mm.d_X(x, mm.zero_x) for x in pool]
    pool_dy = [mm.d_Y(F(x), zero_y) for x in pool]
    balls = []
    for e1, e2 in ball_pairs:
        worst = max((dy for dxi, dy in zip(pool_dx, pool_dy) if dxi <= e1), default=0.0)
        balls.append({"eps1": e1, "eps2": e2, "max_image": worst, "inside": worst <= e2})
    finite = not diverging and all(b["inside"] for b in balls) and np.isfinite(far_max)
    return MembershipReport(ratios, slope, diverging, float(far_max), balls, bool(finite))


# -- linear bridge ------------------------------------------------------------


@dataclass(frozen=True)
class BridgeVerdict:
    d_hat: float
    worst_margin: float
    pairs: int
    holds: bool


def check_linear_bridge(F: MappingHandle, mm: MappingMetric, probe_pairs: Sequence, tol: float = 1e-9) -> BridgeVerdict:
    """d_Y(F x1, F x2) <= d_hat(F, 0) d_X(x1 - x2, 0) with every difference x1 - x2 in the sample set."""
    if not mm.d_Y.translation_invariant:
        raise HypothesisViolated("d_Y must be translation invariant")
    dY = mm.d_Y
    for x1, x2 in probe_pairs:
        for a in (2.0, -0.5):
            lhs, rhs = F(a * x1 + x2), a * F(x1) + F(x2)
            scale = max(1.0, dY(lhs, mm.zero_y), dY(rhs, mm.zero_y))
            if dY(lhs, rhs) > tol * scale:
                raise NotLinearOnProbes(f"{F.name} is not linear on the probes")
    diffs = [x1 - x2 for x1, x2 in probe_pairs]
    closed = mm.with_samples(diffs)
    d_hat = metric_d(F, closed.zero_mapping(), closed).value
    worst = np.inf
    for x1, x2 in probe_pairs:
        lhs = dY(F(x1), F(x2))
        rhs = d_hat * closed.d_X(x1 - x2, closed.zero_x)
        worst = min(worst, (rhs - lhs) / max(1.0, abs(rhs)))
    return BridgeVerdict(d_hat, float(worst), len(probe_pairs), bool(worst >= -tol))


# -- normed structure ---------------------------------------------------------


@dataclass(frozen=True)
class NormStructureVerdict:
    homogeneity_gap: float
    triangle_excess: float
    zero_iff_vanishing: bool
    translation_gap: float
    holds: bool


def norm_structure_check(
    mm: MappingMetric, F1, F2, F3=None, scalars: Sequence = (2.0, -3.0, 0.5), tol: float = TOL_EXACT
) -> NormStructureVerdict:
    """||F|| := d(F, 0) is a norm on the shared samples and d is translation invariant."""
    n = lambda F: mapping_norm(F, mm)
    n1, n2 = n(F1), n(F2)
    hom = 0.0
    for a in scalars:
        v = n(a * F1)
        hom = max(hom, abs(v - abs(a) * n1) / max(1.0, v))
    s = n(F1 + F2)
    tri = max(0.0, (s - n1 - n2) / max(1.0, s))
    pts = list(mm.samples) + [mm.zero_x]
    vanishes = all(mm.d_Y(F1(x), mm.zero_y) == 0 for x in pts)
    zero_ok = (n1 == 0) == vanishes
    F3 = F3 if F3 is not None else F2
    a, b = metric_d(F1 + F3, F2 + F3, mm).value, metric_d(F1, F2, mm).value
    trans = abs(a - b) / max(1.0, a, b)
    return NormStructureVerdict(hom, tri, zero_ok, trans, hom <= tol and tri <= tol and zero_ok and trans <= tol)


# -- completeness -------------------------------------------------------------


@dataclass(frozen=True)
class CompletenessVerdict:
    tail_diameters: list
    limit_distances: list
    converged: bool


def completeness_harness(seq: Sequence, limit, mm: MappingMetric, threshold: float = 1e-9) -> CompletenessVerdict:
    """Cauchy on the samples (tail diameters below ``threshold``) and d(F_n, limit) -> 0."""
    n = len(seq)
    if n < 2:
        raise NotCauchy("need at least two terms")
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = metric_d(seq[i], seq[j], mm).value
    tails = [float(D[k:, k:].max()) for k in range(n - 1)]
    if not tails[-1] < threshold:
        raise NotCauchy(f"tail diameter {tails[-1]:.3e} stays above {threshold}")
    dist = [metric_d(F, limit, mm).value for F in seq]
    if not dist[-1] < threshold:
        raise NotConverging(f"final distance {dist[-1]:.3e} to the proposed limit")
    return CompletenessVerdict(tails, dist, True)


# -- the * algebra ------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraElement:
    mapping: MappingHandle
    unit_flag: bool = False

    def __call__(self, x):
        return self.mapping(x)


def _need_algebra(mm: MappingMetric):
    if mm.algebra is None:
        raise NotAlgebra("Y carries no multiplication")
    return mm.algebra


def as_element(F, mm: MappingMetric) -> AlgebraElement:
    if isinstance(F, AlgebraElement):
        return F
    if isinstance(F, MappingHandle):
        return AlgebraElement(F)
    return AlgebraElement(MappingHandle(F, mm.zero_x))


def star_multiply(F1, F2, mm: MappingMetric) -> AlgebraElement:
    """(F1 * F2)(x) = F1(x) F2(x) / d_X(x, 0), and F1(0) F2(0) at the origin."""
    alg = _need_algebra(mm)
    A, B = as_element(F1, mm), as_element(F2, mm)
    zero_x, dX = mm.zero_x, mm.d_X

    def ev(x):
        r = dX(x, zero_x)
        prod = alg.multiply(A(x), B(x))
        return prod if r == 0 else prod / r

    return AlgebraElement(MappingHandle(ev, zero_x, False, f"{A.mapping.name}*{B.mapping.name}"))


def unit_element(mm: MappingMetric) -> AlgebraElement:
    """e(x) = d_X(x, 0) 1_Y and e(0) = 1_Y."""
    alg = _need_algebra(mm)
    if alg.unit_norm != 1.0:
        raise NotUnital(f"||1_Y|| = {alg.unit_norm}, not 1")
    one, zero_x, dX = alg.unit(), mm.zero_x, mm.d_X
    return AlgebraElement(MappingHandle(lambda x: one if dX(x, zero_x) == 0 else dX(x, zero_x) * one, zero_x, False, "e"), True)


@dataclass(frozen=True)
class AlgebraVerdict:
    assoc_gap: float
    distrib_gap: float
    submult_margin: float
    unit_gap: float
    holds: bool


def algebra_laws(F1, F2, F3, mm: MappingMetric, tol: float = TOL_EXACT) -> AlgebraVerdict:
    """Associativity, distributivity, the unit law (pointwise) and submultiplicativity of d(., 0)."""
    alg = _need_algebra(mm)
    A, B, C = (as_element(F, mm) for F in (F1, F2, F3))
    pts = list(mm.samples) + [mm.zero_x]

    def gap(P, Q):
        g = 0.0
        for x in pts:
            p, q = P(x), Q(x)
            g = max(g, alg.norm(np.asarray(p) - np.asarray(q)) / max(1.0, alg.norm(p), alg.norm(q)))
        return g

    AB_C = star_multiply(star_multiply(A, B, mm), C, mm)
    A_BC = star_multiply(A, star_multiply(B, C, mm), mm)
    BC = AlgebraElement(B.mapping + C.mapping)
    left = star_multiply(A, BC, mm)
    right = AlgebraElement(star_multiply(A, B, mm).mapping + star_multiply(A, C, mm).mapping)
    e = unit_element(mm) if alg.unit_norm == 1.0 else None
    unit_gap = 0.0 if e is None else max(gap(star_multiply(A, e, mm), A), gap(star_multiply(e, A, mm), A))
    nAB = mapping_norm(star_multiply(A, B, mm).mapping, mm)
    nA, nB = mapping_norm(A.mapping, mm), mapping_norm(B.mapping, mm)
    margin = (nA * nB - nAB) / max(1.0, nAB)
    ag, dg = gap(AB_C, A_BC), gap(left, right)
    return AlgebraVerdict(ag, dg, margin, unit_gap, ag <= tol and dg <= tol and margin >= -tol and unit_gap <= tol)
