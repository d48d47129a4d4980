"""M-contraction estimates, topology boundedness and uniform-boundedness checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import HypothesisViolated, NotConverging, SpaceMismatch
from .opspace import P, OperatorHandle, estimate_norm
from .spaces import TOL_EXACT, SampleSet, leq

DEFAULT_SCALARS = tuple(s * 2.0**j for j in range(-3, 4) for s in (1.0, -1.0))


@dataclass(frozen=True)
class ContractionReport:
    M_hat: float
    witnesses: list
    finite: bool
    pairs_checked: int = 0


def _contraction_pairs(F: OperatorHandle, pairs) -> ContractionReport:
    best, wit, finite, count = 0.0, [], True, 0
    for k, x in pairs:
        fx = float(F.codomain.norm(F(x)))
        fkx = float(F.codomain.norm(F(k * x)))
        count += 1
        if fx == 0.0:
            if fkx > 0.0:
                if finite:
                    wit = []
                finite = False
                wit.append((k, x))
            continue
        if not finite:
            continue
        r = fkx / (abs(k) * fx)
        if r > best:
            best, wit = r, [(k, x)]
        elif r == best:
            wit.append((k, x))
    return ContractionReport(best if finite else np.inf, wit, finite, count)


def estimate_M(F: OperatorHandle, samples: SampleSet, scalars: Sequence = DEFAULT_SCALARS) -> ContractionReport:
    """Smallest M consistent with ||F(kx)|| <= M |k| ||F(x)|| on the sampled (k, x) pairs."""
    nz = samples.nonzero
    return _contraction_pairs(F, [(k, x) for x in nz for k in scalars if k != 0])


def check_topology_bounded(F: OperatorHandle, radii: Sequence[float], samples) -> dict:
    """For each radius r, max ||F(x)|| over samples with ||x|| <= r.

    ``samples`` is a SampleSet or a callable radius -> SampleSet.
    """
    out = {}
    for r in radii:
        s = samples(r) if callable(samples) else samples
        pts = s.points[s.norms <= r]
        out[r] = float(np.max(F.codomain.norm(F.images(pts)))) if len(pts) else 0.0
    return out


def close_under_normalization(samples: SampleSet) -> SampleSet:
    nz = samples.nonzero
    norms = samples.space.norm(nz)
    return samples.union(nz / np.reshape(norms, (-1, 1))).with_zero()


@dataclass(frozen=True)
class TopologyBoundVerdict:
    p_hat: float
    k_bar: float
    M: float
    bound: float
    holds: bool


def theorem1_bound_check(
    F: OperatorHandle,
    samples: SampleSet,
    M: float | None = None,
    scalars: Sequence = DEFAULT_SCALARS,
    tol: float = TOL_EXACT,
) -> TopologyBoundVerdict:
    """p(F) <= max(M k_bar, ||F(0)||), k_bar the largest image norm on the unit sphere.

    The samples are closed under x -> x/||x||, and the contraction pairs
    include (||x||, x/||x||) for every sample, so the inequality holds
    sample by sample whenever the contraction hypothesis does.
    """
    closed = close_under_normalization(samples)
    nz = closed.nonzero
    norms = closed.space.norm(nz)
    units = nz / np.reshape(norms, (-1, 1))
    pairs = [(float(n), u) for n, u in zip(np.atleast_1d(norms), units)]
    pairs += [(k, x) for x in nz for k in scalars if k != 0]
    report = _contraction_pairs(F, pairs)
    if M is None:
        M = report.M_hat if report.M_hat > 0 else 1.0
    if not report.finite or not leq(report.M_hat, M, tol):
        raise HypothesisViolated(f"sampled M = {report.M_hat} exceeds M = {M}")
    k_bar = float(np.max(F.codomain.norm(F.images(units)))) if len(units) else 0.0
    p_hat = estimate_norm(F, P, closed).value
    bound = max(M * k_bar, float(F.codomain.norm(F.value_at_zero)))
    return TopologyBoundVerdict(p_hat, k_bar, M, bound, leq(p_hat, bound, tol))


def _pointwise_gap(Fa: OperatorHandle, Fb: OperatorHandle, points) -> float:
    if len(points) == 0:
        return 0.0
    return float(np.max(Fa.codomain.norm(Fa.images(points) - Fb.images(points))))


@dataclass(frozen=True)
class ClosednessVerdict:
    M: float
    distances: list
    eps: float
    worst_slack: float
    limit_M_hat: float
    holds: bool


def closedness_sequence_test(
    F_seq: Sequence[OperatorHandle],
    F_limit: OperatorHandle,
    samples: SampleSet,
    M: float | None = None,
    scalars: Sequence = DEFAULT_SCALARS,
    threshold: float = 1e-6,
    tol: float = TOL_EXACT,
) -> ClosednessVerdict:
    """Closedness of the M-contraction class along a converging sequence.

    For the last member F_n and every pair (k, x) this checks the chain
    ||F(kx)|| <= M|k| ||F(x)|| + (M|k| + 1) eps, with eps the largest
    pointwise gap ||F_n(y) - F(y)|| over the evaluation points y in {x, kx}.
    """
    if not F_seq:
        raise NotConverging("empty sequence")
    reports = [estimate_M(Fn, samples, scalars) for Fn in F_seq]
    if M is None:
        M = max(r.M_hat for r in reports) or 1.0
    for r, Fn in zip(reports, F_seq):
        if not r.finite or not leq(r.M_hat, M, tol):
            raise HypothesisViolated(f"{Fn.name} has sampled M = {r.M_hat} > {M}")
    distances = [estimate_norm(Fn - F_limit, P, samples).value for Fn in F_seq]
    if any(b > a * (1 + tol) + tol for a, b in zip(distances, distances[1:])) or distances[-1] >= threshold:
        raise NotConverging(f"distances {distances[-3:]} do not fall below {threshold}")
    Fn = F_seq[-1]
    nz = samples.nonzero
    pairs = [(k, x) for x in nz for k in scalars if k != 0]
    eval_pts = np.array([p for k, x in pairs for p in (x, k * x)]).reshape(-1, samples.space.dimension)
    eps = _pointwise_gap(Fn, F_limit, eval_pts)
    worst = np.inf
    for k, x in pairs:
        lhs = float(F_limit.codomain.norm(F_limit(k * x)))
        fx = float(F_limit.codomain.norm(F_limit(x)))
        rhs = M * abs(k) * fx + (M * abs(k) + 1) * eps
        slack = rhs - lhs
        worst = min(worst, slack / max(1.0, abs(rhs)))
    limit_M = estimate_M(F_limit, samples, scalars).M_hat
    return ClosednessVerdict(M, distances, eps, float(worst), limit_M, worst >= -tol)


@dataclass
class FamilyHandle:
    members: list
    index_labels: list = field(default_factory=list)

    def __post_init__(self):
        if not self.index_labels:
            self.index_labels = list(range(len(self.members)))
        if len(self.index_labels) != len(self.members):
            raise SpaceMismatch("one label per member")
        for F in self.members[1:]:
            if F.domain != self.members[0].domain or F.codomain != self.members[0].codomain:
                raise SpaceMismatch("family members must share domain and codomain")


@dataclass(frozen=True)
class UniformReport:
    pointwise_bounds: np.ndarray
    L_hat: float | None
    member_norms: list
    uniform_bound: float
    obstructions: list
    degenerate_pairs: int
    empirically_bounded: bool


def uniform_boundedness_harness(
    family: FamilyHandle, samples: SampleSet, cancel_tol: float = 1e-6
) -> UniformReport:
    """Sampled evidence for the uniform boundedness conditions.

    Condition (a): c_x = max over members of ||F(x)|| per sample.
    Condition (b): L_hat = max ||F(x1+x2)|| / ||F(x1)+F(x2)||. Pairs whose
    denominator cancels below ``cancel_tol`` times ||F(x1)||+||F(x2)|| are
    set aside; those with a nonzero numerator are listed as obstructions.
    """
    pts = samples.points
    members = family.members
    if not members:
        return UniformReport(np.zeros(len(pts)), None, [], 0.0, [], 0, True)
    c_x = np.zeros(len(pts))
    L_hat, obstructions, degenerate = None, [], 0
    norms = []
    iu, ju = np.triu_indices(len(pts))
    for label, F in zip(family.index_labels, members):
        img = F.images(pts)
        n_img = np.atleast_1d(F.codomain.norm(img))
        c_x = np.maximum(c_x, n_img)
        sums = np.array([F(pts[i] + pts[j]) for i, j in zip(iu, ju)]).reshape(len(iu), -1)
        num = np.atleast_1d(F.codomain.norm(sums))
        den = np.atleast_1d(F.codomain.norm(img[iu] + img[ju]))
        scale = n_img[iu] + n_img[ju]
        ok = den > cancel_tol * scale
        for i in np.flatnonzero(~ok):
            degenerate += 1
            if num[i] > cancel_tol * max(scale[i], 1.0):
                obstructions.append((label, int(iu[i]), int(ju[i]), float(num[i])))
        if ok.any():
            m = float(np.max(num[ok] / den[ok]))
            L_hat = m if L_hat is None else max(L_hat, m)
        norms.append(estimate_norm(F, P, samples).value)
    ub = max(norms)
    return UniformReport(c_x, L_hat, norms, ub, obstructions, degenerate, bool(np.isfinite(ub) and ub < 1e15))


@dataclass(frozen=True)
class LimitVerdict:
    limit_norm: float
    sup_member_norm: float
    final_gap: float
    L_hat: float | None
    holds: bool


def corollary1_limit_check(
    F_seq: Sequence[OperatorHandle],
    F: OperatorHandle,
    samples: SampleSet,
    L: float,
    threshold: float = 1e-6,
    tol: float = 1e-9,
) -> LimitVerdict:
    """The pointwise limit inherits the sampled uniform bound.

    Asserts p(F) <= max_n p(F_n) + p(F_N - F) + tol; the middle term is the
    sampled distance of the last member, which the triangle inequality on
    the shared samples makes sufficient.
    """
    gaps = [_pointwise_gap(Fn, F, samples.points) for Fn in F_seq]
    if not gaps or any(b > a * (1 + 1e-12) + 1e-15 for a, b in zip(gaps, gaps[1:])) or gaps[-1] >= threshold:
        raise NotConverging(f"pointwise gaps {gaps[-3:]} do not fall below {threshold}")
    L_hat = uniform_boundedness_harness(FamilyHandle(list(F_seq)), samples).L_hat
    if L_hat is not None and not leq(L_hat, L, 1e-9):
        raise HypothesisViolated(f"sampled L = {L_hat} exceeds L = {L}")
    member = max(estimate_norm(Fn, P, samples).value for Fn in F_seq)
    final = estimate_norm(F_seq[-1] - F, P, samples).value
    lim = estimate_norm(F, P, samples).value
    return LimitVerdict(lim, member, final, L_hat, lim <= member + final + tol)
