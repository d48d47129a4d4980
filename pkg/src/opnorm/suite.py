"""The acceptance battery: fifteen checks, each with its own seed drawn from one root seed."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import contraction as ct
from . import distrib as ds
from . import extension as ex
from . import fourier as fo
from . import metricmaps as mp
from . import opspace as op
from .config import dump_json, write_csv
from .errors import ConfigInvalid, PrecheckFailed
from .spaces import TOL_EXACT, TOL_QUAD, FiniteSpace, MetricDescriptor, norm_metric, InnerProductSpace, SampleSet, ScalarField, close, leq
from .testfn import Bump, FrechetMetricParams, Gaussian, frechet_norm

NORMS = ("ell1", "ell2", "ellinf", "weighted")


@dataclass(frozen=True)
class SuiteConfig:
    """SuiteConfig and the test-function metric constants shared by the battery."""

    exact: float = TOL_EXACT
    quad: float = TOL_QUAD
    a: float = 10.0
    b: float = 1.0
    N: int = 2

    def __post_init__(self):
        if self.exact <= 0 or self.quad <= 0:
            raise ConfigInvalid("tolerances must be positive")
        FrechetMetricParams(a=self.a, b=self.b, N=self.N)  # validates a > 1, b > 0, N >= 1


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    summary: dict
    tables: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}"


# -- random instance generators ----------------------------------------------


def random_space(rng, dim: int | None = None, norms=NORMS) -> FiniteSpace:
    dim = dim or int(rng.integers(2, 5))
    kind = norms[int(rng.integers(len(norms)))]
    w = tuple(rng.uniform(0.5, 2.0, dim)) if kind == "weighted" else None
    return FiniteSpace(dim, ScalarField.REAL, kind, w)


def random_operator(rng, dom: FiniteSpace, cod: FiniteSpace, zero_at_origin: bool = False) -> op.OperatorHandle:
    """One of a handful of shapes with random coefficients."""
    A = rng.normal(size=(cod.dimension, dom.dimension))
    B = rng.normal(size=(cod.dimension, dom.dimension))
    y0 = rng.normal(size=cod.dimension)
    shapes = ["linear", "quadratic", "tanh", "norm_scaled", "cubic"]
    if not zero_at_origin:
        shapes += ["affine", "constant", "tanh_shift"]
    shape = shapes[int(rng.integers(len(shapes)))]
    ev = {
        "linear": lambda x: A @ x,
        "quadratic": lambda x: (A @ x) * (B @ x),
        "tanh": lambda x: np.tanh(A @ x),
        "norm_scaled": lambda x: dom.norm(x) * (A @ x),
        "cubic": lambda x: (A @ x) ** 3 + B @ x,
        "affine": lambda x: A @ x + y0,
        "constant": lambda x: y0,
        "tanh_shift": lambda x: np.tanh(A @ x + y0),
    }[shape]
    return op.OperatorHandle(ev, dom, cod, shape == "linear", shape)


def _seeds(root: int, count: int = 15) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(root).spawn(count)]


# -- criteria -----------------------------------------------------------------


def c01_norm_structure(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    eq_bad, hom_bad, worst = 0, 0, 0.0
    rows = []
    for i in range(100):
        dom, cod = random_space(rng), random_space(rng)
        F = random_operator(rng, dom, cod)
        S = SampleSet.generate(dom, 64, seed + i)
        rep = op.norm_equivalence_report(F, S, tol.exact)
        eq_bad += not rep.holds
        alpha = float(rng.uniform(-3, 3))
        for kind in (op.P, op.P_STAR):
            base = op.estimate_norm(F, kind, S).value
            scaled = op.estimate_norm(alpha * F, kind, S).value
            gap = abs(scaled - abs(alpha) * base) / max(1.0, scaled)
            worst = max(worst, gap)
            hom_bad += gap > tol.exact
        rows.append((i, F.name, dom.norm_kind, cod.norm_kind, rep.p, rep.p_star))
    ok = eq_bad == 0 and hom_bad == 0
    return CriterionResult(1, "norm structure p <= p* <= 2p and homogeneity", ok,
                           {"instances": 100, "equivalence_violations": eq_bad, "homogeneity_violations": hom_bad, "worst_homogeneity_gap": worst},
                           {"c01_norms.csv": (["instance", "shape", "domain_norm", "codomain_norm", "p", "p_star"], rows)})


def c02_composition(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    bad, rows = 0, []
    for i in range(100):
        X, Y, Z = random_space(rng), random_space(rng), random_space(rng)
        F1 = random_operator(rng, X, Y, zero_at_origin=True)
        F2 = random_operator(rng, Y, Z, zero_at_origin=True)
        v = op.check_composition_bound(F1, F2, SampleSet.generate(X, 48, seed + i), tol.exact)
        bad += not v.holds
        rows.append((i, F1.name, F2.name, v.lhs, v.p1, v.p2))
    return CriterionResult(2, "composition bound with sample closure", bad == 0, {"instances": 100, "violations": bad},
                           {"c02_composition.csv": (["instance", "F1", "F2", "lhs", "p1", "p2"], rows)})


def _nonlinear_for_t1(rng, dom: FiniteSpace) -> op.OperatorHandle:
    A = rng.normal(size=(dom.dimension, dom.dimension))
    b = rng.normal(size=dom.dimension)
    choice = int(rng.integers(5))
    if choice == 0:
        return op.OperatorHandle(lambda x: np.tanh(A @ x), dom, dom, False, "tanh")
    if choice == 1:
        return op.OperatorHandle(lambda x: dom.norm(x) * (A @ x), dom, dom, False, "norm_scaled")
    if choice == 2:
        def xsin(x):
            r = dom.norm(x)
            return x * abs(math.sin(1.0 / r)) if r > 0 else np.zeros(dom.dimension)
        return op.OperatorHandle(xsin, dom, dom, False, "x_sin_inv_norm")
    if choice == 3:
        return op.OperatorHandle(lambda x: np.abs(x) + 1.0, dom, dom, False, "abs_plus_one")
    return op.OperatorHandle(lambda x: A @ x + (x @ x) * b, dom, dom, False, "linear_plus_quadratic")


def c03_contraction(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    lin_bad, worst = 0, 0.0
    for i in range(50):
        dom, cod = random_space(rng), random_space(rng)
        F = op.linear_operator(rng.normal(size=(cod.dimension, dom.dimension)), dom, cod)
        M = ct.estimate_M(F, SampleSet.generate(dom, 32, seed + i)).M_hat
        worst = max(worst, abs(M - 1.0))
        lin_bad += not close(M, 1.0, tol.exact)
    t1_bad, rows = 0, []
    for i in range(50):
        dom = random_space(rng)
        F = _nonlinear_for_t1(rng, dom)
        v = ct.theorem1_bound_check(F, SampleSet.generate(dom, 32, seed + 100 + i), tol=tol.exact)
        t1_bad += not v.holds
        rows.append((i, F.name, v.M, v.k_bar, v.p_hat, v.bound))
    return CriterionResult(3, "linear maps have M = 1; topology-bound inequality", lin_bad == 0 and t1_bad == 0,
                           {"linear_violations": lin_bad, "worst_linear_M_gap": worst, "theorem1_violations": t1_bad},
                           {"c03_theorem1.csv": (["instance", "operator", "M", "k_bar", "p_hat", "bound"], rows)})


def c04_uniform(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    d = 3
    X, R = FiniteSpace(d, norm_kind="ell2"), FiniteSpace(1, norm_kind="ell2")
    members = []
    for j in range(32):
        a = rng.normal(size=d)
        a *= rng.uniform(0.1, 1.0) / np.linalg.norm(a)
        if j == 0:
            a /= np.linalg.norm(a)  # one member on the unit sphere
        members.append(op.linear_operator(a.reshape(1, d), X, R, name=f"a{j}"))
    S = SampleSet.generate(X, 64, seed)
    rep = ct.uniform_boundedness_harness(ct.FamilyHandle(members), S)
    lin_ok = rep.L_hat is not None and abs(rep.L_hat - 1.0) <= 1e-9 and leq(rep.uniform_bound, 1.0, tol.exact)
    scaled = [float(j) * op.identity(X) for j in range(1, 11)]
    rep2 = ct.uniform_boundedness_harness(ct.FamilyHandle(scaled), S)
    scale_ok = close(rep2.uniform_bound, 10.0, tol.exact)
    return CriterionResult(4, "uniform boundedness harness", lin_ok and scale_ok,
                           {"L_hat": rep.L_hat, "uniform_bound": rep.uniform_bound, "set_aside_pairs": rep.degenerate_pairs,
                            "scaled_identity_bound": rep2.uniform_bound, "expected_scaled_bound": 10.0},
                           {"c04_pointwise.csv": (["sample", "c_x"], list(enumerate(rep.pointwise_bounds)))})


def _weighted_l1(w):
    def p(v):
        total = 0.0
        for wi, vi in zip(w, v):
            total += wi * abs(vi)
        return total
    return p


def c05_extension(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    post_bad, oracle_bad, steps = 0, 0, 0
    for i in range(1000):
        d = int(rng.integers(1, 5))
        w = tuple(rng.uniform(0.5, 2.0, d))
        space = FiniteSpace(d, norm_kind="weighted", weights=w)
        p = ex.norm_functional(space)
        n_dom, n_tgt = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        pts = rng.normal(size=(n_dom + n_tgt, d)).round(6)
        if len({r.tobytes() for r in pts}) < len(pts):
            continue
        a = np.array(w) * rng.uniform(-1, 1, d)  # |<a, s>| <= p(s)
        vals = pts[:n_dom] @ a - rng.exponential(0.5, n_dom) * (rng.random(n_dom) < 0.5)
        mode = ex.ALL if i % 2 else ex.STRICT
        dom_pts = pts[:n_dom]
        if mode == ex.ALL and not np.any(np.all(dom_pts == 0, axis=1)):
            # the (y, y) pair needs c >= -p(y), which the origin supplies
            dom_pts, vals = np.vstack([dom_pts, np.zeros(d)]), np.append(vals, 0.0)
        F = ex.PartialFunctional(dom_pts, vals)
        oracle_p = _weighted_l1(w)
        cur = F
        for y in pts[n_dom:]:
            c_oracle = max(float(fx) - oracle_p(x + y) for x, fx in zip(cur.points, cur.values))
            c, _ = ex.extension_constant(cur, p, y)
            oracle_bad += int(c != c_oracle)
            cur = ex.extend_one_point(cur, p, y, mode, precheck=False, tol=tol.exact)
            steps += 1
        post_bad += not ex.check_pairwise_inequality(cur, p, mode, tol.exact).passes
    return CriterionResult(5, "one-point extension keeps the pairwise inequality", post_bad == 0 and oracle_bad == 0,
                           {"instances": 1000, "steps": steps, "pairwise_violations": post_bad, "oracle_mismatches": oracle_bad})


def c06_posneg(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    done, skipped, pair_bad, point_bad, nonneg = 0, 0, 0, 0, 0
    bad_with_nonneg = 0
    rows = []
    while done < 200:
        d = int(rng.integers(1, 4))
        space = random_space(rng, d, ("ell1", "ell2", "ellinf"))
        M1, M2 = rng.uniform(0.5, 2.0, 2)
        n = int(rng.integers(1, 6))
        pts = np.vstack([np.zeros(d), rng.normal(size=(n, d))])
        signs = rng.choice([-1.0, 1.0], n)
        mags = rng.uniform(0, 1, n) * np.where(signs > 0, M1, M2) * space.norm(pts[1:])
        F = ex.PartialFunctional(pts, np.concatenate([[0.0], signs * mags]))
        targets = rng.normal(size=(int(rng.integers(1, 6)), d))
        try:
            r = ex.extend_posneg(F, M1, M2, targets, space, tol.exact)
        except PrecheckFailed:
            skipped += 1
            continue
        done += 1
        pair_bad += r.pair_margin < -tol.exact
        point_bad += r.point_margin < -tol.exact
        nonneg += r.parts_nonnegative
        bad_with_nonneg += r.parts_nonnegative and not r.holds
        rows.append((done, space.norm_kind, M1, M2, r.pair_margin, r.point_margin, r.parts_nonnegative))
    return CriterionResult(6, "positive/negative-part extension bounds", pair_bad == 0 and point_bad == 0,
                           {"instances": 200, "skipped_precheck": skipped, "pair_violations": pair_bad, "point_violations": point_bad,
                            "instances_with_nonnegative_parts": nonneg, "violations_with_nonnegative_parts": bad_with_nonneg},
                           {"c06_posneg.csv": (["instance", "norm", "M1", "M2", "pair_margin", "point_margin", "parts_nonnegative"], rows)})


def c07_hilbert(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    bad, rows = 0, []
    for i in range(50):
        d = int(rng.integers(3, 7))
        Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        amb = InnerProductSpace(d, Q.T)
        k = int(rng.integers(1, d))
        base = tuple(range(k))
        kind = ("ell2", "ell1", "ellinf")[i % 3]
        scale = float(rng.uniform(1.0, 2.0))
        p = ex.norm_functional(FiniteSpace(d, norm_kind=kind), scale)
        a = Q.T[:k].T @ rng.normal(size=k)
        a *= rng.uniform(0.2, 1.0) / (np.abs(a).sum() if kind == "ellinf" else np.linalg.norm(a))
        g = rng.normal(size=d)
        gamma = float(rng.uniform(0, 0.5))
        F = lambda v, a=a, g=g, gamma=gamma: float(a @ v) - gamma * abs(float(g @ v))
        state = ex.HilbertExtensionState(amb, base, F, line_sample_density=7)
        t_grid = np.linspace(-2.0, 2.0, 9)
        ok = True
        for _ in range(min(2, d - k)):
            state, rep = ex.hilbert_step(state, p, t_grid, tol=tol.exact)
            ok &= rep.holds
            rows.append((i, d, kind, rep.direction, rep.pair_margin, rep.continuity_ratio, rep.r_at_zero, rep.holds))
        bad += not ok
    return CriterionResult(7, "Hilbert-space step: continuity of r and orthogonal pairs", bad == 0, {"instances": 50, "violations": bad},
                           {"c07_hilbert.csv": (["instance", "dim", "norm", "direction", "pair_margin", "continuity_ratio", "r0", "holds"], rows)})


def c08_linear_extension(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    bad, worst, rows = 0, 0.0, []
    for i in range(100):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, n + 1))
        Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        k = (1, 2, 3)[i % 3]
        c = rng.normal(size=m)
        res = ex.extend_via_linear(ex.LinearFormExtension(Q.T[:m], c, ("power", k)), InnerProductSpace(n), 1e-9)
        target = float(np.linalg.norm(c)) ** k
        gap = abs(res.pk_norm.value - target) / max(1.0, target)
        # the sampled p_k norm can never exceed the exact value
        S = SampleSet.generate(FiniteSpace(n), 64, seed + i)
        sampled = op.estimate_norm(res.operator, op.NormKind("p_k", k), S).value
        ok = res.holds and gap <= 1e-9 and leq(sampled, target, 1e-9)
        bad += not ok
        worst = max(worst, gap)
        rows.append((i, n, m, k, target, res.pk_norm.value, res.attained, sampled))
    return CriterionResult(8, "f(|T|) extension keeps the p_k norm", bad == 0, {"instances": 100, "violations": bad, "worst_gap": worst},
                           {"c08_pk.csv": (["instance", "n", "m", "k", "norm_T_pow_k", "reported", "attained", "sampled"], rows)})


def c09_algebra(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    X = FiniteSpace(2, norm_kind="ell2")
    samples = list(SampleSet.generate(X, 24, seed).points)
    dX = norm_metric(X)
    bad, unit_bad = 0, 0
    worst = {"assoc": 0.0, "distrib": 0.0, "submult": np.inf}
    for i in range(100):
        alg = mp.MatrixAlgebra(2) if i % 2 else mp.ScalarAlgebra()
        mm = mp.MappingMetric(dX, samples, X.zero(), algebra=alg)

        def rand_map(alg=alg):
            shape = (2, 2) if isinstance(alg, mp.MatrixAlgebra) else ()
            C0, C1, C2 = (rng.normal(size=shape) for _ in range(3))
            u = rng.normal(size=2)
            return mp.MappingHandle(lambda x: C0 + C1 * float(x @ u) + C2 * float(x @ x), X.zero())

        v = mp.algebra_laws(rand_map(), rand_map(), rand_map(), mm, tol.exact)
        bad += not v.holds
        worst["assoc"] = max(worst["assoc"], v.assoc_gap)
        worst["distrib"] = max(worst["distrib"], v.distrib_gap)
        worst["submult"] = min(worst["submult"], float(v.submult_margin))
        unit_bad += int(mp.mapping_norm(mp.unit_element(mm).mapping, mm) != 1.0)
    return CriterionResult(9, "mapping algebra laws and unit norm", bad == 0 and unit_bad == 0,
                           {"pairs": 100, "violations": bad, "unit_norm_violations": unit_bad, **worst})


def example_params(cfg: SuiteConfig, anchors=()) -> FrechetMetricParams:
    return FrechetMetricParams(a=cfg.a, b=cfg.b, N=cfg.N, domain=((-3.0,), (3.0,)), grid_density=200.0, anchors=tuple(anchors))


def bump_family(rng, count: int, lo: float = -1.5, hi: float = 1.5) -> list:
    out = []
    for _ in range(count):
        amp = rng.uniform(0.2, 3.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        out.append(Bump((float(rng.uniform(lo, hi)),), float(rng.uniform(0.15, 1.2)), complex(amp)))
    return out


def c10_functionals(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    cs = [float(c) for c in rng.uniform(-2.0, 2.0, 5)]
    params = example_params(tol, anchors=[(c,) for c in cs] + [(0.0,)])
    family = bump_family(rng, 200)
    rows, bad = [], 0
    checks = [(ds.delta(c), 1.0, tol.exact) for c in cs] + [(ds.deriv_delta(k), 1.0, tol.exact) for k in range(params.N + 1)]
    kernels = [
        ds.IntegralKernel(lambda t: np.ones_like(t), (0.0, 1.0), name="indicator[0,1]"),
        ds.IntegralKernel(lambda t: np.cos(3 * t), (-1.0, 1.0), breakpoints=(-np.pi / 6, np.pi / 6), name="cos3t"),
        ds.ramp_kernel(4, 0.5),
    ]
    checks += [(ds.integral(k), k.L1_norm, tol.quad) for k in kernels]
    summary = {}
    for L, bound, t in checks:
        r = ds.functional_norm(L, family, params)
        over = int(np.sum(r.ratios > bound + t))
        bad += over
        summary[str(L.label)] = {"lower": r.lower, "upper": r.upper, "claimed": bound, "over": over}
        rows.append((str(L.label), r.lower, r.upper, bound, over))
    return CriterionResult(10, "delta, derivative-delta and kernel functionals stay under their bounds", bad == 0,
                           {"bumps": len(family), "violations": bad, "functionals": summary},
                           {"c10_functionals.csv": (["functional", "lower", "upper", "claimed_bound", "over_bound"], rows)})


def c11_position(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    cs = [float(c) for c in rng.uniform(-2.0, 2.0, 6)]
    params = example_params(tol, anchors=[(c,) for c in cs])
    family = bump_family(rng, 40)
    gap = 0.0
    for c in cs:
        F = ds.position_operator(ds.delta(c))
        d = ds.delta(c)
        for f in family:
            lhs, rhs = F(f), c * d(f)
            gap = max(gap, abs(lhs - rhs) / max(1.0, abs(rhs)))
    rep = ds.position_norm_estimate(cs, family, params, tol.exact)
    return CriterionResult(11, "position operator on point evaluations", gap <= tol.exact and rep.holds,
                           {"max_identity_gap": gap, "norm_estimate": rep.estimate, "sup_abs_c": rep.bound})


def c12_momentum(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    params = example_params(tol)
    c = 0.0
    family = []
    for width in (0.05, 0.1, 0.2, 0.4, 0.8, 1.2):
        for shift in (-0.5, 0.0, 0.5, 1.0):
            family.append(Bump((c + shift * width + 0.03,), width, 1.0))
    family += bump_family(rng, 12, -0.5, 0.5)
    g = ds.momentum_growth([4, 8, 16], c, family, params)
    rows = [(r.n, r.numerator_lb, r.denominator_ub, r.certified_ratio, 2 * r.n, r.attains_2n, r.path_gap) for r in g.reports]
    return CriterionResult(12, "momentum witness ratio grows at least linearly", g.at_least_linear,
                           {"ratios": g.ratios, "doubling_factors": g.doubling_factors, "strictly_increasing": g.strictly_increasing,
                            "attains_2n": [r.attains_2n for r in g.reports], "max_path_gap": max(r.path_gap for r in g.reports)},
                           {"c12_momentum.csv": (["n", "numerator_lb", "denominator_ub", "certified_ratio", "target_2n", "attained", "path_gap"], rows)})


def c13_fourier(seed: int, tol: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(seed)
    g = fo.gaussian_integrable()
    v = fo.check_l1_c0_bound(g, np.linspace(-6, 6, 49), tol.quad)
    gauss_ok = abs(v.sup_abs - 1.0) <= tol.quad and abs(v.L1_norm - math.sqrt(2 * math.pi)) <= tol.quad and v.holds
    planch = [fo.plancherel_check(rng.normal(size=1024) + 1j * rng.normal(size=1024)) for _ in range(20)]
    planch_ok = all(p.holds for p in planch)
    amp = fo.schwartz_fourier_bounded([Gaussian((0.0,), 1.0 / s) for s in (1.0, 2.0, 4.0)], 3)
    return CriterionResult(13, "Fourier: L1 to C0 bound, discrete isometry, Schwartz amplification", gauss_ok and planch_ok and amp.finite,
                           {"sup_abs": v.sup_abs, "L1_norm": v.L1_norm, "plancherel_worst": max(p.norm_gap for p in planch),
                            "amplification_per_k": amp.max_ratio_per_k},
                           {"c13_amplification.csv": (["dilation", *[f"k{k}" for k in range(4)]], [(s, *r) for s, r in zip((1, 2, 4), amp.ratios)])})


def c14_completeness(seed: int, tol: SuiteConfig) -> CriterionResult:
    dX = MetricDescriptor(lambda x, y: abs(float(x) - float(y)), True, zero=0.0)
    samples = [k / 8.0 for k in range(-16, 17)]
    mm = mp.MappingMetric(dX, samples, 0.0, algebra=mp.ScalarAlgebra())
    F = mp.MappingHandle(lambda x: 3.0 * x, 0.0, True, "3x")
    G = mp.MappingHandle(lambda x: x, 0.0, True, "x")
    dG = float(mp.mapping_norm(G, mm))
    seq = [F + 2.0**-n * G for n in range(1, 41)]
    v = mp.completeness_harness(seq, F, mm, 1e-9)
    exact = all(d == 2.0**-n * dG for n, d in zip(range(1, 41), v.limit_distances))
    return CriterionResult(14, "Cauchy sequence converges at the exact geometric rate", exact and v.converged and v.limit_distances[-1] < 1e-9,
                           {"d_G": dG, "final_distance": v.limit_distances[-1], "exact_rate": exact})


CRITERIA: list[Callable] = [
    c01_norm_structure, c02_composition, c03_contraction, c04_uniform, c05_extension, c06_posneg, c07_hilbert,
    c08_linear_extension, c09_algebra, c10_functionals, c11_position, c12_momentum, c13_fourier, c14_completeness,
]


def run_criterion(number: int, seed: int = 0, tol: SuiteConfig | None = None) -> CriterionResult:
    return CRITERIA[number - 1](_seeds(seed)[number - 1], tol or SuiteConfig())


def run_battery(seed: int = 0, tol: SuiteConfig | None = None, only=None) -> list[CriterionResult]:
    tol = tol or SuiteConfig()
    seeds = _seeds(seed)
    return [fn(seeds[i], tol) for i, fn in enumerate(CRITERIA) if only is None or i + 1 in only]


# what kind of evidence backs the numbers each criterion reports
CERTIFICATES = {
    1: "sampled_lower_bound", 2: "sampled_lower_bound", 3: "sampled_lower_bound", 4: "sampled_lower_bound",
    5: "exact", 6: "exact", 7: "sampled_grid", 8: "exact", 9: "sampled_lower_bound", 10: "sampled_lower_bound",
    11: "sampled_lower_bound", 12: "certified_sandwich", 13: "quadrature", 14: "sampled_lower_bound", 15: "exact",
}


def report_dict(results: list[CriterionResult], seed: int, tol: SuiteConfig) -> dict:
    return {
        "seed": seed,
        "settings": {"exact": tol.exact, "quad": tol.quad, "a": tol.a, "b": tol.b, "N": tol.N},
        "criteria": [{"number": r.number, "name": r.name, "verdict": "pass" if r.passed else "fail",
                      "certificate": CERTIFICATES[r.number], **r.summary} for r in results],
        "all_pass": all(r.passed for r in results),
    }


def c15_determinism(seed: int, tol: SuiteConfig, first: list[CriterionResult] | None = None) -> CriterionResult:
    a = first if first is not None else run_battery(seed, tol)
    b = run_battery(seed, tol)
    same = dump_json(report_dict(a, seed, tol)) == dump_json(report_dict(b, seed, tol))
    return CriterionResult(15, "bit-identical reports under a fixed seed", same, {"identical": same})


def run_suite(seed: int = 0, tol: SuiteConfig | None = None, out: str | None = None, determinism: bool = True) -> tuple[dict, list[CriterionResult]]:
    """Run all criteria, optionally write report.json, timing.json and CSV tables under ``out``."""
    tol = tol or SuiteConfig()
    timing = {}
    results = []
    seeds = _seeds(seed)
    for i, fn in enumerate(CRITERIA):
        t0 = time.perf_counter()
        results.append(fn(seeds[i], tol))
        timing[fn.__name__] = time.perf_counter() - t0
    if determinism:
        t0 = time.perf_counter()
        results.append(c15_determinism(seed, tol, results))
        timing["c15_determinism"] = time.perf_counter() - t0
    report = report_dict(results, seed, tol)
    if out:
        root = Path(out)
        root.mkdir(parents=True, exist_ok=True)
        (root / "report.json").write_text(dump_json(report) + "\n", encoding="utf-8")
        (root / "timing.json").write_text(dump_json(timing) + "\n", encoding="utf-8")
        for r in results:
            for name, (header, rows) in r.tables.items():
                write_csv(root / name, header, rows)
    return report, results
