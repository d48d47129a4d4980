"""Constructive Hahn-Banach steps for nonlinear functionals.

Every extension here is finite: a functional known on a finite point set is
extended one point at a time, with the new value -c where
c = max over the current domain of F(x) - p(x + y). Each step is followed by
a re-check of the pairwise inequality F(s1) + F(s2) <= p(s1 + s2), which the
construction guarantees.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import InvariantBroken, ModulusMissing, NotMonotone, PointInDomain, PrecheckFailed
from .opspace import Certificate, NormEstimate, NormKind, OperatorHandle
from .spaces import TOL_EXACT, FiniteSpace, InnerProductSpace, ScalarField

STRICT = "strict_pairs"
ALL = "all_pairs"


@dataclass(frozen=True)
class PartialFunctional:
    """Real values on a finite list of distinct points."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if len(pts) != len(vals):
            raise ValueError("one value per domain point")
        keys = {row.tobytes() for row in pts}
        if len(keys) != len(pts):
            raise PointInDomain("domain points must be distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def index_of(self, y) -> int | None:
        hits = np.flatnonzero(np.all(self.points == np.asarray(y, dtype=float), axis=1))
        return int(hits[0]) if hits.size else None

    def __call__(self, y) -> float:
        i = self.index_of(y)
        if i is None:
            raise KeyError(f"{y} is not in the domain")
        return float(self.values[i])

    def with_point(self, y, value: float) -> PartialFunctional:
        return PartialFunctional(np.vstack([self.points, np.asarray(y, float)]), np.append(self.values, value))

    def positive_part(self) -> PartialFunctional:
        return replace(self, values=np.maximum(self.values, 0.0))

    def negative_part(self) -> PartialFunctional:
        return replace(self, values=np.maximum(-self.values, 0.0))

    def __neg__(self) -> PartialFunctional:
        return replace(self, values=-self.values)

    def __sub__(self, other: PartialFunctional) -> PartialFunctional:
        if not np.array_equal(self.points, other.points):
            raise ValueError("functionals must share the same ordered domain")
        return replace(self, values=self.values - other.values)


class SubadditiveFunctional:
    """p with p(x + y) <= p(x) + p(y); optionally sublinear and uniformly continuous.

    ``modulus`` maps a Euclidean distance delta to an epsilon with
    |p(u) - p(v)| <= epsilon whenever ||u - v||_2 <= delta.
    """

    def __init__(
        self,
        evaluator: Callable,
        sublinear: bool = False,
        modulus: Callable[[float], float] | None = None,
        vectorized: bool = False,
        name: str = "p",
    ):
        self._evaluator = evaluator
        self.sublinear = sublinear
        self.modulus = modulus
        self.vectorized = vectorized
        self.name = name

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if self.vectorized:
            return float(np.asarray(self._evaluator(x.reshape(1, -1))).reshape(-1)[0])
        return float(self._evaluator(x))

    def batch(self, xs) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if self.vectorized:
            return np.asarray(self._evaluator(xs), dtype=float).reshape(-1)
        return np.array([float(self._evaluator(x)) for x in xs])

    def scaled(self, factor: float) -> SubadditiveFunctional:
        mod = None if self.modulus is None else (lambda d, m=self.modulus: factor * m(d))
        if self.vectorized:
            ev = lambda xs: factor * self._evaluator(xs)
        else:
            ev = lambda x: factor * self._evaluator(x)
        return SubadditiveFunctional(ev, self.sublinear, mod, self.vectorized, f"{factor}*{self.name}")

    def check_subadditive(self, probes, tol: float = TOL_EXACT) -> bool:
        probes = np.atleast_2d(np.asarray(probes, dtype=float))
        vals = self.batch(probes)
        i, j = np.triu_indices(len(probes))
        lhs = self.batch(probes[i] + probes[j])
        rhs = vals[i] + vals[j]
        ok = np.all(lhs <= rhs + tol * np.maximum(1.0, np.abs(rhs)))
        if ok and self.sublinear:
            for t in (0.5, 2.0, 3.0):
                ok &= np.allclose(self.batch(t * probes), t * vals, rtol=tol, atol=tol)
        return bool(ok)


def norm_functional(space: FiniteSpace, scale: float = 1.0) -> SubadditiveFunctional:
    """scale * ||.|| as a sublinear functional, with its Lipschitz modulus w.r.t. ||.||_2."""
    d = space.dimension
    if space.norm_kind == "ell1":
        lip = np.sqrt(d)
    elif space.norm_kind == "weighted":
        lip = max(space.weights) * np.sqrt(d)
    else:
        lip = 1.0
    lip *= scale
    return SubadditiveFunctional(
        lambda xs: scale * space.norm(xs),
        sublinear=True,
        modulus=lambda delta: lip * delta,
        vectorized=True,
        name=f"{scale:g}*{space.norm_kind}",
    )


def _rel_floor(*arrays) -> np.ndarray:
    return np.maximum.reduce([np.ones_like(arrays[0])] + [np.abs(a) for a in arrays])


@dataclass(frozen=True)
class PairwiseVerdict:
    passes: bool
    margin: float
    worst_pair: tuple | None
    violations: int
    pairs: int


def check_pairwise_inequality(
    F: PartialFunctional, p: SubadditiveFunctional, mode: str = STRICT, tol: float = TOL_EXACT
) -> PairwiseVerdict:
    """min over pairs of p(s1 + s2) - F(s1) - F(s2); s1 = s2 pairs only in ``all_pairs`` mode."""
    n = len(F)
    i, j = np.triu_indices(n, k=0 if mode == ALL else 1)
    if i.size == 0:
        return PairwiseVerdict(True, np.inf, None, 0, 0)
    rhs = p.batch(F.points[i] + F.points[j])
    lhs = F.values[i] + F.values[j]
    margins = rhs - lhs
    bad = margins < -tol * _rel_floor(rhs, lhs)
    w = int(np.argmin(margins))
    return PairwiseVerdict(not bad.any(), float(margins[w]), (int(i[w]), int(j[w])), int(bad.sum()), int(i.size))


def extension_constant(F: PartialFunctional, p: SubadditiveFunctional, y) -> tuple[float, int]:
    """c = max over the domain of F(x) - p(x + y), and the index attaining it."""
    gaps = F.values - p.batch(F.points + np.asarray(y, dtype=float))
    k = int(np.argmax(gaps))
    return float(gaps[k]), k


def _check_new_point(F: PartialFunctional, p: SubadditiveFunctional, mode: str, tol: float):
    y, fy = F.points[-1], F.values[-1]
    others = F.points if mode == ALL else F.points[:-1]
    vals = F.values if mode == ALL else F.values[:-1]
    rhs = p.batch(others + y)
    lhs = vals + fy
    margins = rhs - lhs
    if np.any(margins < -tol * _rel_floor(rhs, lhs)):
        raise InvariantBroken(f"extension step violated the pairwise inequality by {-margins.min():.3e}")


def extend_one_point(
    F: PartialFunctional,
    p: SubadditiveFunctional,
    y,
    mode: str = STRICT,
    precheck: bool = True,
    tol: float = TOL_EXACT,
) -> PartialFunctional:
    """Add ``y`` to the domain with value -c."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if F.index_of(y) is not None:
        raise PointInDomain(f"{y} is already in the domain")
    if precheck:
        v = check_pairwise_inequality(F, p, mode, tol)
        if not v.passes:
            raise PrecheckFailed(f"pair {v.worst_pair} has margin {v.margin:.3e}")
    c, _ = extension_constant(F, p, y)
    out = F.with_point(y, -c)
    _check_new_point(out, p, mode, tol)
    return out


def extend_over_set(
    F: PartialFunctional,
    p: SubadditiveFunctional,
    targets: Sequence,
    mode: str = STRICT,
    tol: float = TOL_EXACT,
) -> PartialFunctional:
    """Sequential one-point steps in the given order; new points are appended in that order."""
    v = check_pairwise_inequality(F, p, mode, tol)
    if not v.passes:
        raise PrecheckFailed(f"pair {v.worst_pair} has margin {v.margin:.3e}")
    out = F
    for y in targets:
        out = extend_one_point(out, p, y, mode, precheck=False, tol=tol)
    final = check_pairwise_inequality(out, p, mode, tol)
    if not final.passes:
        raise InvariantBroken(f"{final.violations} pairs fail after extension")
    return out


@dataclass(frozen=True)
class PosNegResult:
    functional: PartialFunctional
    plus: PartialFunctional
    minus: PartialFunctional
    pair_margin: float
    point_margin: float
    parts_nonnegative: bool
    holds: bool


def posneg_bounds(F: PartialFunctional, bound: float, norm: Callable, tol: float = TOL_EXACT) -> tuple[float, float]:
    """Worst relative margins of |F(x1)+F(x2)| <= bound ||x1+x2|| (all pairs) and |F(x)| <= bound ||x||."""
    i, j = np.triu_indices(len(F))
    rhs = bound * np.atleast_1d(norm(F.points[i] + F.points[j]))
    lhs = np.abs(F.values[i] + F.values[j])
    pair = float(np.min((rhs - lhs) / _rel_floor(rhs, lhs)))
    rhs1 = bound * np.atleast_1d(norm(F.points))
    lhs1 = np.abs(F.values)
    point = float(np.min((rhs1 - lhs1) / _rel_floor(rhs1, lhs1)))
    return pair, point


def extend_posneg(
    F: PartialFunctional,
    M1: float,
    M2: float,
    targets: Sequence,
    space: FiniteSpace,
    tol: float = TOL_EXACT,
) -> PosNegResult:
    """Extend F+ and F- separately against M1||.|| and M2||.|| and return their difference."""
    zero = F.index_of(np.zeros(F.dimension))
    if zero is None or F.values[zero] != 0.0:
        raise PrecheckFailed("the domain must contain 0 with F(0) = 0")
    p1 = norm_functional(space, M1)
    p2 = norm_functional(space, M2)
    parts = {}
    for label, part, p in (("positive part", F.positive_part(), p1), ("negative part", F.negative_part(), p2)):
        v = check_pairwise_inequality(part, p, ALL, tol)
        if not v.passes:
            raise PrecheckFailed(f"{label}: pair {v.worst_pair} has margin {v.margin:.3e}")
        parts[label] = extend_over_set(part, p, targets, ALL, tol)
    plus, minus = parts["positive part"], parts["negative part"]
    Fh = plus - minus
    pair, point = posneg_bounds(Fh, M1 + M2, space.norm, tol)
    # the pair bound follows from the construction only when neither extended part goes negative
    nonneg = bool(np.all(plus.values >= 0) and np.all(minus.values >= 0))
    return PosNegResult(Fh, plus, minus, pair, point, nonneg, pair >= -tol and point >= -tol)


def extend_complex(
    F_r: PartialFunctional,
    F_c: PartialFunctional,
    p_r: SubadditiveFunctional,
    p_c: SubadditiveFunctional,
    targets: Sequence,
    mode: str = STRICT,
    tol: float = TOL_EXACT,
) -> tuple[PartialFunctional, PartialFunctional]:
    """Real and imaginary parts extended independently."""
    out = []
    for label, part, p in (("real part", F_r, p_r), ("imaginary part", F_c, p_c)):
        try:
            out.append(extend_over_set(part, p, targets, mode, tol))
        except (PrecheckFailed, PointInDomain) as exc:
            raise type(exc)(f"{label}: {exc}") from exc
    return out[0], out[1]


# -- separable Hilbert space step ---------------------------------------------


def geometric_ladder(density: int, low: float = 2.0**-3, high: float = 2.0**3) -> np.ndarray:
    return np.geomspace(low, high, density)


@dataclass
class HilbertExtensionState:
    """A functional known on span(base + added) of an ambient orthonormal basis.

    ``functional`` is evaluable at any vector of that span. Line samples of
    E (the union of the lines through the current basis vectors) are the
    multiples s*b with s in +-ladder, plus 0.
    """

    ambient: InnerProductSpace
    base: tuple
    functional: Callable[[np.ndarray], float]
    added: tuple = ()
    line_sample_density: int = 9
    r_tables: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ambient.field is not ScalarField.REAL:
            raise ValueError("the Hilbert step is implemented over the reals")
        used = set(self.base) | set(self.added)
        if len(used) != len(self.base) + len(self.added):
            raise ValueError("base and added directions must be distinct basis indices")

    @property
    def ladder(self) -> np.ndarray:
        return geometric_ladder(self.line_sample_density)

    @property
    def current(self) -> tuple:
        return tuple(self.base) + tuple(self.added)

    def vector(self, index: int) -> np.ndarray:
        return np.asarray(self.ambient.basis[index], dtype=float)

    def line_samples(self) -> tuple[np.ndarray, np.ndarray]:
        """Points of E and the basis index of the line each lies on (-1 for 0)."""
        s = np.concatenate([self.ladder, -self.ladder])
        pts = [np.zeros(self.ambient.dimension)]
        lines = [-1]
        for idx in self.current:
            b = self.vector(idx)
            pts.extend(t * b for t in s)
            lines.extend([idx] * len(s))
        return np.array(pts), np.array(lines)

    def projector(self) -> np.ndarray:
        B = np.array([self.vector(i) for i in self.current])
        return B.T @ B


@dataclass(frozen=True)
class HilbertStepReport:
    direction: int
    t_grid: np.ndarray
    r_values: np.ndarray
    r_at_zero: float
    pair_margin: float
    pairs_checked: int
    continuity_ratio: float | None
    empirical_lipschitz: float | None
    window_ok: bool
    holds: bool


def check_orthogonal_pairs(state: HilbertExtensionState, p: SubadditiveFunctional, tol: float = TOL_EXACT):
    """F(z1) + F(z2) <= p(z1 + z2) for samples on distinct basis lines (0 included)."""
    pts, lines = state.line_samples()
    vals = np.array([state.functional(x) for x in pts])
    i, j = np.triu_indices(len(pts), k=1)
    keep = (lines[i] != lines[j]) | (lines[i] == -1)
    i, j = i[keep], j[keep]
    rhs = p.batch(pts[i] + pts[j])
    lhs = vals[i] + vals[j]
    margin = (rhs - lhs) / _rel_floor(rhs, lhs)
    return (float(margin.min()) if margin.size else np.inf), int(margin.size)


def hilbert_step(
    state: HilbertExtensionState,
    p: SubadditiveFunctional,
    t_grid: Sequence[float],
    direction: int | None = None,
    check_continuity: bool = True,
    tol: float = TOL_EXACT,
) -> tuple[HilbertExtensionState, HilbertStepReport]:
    """Add one orthonormal direction e* with F1(x + t e*) = F(x) - r(t).

    r(t) is the maximum of F(x) - p(x + t e*) over the sampled x in E; both
    the orthogonal-pair inequality on the sampled lines and the continuity
    bound |r(t1) - r(t2)| <= modulus(|t1 - t2|) then hold by construction.
    """
    if check_continuity and p.modulus is None:
        raise ModulusMissing("continuity reporting needs the modulus of p")
    if direction is None:
        free = [i for i in range(state.ambient.dimension) if i not in state.current]
        if not free:
            raise ValueError("the functional is already defined on the whole space")
        direction = free[0]
    if direction in state.current:
        raise PointInDomain(f"direction {direction} is already in the domain")
    zero = np.zeros(state.ambient.dimension)
    if state.functional(zero) != 0.0 or p(zero) != 0.0:
        raise PrecheckFailed("need F(0) = 0 and p(0) = 0")
    pre, _ = check_orthogonal_pairs(state, p, tol)
    if pre < -tol:
        raise PrecheckFailed(f"orthogonal-pair hypothesis fails on the base lines (margin {pre:.3e})")

    e = state.vector(direction)
    E, _ = state.line_samples()
    FE = np.array([state.functional(x) for x in E])

    def r(t: float) -> float:
        return float(np.max(FE - p.batch(E + t * e)))

    t_grid = np.asarray(sorted(set(float(t) for t in t_grid) | {0.0}))
    r_vals = np.array([r(t) for t in t_grid])
    r0 = float(r_vals[np.flatnonzero(t_grid == 0.0)[0]])

    # F1(x) + F1(t e) = F(x) - r(0) - r(t), for x in E and t on the grid
    lhs = (FE - r0)[:, None] - r_vals[None, :]
    rhs = np.array([p.batch(E + t * e) for t in t_grid]).T
    margins = (rhs - lhs) / _rel_floor(rhs, lhs)
    pair_margin = float(margins.min())

    cont, lip = None, None
    if len(t_grid) > 1:
        a, b = np.triu_indices(len(t_grid), k=1)
        dr = np.abs(r_vals[a] - r_vals[b])
        dt = np.abs(t_grid[a] - t_grid[b])
        lip = float(np.max(dr / dt))
        if check_continuity:
            eps = np.array([p.modulus(d) for d in dt])
            cont = float(np.max(np.where(eps > 0, dr / np.where(eps > 0, eps, 1.0), np.where(dr > 0, np.inf, 0.0))))

    # classical window: the new value lies above max_x [-p(-x - t e) - F(x)]
    lower = np.array([np.max(-p.batch(-E - t * e) - FE) for t in t_grid])
    window_ok = bool(np.all(lower <= -r_vals + tol * np.maximum(1.0, np.abs(r_vals))))

    old, P = state.functional, state.projector()
    cache = dict(zip(t_grid.tolist(), r_vals.tolist()))

    def extended(v):
        v = np.asarray(v, dtype=float)
        t = float(v @ e)
        rt = cache.get(t)
        if rt is None:
            rt = r(t)
        return old(P @ v) - rt

    tables = dict(state.r_tables)
    tables[direction] = (t_grid, r_vals)
    new = HilbertExtensionState(state.ambient, state.base, extended, state.added + (direction,), state.line_sample_density, tables)
    holds = pair_margin >= -tol and abs(r0) <= tol and (cont is None or cont <= 1 + tol)
    report = HilbertStepReport(direction, t_grid, r_vals, r0, pair_margin, int(margins.size), cont, lip, window_ok, holds)
    return new, report


# -- f(|T|) extensions --------------------------------------------------------


@dataclass(frozen=True)
class LinearFormExtension:
    """F(z) = f(|T(z)|) on Z = span(subspace_basis), with T(e_j) = form_coefficients[j].

    ``wrapper`` is ``"identity"``, ``("power", k)`` or a callable on [0, inf).
    """

    subspace_basis: np.ndarray
    form_coefficients: np.ndarray
    wrapper: object = "identity"

    def power(self) -> float | None:
        if self.wrapper == "identity":
            return 1.0
        if isinstance(self.wrapper, tuple) and self.wrapper[0] == "power":
            return float(self.wrapper[1])
        return None

    def f(self, u):
        k = self.power()
        if k is not None:
            return np.abs(u) ** k
        return self.wrapper(u)


@dataclass(frozen=True)
class LinearExtensionResult:
    operator: OperatorHandle
    representer: np.ndarray
    T_norm: float
    T_hat_norm: float
    pk_norm: NormEstimate | None
    attained: float | None
    holds: bool


def extend_via_linear(ext: LinearFormExtension, ambient: InnerProductSpace, tol: float = 1e-9) -> LinearExtensionResult:
    """F_hat(x) = f(|T_hat(x)|) with T_hat = T o (orthogonal projection onto Z)."""
    B = np.atleast_2d(np.asarray(ext.subspace_basis))
    c = np.asarray(ext.form_coefficients).reshape(-1)
    if not np.allclose(B @ B.conj().T, np.eye(len(B)), atol=1e-12, rtol=0):
        raise ValueError("subspace basis must be orthonormal")
    T_norm = float(np.linalg.norm(c))
    grid = np.linspace(0.0, 10.0 * T_norm + 1.0, 257)
    fg = np.asarray(ext.f(grid), dtype=float)
    if np.any(np.diff(fg) < 0):
        raise NotMonotone("wrapper decreases on the sampled half-line")
    # T_hat(x) = sum_j c_j <x, e_j> = <x, w> with w = sum_j conj(c_j) e_j
    w = np.conj(c) @ B
    T_hat_norm = float(np.linalg.norm(w))

    def F_hat(x):
        return np.array([float(ext.f(np.abs(np.sum(np.asarray(x) * np.conj(w)))))])

    space = ambient.as_finite_space()
    op = OperatorHandle(F_hat, space, FiniteSpace(1), linear=None, name="F_hat")
    k = ext.power()
    pk, attained, holds = None, None, close_enough(T_norm, T_hat_norm, tol)
    if k is not None:
        value = T_norm**k
        pk = NormEstimate(value, Certificate("exact", tag="||T||^k via coefficient norm"), NormKind("p_k", k))
        if T_hat_norm > 0:
            u = w / T_hat_norm
            attained = float(op(u)[0])
        else:
            attained = 0.0
        holds = holds and close_enough(attained, value, tol) and close_enough(T_hat_norm**k, value, tol)
    return LinearExtensionResult(op, w, T_norm, T_hat_norm, pk, attained, holds)


def close_enough(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))
