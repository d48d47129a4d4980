"""Finite-dimensional carriers: normed spaces, sample sets and metric descriptors."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import ConfigInvalid, DegenerateProbe

TOL_EXACT = 1e-12
TOL_QUAD = 1e-6


def close(a: float, b: float, tol: float = TOL_EXACT) -> bool:
    """Equality up to ``tol`` relative to max(1, |a|, |b|)."""
    if a == b:
        return True
    if not (np.isfinite(a) and np.isfinite(b)):
        return False
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def leq(a: float, b: float, tol: float = TOL_EXACT) -> bool:
    """``a <= b`` up to ``tol`` relative to max(1, |a|, |b|)."""
    if a <= b:
        return True
    if not (np.isfinite(a) and np.isfinite(b)):
        return False
    return a - b <= tol * max(1.0, abs(a), abs(b))


class ScalarField(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"

    @property
    def dtype(self):
        return np.float64 if self is ScalarField.REAL else np.complex128


NORM_KINDS = ("ell1", "ell2", "ellinf", "weighted")


@dataclass(frozen=True)
class FiniteSpace:
    """K^n with one of the standard norms.

    ``weighted`` is the weighted l1 norm sum_i w_i |v_i|.
    """

    dimension: int
    field: ScalarField = ScalarField.REAL
    norm_kind: str = "ell2"
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigInvalid(f"dimension must be positive, got {self.dimension}")
        if self.norm_kind not in NORM_KINDS:
            raise ConfigInvalid(f"unknown norm kind {self.norm_kind!r}")
        if self.norm_kind == "weighted":
            if self.weights is None or len(self.weights) != self.dimension:
                raise ConfigInvalid("weighted norm needs one weight per coordinate")
            if any(w <= 0 for w in self.weights):
                raise ConfigInvalid("weights must be strictly positive")
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    def norm(self, v) -> np.ndarray | float:
        """Norm of a vector, or row-wise norms of an (m, n) array."""
        a = np.abs(np.asarray(v))
        if self.norm_kind == "ell1":
            out = a.sum(axis=-1)
        elif self.norm_kind == "ell2":
            out = np.sqrt((a * a).sum(axis=-1))
        elif self.norm_kind == "ellinf":
            out = a.max(axis=-1)
        else:
            out = (np.asarray(self.weights) * a).sum(axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    def zero(self) -> np.ndarray:
        return np.zeros(self.dimension, dtype=self.field.dtype)

    def coerce(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=self.field.dtype)
        if v.ndim == 0:
            v = v.reshape(1)
        if v.shape[-1] != self.dimension:
            raise ConfigInvalid(f"vector of length {v.shape[-1]} in a {self.dimension}-dim space")
        return v


def real_line(norm_kind: str = "ell1") -> FiniteSpace:
    return FiniteSpace(1, ScalarField.REAL, norm_kind)


@dataclass(frozen=True)
class InnerProductSpace:
    """C^n or R^n with the standard inner product and a chosen orthonormal basis."""

    dimension: int
    basis: np.ndarray | None = None
    field: ScalarField = ScalarField.REAL

    def __post_init__(self):
        basis = np.eye(self.dimension, dtype=self.field.dtype) if self.basis is None else np.asarray(self.basis)
        gram = basis @ basis.conj().T
        if basis.shape != (self.dimension, self.dimension) or not np.allclose(
            gram, np.eye(self.dimension), atol=1e-12, rtol=0
        ):
            raise ConfigInvalid("basis rows must be orthonormal")
        object.__setattr__(self, "basis", basis)

    def inner(self, u, v):
        return np.sum(np.asarray(u) * np.conj(np.asarray(v)), axis=-1)

    def norm(self, v):
        out = np.sqrt(np.abs(self.inner(v, v)))
        return float(out) if np.ndim(out) == 0 else out

    def as_finite_space(self) -> FiniteSpace:
        return FiniteSpace(self.dimension, self.field, "ell2")


def _dedupe(points: np.ndarray) -> np.ndarray:
    seen = {}
    for row in points:
        seen.setdefault(row.tobytes(), row)
    return np.array(list(seen.values()), dtype=points.dtype).reshape(-1, points.shape[1])


@dataclass(frozen=True)
class SampleSet:
    """A finite, duplicate-free set of vectors standing in for "sup over X"."""

    points: np.ndarray
    space: FiniteSpace
    seed: int | None = None
    contains_zero: bool = field(init=False)
    min_nonzero_norm: float = field(init=False)

    def __post_init__(self):
        pts = self.space.coerce(self.points)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        pts = _dedupe(pts)
        object.__setattr__(self, "points", pts)
        norms = self.space.norm(pts) if len(pts) else np.zeros(0)
        nz = norms[norms > 0]
        object.__setattr__(self, "contains_zero", bool(np.any(norms == 0)))
        object.__setattr__(self, "min_nonzero_norm", float(nz.min()) if nz.size else 0.0)

    @classmethod
    def generate(
        cls,
        space: FiniteSpace,
        n: int,
        seed: int,
        radius: float = 2.0,
        include_zero: bool = True,
        grid: Iterable | None = None,
    ) -> SampleSet:
        """User grid points plus ``n`` scrambled Halton points in the box [-radius, radius]^d."""
        width = space.dimension * (2 if space.field is ScalarField.COMPLEX else 1)
        raw = qmc.Halton(width, scramble=True, seed=seed).random(n) if n else np.zeros((0, width))
        raw = radius * (2.0 * raw - 1.0)
        if space.field is ScalarField.COMPLEX:
            raw = raw[:, : space.dimension] + 1j * raw[:, space.dimension :]
        parts = []
        if include_zero:
            parts.append(space.zero().reshape(1, -1))
        if grid is not None:
            parts.append(space.coerce(np.asarray(list(grid))).reshape(-1, space.dimension))
        parts.append(raw.astype(space.field.dtype))
        return cls(np.concatenate(parts), space, seed)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def norms(self) -> np.ndarray:
        return self.space.norm(self.points)

    @property
    def nonzero(self) -> np.ndarray:
        return self.points[self.norms > 0]

    def union(self, other: Iterable) -> SampleSet:
        extra = self.space.coerce(np.asarray(list(other) if not isinstance(other, np.ndarray) else other))
        extra = extra.reshape(-1, self.space.dimension)
        return SampleSet(np.concatenate([self.points, extra]), self.space, self.seed)

    def with_zero(self) -> SampleSet:
        return self if self.contains_zero else self.union([self.space.zero()])

    def subset(self, mask) -> SampleSet:
        return SampleSet(self.points[np.asarray(mask)], self.space, self.seed)


@dataclass(frozen=True)
class MetricDescriptor:
    """A metric given by its evaluator, with a translation-invariance claim.

    ``scale_constants`` maps a scalar alpha to a claimed C_alpha with
    d(alpha s, 0) <= C_alpha d(s, 0).
    """

    evaluator: Callable[[Any, Any], float]
    translation_invariant: bool = False
    scale_constants: Mapping[complex, float] | None = None
    name: str = "metric"
    zero: Any = None

    def __call__(self, x, y) -> float:
        return float(self.evaluator(x, y))

    def to_zero(self, x) -> float:
        zero = self.zero if self.zero is not None else np.zeros_like(np.asarray(x))
        return self(x, zero)


def norm_metric(space: FiniteSpace) -> MetricDescriptor:
    return MetricDescriptor(
        lambda x, y: space.norm(np.asarray(x) - np.asarray(y)),
        translation_invariant=True,
        name=f"{space.norm_kind}-induced",
        zero=space.zero(),
    )


@dataclass(frozen=True)
class TranslationReport:
    discrepancy: float
    confirmed: bool
    worst: tuple | None


def check_translation_invariance(
    d: MetricDescriptor, probes: Sequence, shifts: Sequence, tol: float = TOL_EXACT
) -> TranslationReport:
    """Largest |d(x+s, y+s) - d(x, y)| over all probe pairs and shifts."""
    worst, where = 0.0, None
    probes, shifts = list(probes), list(shifts)
    for x, y in itertools.product(probes, repeat=2):
        base = d(x, y)
        for s in shifts:
            gap = abs(d(x + s, y + s) - base)
            if gap > worst:
                worst, where = gap, (x, y, s)
    return TranslationReport(worst, worst <= tol, where)


def estimate_scale_constants(d: MetricDescriptor, probes: Sequence, scalars: Sequence) -> dict:
    """Sampled C_alpha = max_s d(alpha s, 0) / d(s, 0); a lower bound on any admissible constant."""
    usable = [(s, d.to_zero(s)) for s in probes]
    usable = [(s, r) for s, r in usable if r > 0]
    if not usable:
        raise DegenerateProbe("every probe sits at distance 0 from the origin")
    out = {}
    for alpha in scalars:
        out[alpha] = max(d.to_zero(alpha * s) / r for s, r in usable)
    return out


def empirical_m(constants: Mapping) -> dict:
    """C_alpha / |alpha|, the sampled stand-in for the bounded function M(alpha)."""
    return {alpha: c / abs(alpha) for alpha, c in constants.items() if alpha != 0}


@dataclass(frozen=True)
class AxiomReport:
    max_self_distance: float
    max_asymmetry: float
    max_triangle_excess: float

    def holds(self, tol: float = TOL_EXACT) -> bool:
        return max(self.max_self_distance, self.max_asymmetry, self.max_triangle_excess) <= tol


def check_metric_axioms(d: MetricDescriptor, probes: Sequence) -> AxiomReport:
    probes = list(probes)
    table = np.array([[d(x, y) for y in probes] for x in probes])
    self_d = float(np.abs(np.diag(table)).max()) if len(probes) else 0.0
    asym = float(np.abs(table - table.T).max()) if len(probes) else 0.0
    excess = 0.0
    n = len(probes)
    for k in range(n):
        # d(i, j) - d(i, k) - d(k, j) over all i, j for this k
        gap = table - table[:, [k]] - table[[k], :]
        excess = max(excess, float(gap.max()) / max(1.0, float(table.max())))
    return AxiomReport(self_d, asym, max(excess, 0.0))
