"""Operators between finite spaces and the sampled operator norms p, p*, q_s, q*_s, p_k."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import ConfigInvalid, EmptySamples, HypothesisViolated, NearZeroSample, SpaceMismatch, ZeroMissing
from .spaces import TOL_EXACT, FiniteSpace, SampleSet, close, leq

NEAR_ZERO = 1e-300


class OperatorHandle:
    """A map ``domain -> codomain`` evaluated as a black box.

    The value at the origin is cached at construction so the ||F(0)|| branch
    of every norm is exact. ``linear`` is a claim, checked by
    :meth:`check_linearity`, never assumed.
    """

    def __init__(
        self,
        evaluator: Callable[[np.ndarray], Any],
        domain: FiniteSpace,
        codomain: FiniteSpace,
        linear: bool | None = None,
        name: str = "F",
    ):
        self._evaluator = evaluator
        self.domain = domain
        self.codomain = codomain
        self.linear = linear
        self.name = name
        self.value_at_zero = self(domain.zero())

    def __call__(self, x) -> np.ndarray:
        y = np.asarray(self._evaluator(np.asarray(x)), dtype=np.result_type(self.codomain.field.dtype, float))
        return y.reshape(self.codomain.dimension)

    def __repr__(self):
        return f"OperatorHandle({self.name}: R^{self.domain.dimension} -> R^{self.codomain.dimension})"

    def images(self, points) -> np.ndarray:
        return np.array([self(x) for x in points]).reshape(len(points), self.codomain.dimension)

    def _same_spaces(self, other: OperatorHandle):
        if self.domain != other.domain or self.codomain != other.codomain:
            raise SpaceMismatch(f"{self.name} and {other.name} live on different spaces")

    def __add__(self, other: OperatorHandle) -> OperatorHandle:
        self._same_spaces(other)
        lin = self.linear and other.linear
        return OperatorHandle(lambda x: self(x) + other(x), self.domain, self.codomain, lin, f"({self.name}+{other.name})")

    def __sub__(self, other: OperatorHandle) -> OperatorHandle:
        self._same_spaces(other)
        lin = self.linear and other.linear
        return OperatorHandle(lambda x: self(x) - other(x), self.domain, self.codomain, lin, f"({self.name}-{other.name})")

    def __rmul__(self, alpha) -> OperatorHandle:
        return OperatorHandle(lambda x: alpha * self(x), self.domain, self.codomain, self.linear, f"{alpha}*{self.name}")

    def __neg__(self) -> OperatorHandle:
        return -1.0 * self

    def check_linearity(self, probes, scalars=(2.0, -0.5), tol: float = 1e-9) -> bool:
        probes = list(probes)
        for x in probes:
            fx = self(x)
            for a in scalars:
                if not np.allclose(self(a * x), a * fx, rtol=tol, atol=tol):
                    return False
            for y in probes:
                if not np.allclose(self(x + y), fx + self(y), rtol=tol, atol=tol):
                    return False
        return True


def identity(space: FiniteSpace) -> OperatorHandle:
    return OperatorHandle(lambda x: x, space, space, True, "Id")


def zero_operator(domain: FiniteSpace, codomain: FiniteSpace) -> OperatorHandle:
    return OperatorHandle(lambda x: np.zeros(codomain.dimension), domain, codomain, True, "0")


def linear_operator(matrix, domain: FiniteSpace, codomain: FiniteSpace, name: str = "A") -> OperatorHandle:
    a = np.asarray(matrix)
    a = a.reshape(codomain.dimension, domain.dimension)
    return OperatorHandle(lambda x: a @ x, domain, codomain, True, name)


def constant_operator(value, domain: FiniteSpace, codomain: FiniteSpace) -> OperatorHandle:
    y0 = codomain.coerce(value)
    return OperatorHandle(lambda x: y0, domain, codomain, False, "const")


@dataclass(frozen=True)
class NormKind:
    """One of p, p_star, q (with s), q_star (with s), p_k (with k)."""

    kind: str = "p"
    param: float = 1.0

    def __post_init__(self):
        if self.kind not in ("p", "p_star", "q", "q_star", "p_k"):
            raise ConfigInvalid(f"unknown norm kind {self.kind!r}")
        if self.param <= 0:
            raise ConfigInvalid("s and k must be positive")

    @classmethod
    def parse(cls, text: str) -> NormKind:
        """Parse the CLI spelling ``p | pstar | q:s | qstar:s | pk:k``."""
        name, _, arg = text.partition(":")
        table = {"p": "p", "pstar": "p_star", "q": "q", "qstar": "q_star", "pk": "p_k"}
        if name not in table:
            raise ConfigInvalid(f"unknown norm kind {text!r}")
        if name in ("p", "pstar"):
            if arg:
                raise ConfigInvalid(f"{name} takes no parameter")
            return cls(table[name])
        try:
            return cls(table[name], float(arg) if arg else 1.0)
        except ValueError:
            raise ConfigInvalid(f"bad parameter in {text!r}") from None

    def label(self) -> str:
        return self.kind if self.kind in ("p", "p_star") else f"{self.kind}({self.param:g})"


P = NormKind("p")
P_STAR = NormKind("p_star")


@dataclass(frozen=True)
class Certificate:
    """How a number was obtained: ``sampled_lower_bound``, ``analytic_upper_bound`` or ``exact``."""

    kind: str
    seed: int | None = None
    sample_count: int | None = None
    tag: str | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class NormEstimate:
    value: float
    certificate: Certificate
    kind: NormKind | str
    witness: Any = field(default=None, compare=False)
    sup_term: float = 0.0
    zero_term: float = 0.0

    def as_dict(self) -> dict:
        kind = self.kind.label() if isinstance(self.kind, NormKind) else self.kind
        return {"value": self.value, "kind": kind, "certificate": self.certificate.as_dict()}


def _ratio_sup(F: OperatorHandle, samples: SampleSet, power: float = 1.0):
    pts = samples.points
    norms = samples.norms
    mask = norms > 0
    if np.any(mask & (norms < NEAR_ZERO)):
        raise NearZeroSample("sample with norm below 1e-300")
    if not mask.any():
        return 0.0, None
    nz = pts[mask]
    img = F.codomain.norm(F.images(nz))
    den = norms[mask] if power == 1.0 else norms[mask] ** power
    ratios = np.asarray(img) / den
    i = int(np.argmax(ratios))
    return float(ratios[i]), nz[i]


def estimate_norm(F: OperatorHandle, kind: NormKind, samples: SampleSet) -> NormEstimate:
    """Sampled value of one of the norms; always a lower bound of the true supremum."""
    if len(samples) == 0:
        raise EmptySamples("no samples")
    power = kind.param if kind.kind == "p_k" else 1.0
    sup, witness = _ratio_sup(F, samples, power)
    z = float(F.codomain.norm(F.value_at_zero))
    s = kind.param
    if kind.kind in ("p", "p_k"):
        value = max(sup, z)
    elif kind.kind == "p_star":
        value = sup + z
    elif kind.kind == "q":
        value = max(sup, s * z)
    else:
        value = sup + s * z
    cert = Certificate("sampled_lower_bound", seed=samples.seed, sample_count=len(samples))
    return NormEstimate(value, cert, kind, witness, sup, z)


@dataclass(frozen=True)
class EquivalenceReport:
    p: float
    p_star: float
    holds: bool


def norm_equivalence_report(F: OperatorHandle, samples: SampleSet, tol: float = TOL_EXACT) -> EquivalenceReport:
    """p <= p* <= 2 p on one shared sample set."""
    p = estimate_norm(F, P, samples).value
    ps = estimate_norm(F, P_STAR, samples).value
    return EquivalenceReport(p, ps, leq(p, ps, tol) and leq(ps, 2 * p, tol))


def compose(F1: OperatorHandle, F2: OperatorHandle) -> OperatorHandle:
    """x -> F2(F1(x))."""
    if F1.codomain != F2.domain:
        raise SpaceMismatch(f"codomain of {F1.name} is not the domain of {F2.name}")
    lin = bool(F1.linear and F2.linear) if (F1.linear is not None and F2.linear is not None) else None
    return OperatorHandle(lambda x: F2(F1(x)), F1.domain, F2.codomain, lin, f"{F2.name}o{F1.name}")


@dataclass(frozen=True)
class CompositionVerdict:
    lhs: float
    p1: float
    p2: float
    holds: bool


def check_composition_bound(
    F1: OperatorHandle, F2: OperatorHandle, samples: SampleSet, tol: float = TOL_EXACT
) -> CompositionVerdict:
    """||F2 o F1|| <= ||F1|| ||F2|| with F2's norm taken over the image F1(S) plus 0.

    Taking F2's sample set to be the image of S makes the inequality hold
    sample by sample, so a failure means a bug rather than bad sampling.
    """
    zero_y = F1.codomain.zero()
    if np.any(F1.value_at_zero != 0) or np.any(F2.value_at_zero != 0):
        raise HypothesisViolated("composition bound needs F1(0) = 0 and F2(0) = 0")
    lhs = estimate_norm(compose(F1, F2), P, samples).value
    p1 = estimate_norm(F1, P, samples).value
    image = SampleSet(np.vstack([F1.images(samples.points), zero_y.reshape(1, -1)]), F1.codomain, samples.seed)
    p2 = estimate_norm(F2, P, image).value
    return CompositionVerdict(lhs, p1, p2, leq(lhs, p1 * p2, tol))


def restrict(F: OperatorHandle, S: SampleSet) -> NormEstimate:
    """The B(S, Y) norm, i.e. p with the supremum taken over S only."""
    if not S.contains_zero:
        raise ZeroMissing("B(S, Y) needs 0 in S")
    est = estimate_norm(F, P, S)
    return NormEstimate(est.value, Certificate("exact", tag="finite S"), "B(S,Y)", est.witness, est.sup_term, est.zero_term)


def pointwise_bound_holds(F: OperatorHandle, samples: SampleSet, tol: float = TOL_EXACT) -> bool:
    """||F(x)|| <= p_S(F) ||x|| at every nonzero x of S."""
    p = estimate_norm(F, P, samples).value
    nz = samples.nonzero
    lhs = F.codomain.norm(F.images(nz))
    rhs = p * samples.space.norm(nz)
    return all(leq(float(a), float(b), tol) for a, b in zip(np.atleast_1d(lhs), np.atleast_1d(rhs)))


__all__ = [
    "OperatorHandle",
    "NormKind",
    "NormEstimate",
    "Certificate",
    "estimate_norm",
    "norm_equivalence_report",
    "compose",
    "check_composition_bound",
    "restrict",
    "identity",
    "zero_operator",
    "linear_operator",
    "constant_operator",
    "close",
]
