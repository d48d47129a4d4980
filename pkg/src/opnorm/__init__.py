"""Sampled norms of nonlinear operators, extension of functionals, and checks on test-function spaces."""

from .errors import ConfigInvalid, OpnormError
from .extension import PartialFunctional, extend_one_point, extend_over_set, extend_posneg, extend_via_linear, hilbert_step
from .metricmaps import MappingHandle, MappingMetric, metric_d
from .opspace import NormKind, OperatorHandle, estimate_norm, linear_operator
from .spaces import FiniteSpace, InnerProductSpace, SampleSet
from .testfn import Bump, FrechetMetricParams, Gaussian, frechet_norm

__all__ = [
    "Bump", "ConfigInvalid", "FiniteSpace", "FrechetMetricParams", "Gaussian", "InnerProductSpace", "MappingHandle",
    "MappingMetric", "NormKind", "OperatorHandle", "OpnormError", "PartialFunctional", "SampleSet", "estimate_norm",
    "extend_one_point", "extend_over_set", "extend_posneg", "extend_via_linear", "frechet_norm", "hilbert_step",
    "linear_operator", "metric_d",
]
