"""Exception types raised across the package."""


class OpnormError(Exception):
    """Base class for all package errors."""


class ConfigInvalid(OpnormError):
    pass


class DegenerateProbe(OpnormError):
    pass


class EmptySamples(OpnormError):
    pass


class NearZeroSample(OpnormError):
    pass


class SpaceMismatch(OpnormError):
    pass


class HypothesisViolated(OpnormError):
    pass


class ZeroMissing(OpnormError):
    pass


class NotConverging(OpnormError):
    pass


class PointInDomain(OpnormError):
    pass


class PrecheckFailed(OpnormError):
    pass


class ModulusMissing(OpnormError):
    pass


class NotMonotone(OpnormError):
    pass


class NotLinearOnProbes(OpnormError):
    pass


class NotCauchy(OpnormError):
    pass


class NotAlgebra(OpnormError):
    pass


class NotUnital(OpnormError):
    pass


class OrderExceedsOracle(OpnormError):
    pass


class GridTooSmall(OpnormError):
    pass


class QuadratureBudgetExceeded(OpnormError):
    pass


class NoUpperBoundAvailable(OpnormError):
    pass


class SupportNotCovered(OpnormError):
    pass


class LengthNotPowerOfTwo(OpnormError):
    pass


class WindowTooSmall(OpnormError):
    pass


class InvariantBroken(OpnormError):
    """A post-condition that holds by construction failed; indicates a bug."""
