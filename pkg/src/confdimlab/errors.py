"""Exception hierarchy.

Every error raised by the library derives from :class:`ConfdimError`.
Precondition and hypothesis failures are :class:`PreconditionError`
(mapped to exit code 3 by the CLI); solver failures are
:class:`NoConvergence` (exit code 4).
"""


class ConfdimError(Exception):
    """Base class for all library errors."""

    reason = "error"

    def to_dict(self):
        out = {"error": type(self).__name__, "kind": self.reason, "reason": str(self)}
        for name in _DETAIL_FIELDS:
            value = getattr(self, name, None)
            if value is not None:
                out[name] = value
        return out


_DETAIL_FIELDS = ("witness", "min_D", "measured", "required", "offending", "lower", "upper")


class PreconditionError(ConfdimError, ValueError):
    reason = "precondition"


# metric-core
class EmptySet(PreconditionError):
    pass


class ZeroDiameter(PreconditionError):
    pass


class SingleSet(PreconditionError):
    pass


class NotAMetric(PreconditionError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


# holder-builder
class DTooSmall(PreconditionError):
    def __init__(self, msg, min_D=None):
        super().__init__(msg)
        self.min_D = min_D


class NotUnitScale(PreconditionError):
    pass


class NotLipschitz(PreconditionError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class SeparationTooSmall(PreconditionError):
    def __init__(self, msg, measured=None, required=None):
        super().__init__(msg)
        self.measured = measured
        self.required = required


class SamePointClass(PreconditionError):
    pass


class RetryExhausted(ConfdimError, RuntimeError):
    pass


# approx-graph
class LevelTooLarge(PreconditionError):
    pass


class ParseError(PreconditionError):
    pass


class ValidationError(PreconditionError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


# modulus
class UnknownCell(PreconditionError):
    pass


class BadExponent(PreconditionError):
    pass


class Disconnected(PreconditionError):
    pass


class TooLarge(PreconditionError):
    pass


class NoConvergence(ConfdimError, RuntimeError):
    reason = "non-convergence"

    def __init__(self, msg, lower=None, upper=None):
        super().__init__(msg)
        self.lower = lower
        self.upper = upper


# confdim-estimator
class TooFewLevels(PreconditionError):
    pass


class ZeroModulus(PreconditionError):
    pass


class Inconclusive(PreconditionError):
    def __init__(self, msg, offending=None):
        super().__init__(msg)
        self.offending = offending or []


# closed-forms
class BadParams(PreconditionError):
    pass


class NoRoot(ConfdimError, ArithmeticError):
    pass


class Inapplicable(PreconditionError):
    pass


# polygonal-cocycle
class DepthTooLarge(PreconditionError):
    pass


class LipschitzViolated(PreconditionError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class SameArc(PreconditionError):
    pass
