"""Exception types shared across the toolkit."""


class RieszkitError(Exception):
    """Base class for all toolkit errors."""


class SingularPoint(RieszkitError):
    """A weight was evaluated at a pole or zero of its analytic form."""


class OutOfGrid(RieszkitError):
    """A tabulated weight was evaluated outside its grid domain."""


class NotIntegrable(RieszkitError):
    """The requested power of a weight is not locally integrable."""


class Singular(RieszkitError):
    """A kernel was evaluated on, or too close to, its singular set."""


class QuadratureDiverged(RieszkitError):
    """Successive quadrature refinements failed to settle within tolerance."""


class DegenerateProfile(RieszkitError):
    """Moment projection annihilated a candidate atom profile."""


class MisclassifiedSample(RieszkitError):
    """A sample point expected in the outer region lies in an expanded ball."""


class HypothesisFailed(RieszkitError):
    """A check was run on inputs violating one of its audited hypotheses."""

    def __init__(self, item: str, detail: str = ""):
        self.item = item
        self.detail = detail
        msg = f"hypothesis failed: {item}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ConfigError(RieszkitError):
    """A run configuration failed schema validation."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
