"""Domain error hierarchy.

Every failure mode that a caller can act on gets its own class; the CLI
maps any FractalsymError to exit code 2 with a structured JSON payload.
"""

from __future__ import annotations


class FractalsymError(Exception):
    """Base class for all domain errors raised by this package."""

    def payload(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class DegreeCap(FractalsymError):
    """Symbolic composition would exceed the configured degree cap."""


class DegreeTooLow(FractalsymError):
    """Operation requires degree >= 2."""


class DegreeMismatch(FractalsymError):
    """Degrees of the supplied polynomials are incompatible."""


class NotNormalized(FractalsymError):
    """Polynomial is not monic and centered within tolerance."""


class NewtonDiverged(FractalsymError):
    """Newton iteration failed to converge within the step budget."""


class NotMinimal(FractalsymError):
    """A smaller (preperiod, period) pair satisfies the defining equation."""

    def __init__(self, l: int, p: int):
        super().__init__(f"smaller pair (l={l}, p={p}) satisfies the equation")
        self.l = l
        self.p = p

    def payload(self) -> dict:
        d = super().payload()
        d.update({"l": self.l, "p": self.p})
        return d


class PeriodicNotPreperiodic(FractalsymError):
    """The solver landed on a superattracting (periodic critical orbit) parameter."""


class NotPeriodic(FractalsymError):
    """Point is not periodic of the stated period within tolerance."""


class NotRepelling(FractalsymError):
    """Cycle multiplier does not satisfy |rho| > 1."""


class BranchLost(FractalsymError):
    """Inverse-branch selection jumped; chart continuity guard tripped."""


class BranchUndefined(FractalsymError):
    """Requested inverse branch through an anchor that is not periodic."""


class RayBroken(FractalsymError):
    """Ray tracing Newton step diverged; carries the last good vertex."""

    def __init__(self, message: str, last_vertex: complex | None = None):
        super().__init__(message)
        self.last_vertex = last_vertex

    def payload(self) -> dict:
        d = super().payload()
        if self.last_vertex is not None:
            d["last_vertex"] = [self.last_vertex.real, self.last_vertex.imag]
        return d


class InvalidWindow(FractalsymError):
    """Degenerate or too-narrow plane window."""


class RadiusMismatch(FractalsymError):
    """Hausdorff distance requested across different truncation radii."""


class EmptyWindow(FractalsymError):
    """A rescaled cloud has no interior points while the model does."""


class NoNormalForm(FractalsymError):
    """No composition with the dynamics normalizes the circle map within the bound."""


class LinkedConflict(FractalsymError):
    """No unlinked preimage assignment exists during lamination pullback."""


class MalformedFile(FractalsymError):
    """Serialized artifact failed to parse; message carries line/field info."""
