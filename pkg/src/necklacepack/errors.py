"""Exception hierarchy for the necklace pipeline.

Errors fall into three rough bands, mirrored by the CLI exit codes:
input problems (bad PD codes), numerical failures (packing or algebra
breakdowns), and internal invariant violations that indicate a bug.
"""


class NecklaceError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------------------
# diagram input errors (CLI exit code 2)


class DiagramError(NecklaceError):
    """Base for malformed or unusable link diagram input."""


class PDSyntaxError(DiagramError):
    """A token in the PD text does not parse as X(a,b,c,d)."""


class LabelError(DiagramError):
    """Arc labels do not each occur exactly twice."""


class NonPlanar(DiagramError):
    """The rotation system implied by the PD code has no sphere embedding."""


class Nugatory(DiagramError):
    """A crossing uses the same arc twice (a reducible kink)."""


class Disconnected(DiagramError):
    """The underlying 4-valent graph is not connected."""


# ---------------------------------------------------------------------------
# numerical / geometric failures (CLI exit code 3)


class NumericalError(NecklaceError):
    """Base for numerical failures in packing or ball algebra."""


class NoConvergence(NumericalError):
    """Radius iteration failed to reach the target residual."""


class LayoutInconsistent(NumericalError):
    """Laying out disks produced conflicting positions for a vertex."""


class DegenerateRadius(NumericalError):
    """A ball was requested with zero, negative, or non-finite radius."""


class UnnormalizedNormal(NumericalError):
    """A half-space was requested with a non-unit normal vector."""


class NumericallyDegenerate(NumericalError):
    """Coordinates too close to the light cone to classify as ball or half-space."""


class DimensionMismatch(NumericalError):
    """Operands live in different inversive dimensions."""


class NotTangent(NumericalError):
    """A construction requiring tangent balls received a non-tangent pair."""


class NormalizationDrift(NumericalError):
    """Inversive coordinates drifted off the unit quadric beyond tolerance."""


class BadStar(NumericalError):
    """The four disks around a crossing do not form a tangent 4-cycle."""


class DegeneratePacking(NumericalError):
    """Opposite-pair product is outside the range a disk packing can produce."""


class CollinearTangencyPoints(NumericalError):
    """Tangency points of a pyramidal star admit no common tangent circle."""


class SingularBasis(NumericalError):
    """A polyspherical basis matrix is numerically singular."""


class RegionViolation(NumericalError):
    """A constructed ball escapes the region its crossing permits."""


class ThreadBroken(NumericalError):
    """Consecutive thread balls are not externally tangent."""


# ---------------------------------------------------------------------------
# everything else


class InternalError(NecklaceError):
    """An internal invariant failed; this is a bug, not bad input."""


class UnsupportedFormat(NecklaceError):
    """Requested export format is not one of json, csv, obj, svg."""
