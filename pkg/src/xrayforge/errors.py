"""Exception hierarchy for xrayforge.

Every failure mode raised by the library derives from :class:`XrayForgeError`,
so callers (and the CLI) can distinguish data problems from genuine bugs with
a single ``except`` clause.
"""


class XrayForgeError(Exception):
    """Base class for all errors raised by this package."""


# raster / mask validation

class OutOfRangeError(XrayForgeError):
    """Intensity or mask value outside [0, 1]."""


class BadDimensionsError(XrayForgeError):
    """Raster shape violates the data model (wrong rank, channels, or < 16 px)."""


class DimensionMismatchError(XrayForgeError):
    """Operands that must share dimensions do not."""


# landmarks / donor search

class CountMismatchError(XrayForgeError):
    """Landmark sets with different point counts."""


class MalformedLandmarksError(XrayForgeError):
    """Landmark file unreadable, wrong schema, < 3 points, or out of bounds."""


class EmptyPoolError(XrayForgeError):
    """No candidate donors available for a background face."""


class UnknownIdError(XrayForgeError):
    """Requested id not present in the corpus or manifest."""


# mask construction

class DegenerateHullError(XrayForgeError):
    """Landmarks are collinear; the convex hull has no area."""


class OutOfBoundsError(XrayForgeError):
    """Landmark coordinates fall outside the target raster."""


class DegenerateTriangleError(XrayForgeError):
    """Affine estimation from a zero-area triangle."""


class EmptyMaskError(XrayForgeError):
    """Operation requires a nonempty mask support."""


# compositing

class EmptySupportError(XrayForgeError):
    """Color statistics requested over an empty mask support."""


class EmptyRegionError(XrayForgeError):
    """Poisson region is empty after binarization."""


class RegionTouchesBorderError(XrayForgeError):
    """Poisson region must lie strictly inside the image."""


class NonConvergenceError(XrayForgeError):
    """Iterative solve did not reach the residual tolerance."""


# corpus / manifest persistence

class NoEntriesError(XrayForgeError):
    """Corpus directory has no usable (image, landmarks) pairs."""


class UnreadableFileError(XrayForgeError):
    """File missing or not decodable."""


class CorruptManifestError(XrayForgeError):
    """Manifest violates its invariants or cannot be parsed."""


class MissingFileError(XrayForgeError):
    """Manifest references a file that does not exist."""


class VersionMismatchError(XrayForgeError):
    """Manifest format tag is not one this build understands."""


# metrics

class OneClassOnlyError(XrayForgeError):
    """Rank metric needs both a positive and a negative example."""


class NoPositivesError(XrayForgeError):
    """Average precision needs at least one positive."""


# forensics

class CodecUnavailableError(XrayForgeError):
    """JPEG roundtrip support is not available in this environment."""
