"""Exception hierarchy. Everything raised by this package derives from DPGError."""


class DPGError(Exception):
    """Base class for all errors raised by the dpg package."""


class EnsembleFormatError(DPGError):
    """Model file does not parse or violates the portable-ensemble schema."""


class DatasetError(DPGError):
    """Dataset file or array is malformed (ragged rows, bad cells, missing labels)."""


class TraversalError(DPGError):
    """A sample could not be routed through a tree (e.g. non-finite feature value)."""


class GraphFormatError(DPGError):
    """Graph file does not parse or violates the graph JSON schema."""
