"""Exception types shared by all modules.

Every error carries a short machine-readable ``code`` (the class name) so the
command line front end can report it uniformly.
"""


class NpcError(Exception):
    """Base class for every error raised by the package."""

    @property
    def code(self):
        return type(self).__name__


class ParseError(NpcError):
    pass


class ValidationError(NpcError):
    pass


class UnknownVertex(NpcError):
    pass


class MissingTags(NpcError):
    pass


class NotSubdivided(NpcError):
    pass


class NonBijectiveMap(NpcError):
    pass


class NotNPC(NpcError):
    pass


class ResourceLimit(NpcError):
    pass


class NotCSC(NpcError):
    pass


class NotOneVertex(NpcError):
    pass


class LeavesBall(NpcError):
    pass


class DifferentFibers(NpcError):
    pass


class DepthExceedsBall(NpcError):
    pass


class BoundaryUnsafe(NpcError):
    pass


class UnlabeledClass(NpcError):
    pass


class MissingIndependence(NpcError):
    pass


class WordsEqual(NpcError):
    pass


class NotNice(NpcError):
    pass


class PaletteOverlap(NpcError):
    pass


class TranscriptionIncomplete(NpcError):
    pass


class FoldConflict(NpcError):
    """Square closing tried to identify two vertices over different base vertices."""
