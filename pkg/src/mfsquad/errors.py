"""Exception hierarchy for the quadrangulation pipeline."""


class MfsquadError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(MfsquadError):
    pass


class NotSimple(InvalidInput):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DegeneratePolygon(InvalidInput):
    pass


class CrossingEdges(InvalidInput):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DuplicateVertex(InvalidInput):
    pass


class DisconnectedDrawing(MfsquadError):
    pass


class NoNonIncidentPair(MfsquadError):
    pass


class OffsetTooLarge(MfsquadError):
    pass


class OddN(InvalidInput):
    pass


class TooLarge(InvalidInput):
    pass


class GenerationBudgetExceeded(MfsquadError):
    pass


class InternalError(MfsquadError):
    """A construction invariant failed. ``stage`` names the pipeline stage."""

    stage = "internal"

    def __init__(self, message, stage=None, **details):
        super().__init__(message)
        if stage is not None:
            self.stage = stage
        self.details = details

    def __str__(self):
        return f"[{self.stage}] {super().__str__()}"


class OffsetCollapse(InternalError):
    stage = "tube"


class GridPointOutsideCircle(InternalError):
    stage = "snap"


class SelfIntersectingInner(InternalError):
    stage = "snap"


class ChordCrossing(InternalError):
    stage = "chords"
