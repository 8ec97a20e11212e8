class InvalidInput(ValueError):
    """Raised when an operation's documented precondition is violated."""


class StageFailure(RuntimeError):
    """A constructive step could not complete at this scale.

    `stage` names the step so callers (and reports) can tell where it broke.
    """

    def __init__(self, stage, message=""):
        super().__init__(f"{stage}: {message}" if message else stage)
        self.stage = stage
        self.message = message
