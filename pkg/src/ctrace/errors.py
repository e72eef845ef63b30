"""Shared exception types."""


class PreconditionFailed(ValueError):
    """A stated precondition of an operation does not hold.

    Carries an optional exact witness, e.g. the point at which an
    inequality fails.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class Infeasible(Exception):
    """No admissible perturbation exists for the given instance.

    Carries the witness point at which every candidate fails.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
