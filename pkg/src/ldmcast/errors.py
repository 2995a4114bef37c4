"""Exception types shared across the package."""


class ScenarioInfeasible(Exception):
    """A scenario admits no point meeting the multicast QoS or power budget.

    ``constraint`` names the failing constraint family and ``slack`` carries
    the most negative slack found (in linear units), when known.
    """

    def __init__(self, message, constraint="multicast", slack=None):
        super().__init__(message)
        self.constraint = constraint
        self.slack = slack


class SingularConfiguration(ScenarioInfeasible):
    """Stacked effective channels are rank deficient; zero forcing is impossible."""

    def __init__(self, message, slack=None):
        super().__init__(message, constraint="zero-forcing", slack=slack)


class InternalConsistencyError(RuntimeError):
    """A subproblem that must be feasible by construction was reported infeasible."""

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump
