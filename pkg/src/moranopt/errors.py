"""Exception hierarchy for moranopt.

Every error raised by the library derives from :class:`MoranOptError` so
callers can catch library failures in one place.  Step-cap hits are *not*
errors: a capped trajectory is a distinguished outcome reported through
``TrajectoryStats.capped`` / ``FixationEstimate.capped_runs``.
"""


class MoranOptError(Exception):
    """Base class for all moranopt errors."""


# -- graph construction / validation -----------------------------------------

class GraphError(MoranOptError):
    """Base class for fitness-graph validation failures."""


class NotStronglyConnected(GraphError):
    pass


class NonPositiveFitness(GraphError):
    pass


class BadDistribution(GraphError):
    """Per-node out-weights do not form a probability distribution."""


class DanglingNode(GraphError):
    """A node index in [0, n) has no outgoing arc, or an arc endpoint is out of range."""


class SelfLoopNotAllowed(GraphError):
    """Self-loops are rejected in base-process graphs (loopy kernels add them internally)."""


class NegativeDelta(GraphError):
    pass


class NotNeutral(GraphError):
    pass


class NotUndirected(GraphError):
    pass


class DirectedGraphUnsupported(MoranOptError):
    """Operation defined only for undirected graphs (degree-based quantities)."""


# -- solvers ------------------------------------------------------------------

class TooLarge(MoranOptError):
    """State space exceeds the configured exact-solver cap."""


class SingularSystem(MoranOptError):
    """The absorbing-chain system is singular; signals a non-strongly-connected bug upstream."""


class NoConvergence(MoranOptError):
    """Iterative solver failed to reach its tolerance within the iteration cap."""


# -- estimation ----------------------------------------------------------------

class AllRunsCapped(MoranOptError):
    """No Monte Carlo run reached absorption within the step cap."""


class NotApplicable(MoranOptError):
    """Bound or check requires an undirected mutant-biased graph."""


# -- reductions / experiments ---------------------------------------------------

class EmptySet(MoranOptError):
    """Set-cover instance contains an empty set (or empty family/universe)."""


class EpsOutOfRange(MoranOptError):
    """Gap parameter must lie in (0, 1/2)."""


class BadRange(MoranOptError):
    """Fitness sampling range is invalid (m_max < 1)."""


class ParseError(MoranOptError):
    """Input file could not be parsed; message carries the line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
