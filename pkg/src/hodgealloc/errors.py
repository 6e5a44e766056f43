"""Exception hierarchy shared by every module in the package."""


class HodgeAllocError(Exception):
    """Base class for all errors raised by this library."""


# -- graph construction and queries -----------------------------------------

class DuplicateState(HodgeAllocError):
    """A state label occurs more than once."""


class DuplicateEdge(HodgeAllocError):
    """An edge (or its reverse orientation) was supplied twice."""


class NonpositiveWeight(HodgeAllocError):
    """An edge or vertex weight is zero or negative."""


class MissingNullState(HodgeAllocError):
    """No state is flagged as the null (initial) state."""


class SelfLoop(HodgeAllocError):
    """An edge connects a state to itself."""


class NotAnEdge(HodgeAllocError):
    """Queried state pair is not adjacent in either orientation."""


class NonzeroNullValue(HodgeAllocError):
    """Game values must vanish at the null state."""


class DimensionMismatch(HodgeAllocError):
    """Arguments are defined on different graphs or have wrong length."""


# -- solvers ------------------------------------------------------------------

class SolverDidNotConverge(HodgeAllocError):
    """Iterative solve hit its iteration cap without meeting the residual."""


class MissingAnchor(HodgeAllocError):
    """A connected component has no anchor state."""


class DuplicateAnchor(HodgeAllocError):
    """A connected component has more than one anchor state."""


class UnreachableTarget(HodgeAllocError):
    """Start and target states lie in different connected components."""


# -- Markov chain engine ------------------------------------------------------

class IsolatedState(HodgeAllocError):
    """A state has no incident edges, so the chain cannot leave it."""


class Disconnected(HodgeAllocError):
    """Operation requires a connected graph."""


class NotAWalk(HodgeAllocError):
    """State sequence is not a closed walk along graph edges."""


class TruncatedPath(HodgeAllocError):
    """Sampled path was cut off before reaching its target."""


class AllPathsTruncated(HodgeAllocError):
    """Every sampled path hit the step cap; no estimate available."""


# -- coalition machinery -------------------------------------------------------

class TooLarge(HodgeAllocError):
    """Problem size exceeds the guard for this operation."""


class PlayerOutOfRange(HodgeAllocError):
    """Player index is not in 0..N-1."""


class InvalidEdge(HodgeAllocError):
    """Edge does not have the inclusion structure the scheme requires."""


# -- strategic games ------------------------------------------------------------

class LPNumericalFailure(HodgeAllocError):
    """Linear program solve failed or its certificate check did not hold."""


class AntisymmetryViolated(HodgeAllocError):
    """Threat powers of complementary coalitions do not negate each other."""


# -- file formats -----------------------------------------------------------------

class ParseError(HodgeAllocError):
    """Input file is malformed; message carries the offending field or line."""


class ValidationError(HodgeAllocError):
    """Parsed file content failed graph/game validation."""
