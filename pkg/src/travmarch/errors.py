"""Exception types raised across the toolkit."""


class TravmarchError(Exception):
    """Base class for all errors raised by this package."""


# --- map loading / geometry ---

class MalformedMap(TravmarchError):
    """Map document violates its own format (bad header, size mismatch, ...)."""


class UnsupportedFormat(TravmarchError):
    """Map document is in a format this package does not read."""


class OutOfBounds(TravmarchError):
    """A world point or cell index falls outside the grid."""


# --- wavefront propagation ---

class NoSources(TravmarchError):
    """Propagation was requested with an empty source set."""


class SourceOccupied(TravmarchError):
    """A propagation source sits on an occupied cell."""


class Unreachable(TravmarchError):
    """Descent was started from a cell the wavefront never reached."""


class StalledDescent(TravmarchError):
    """Descent found no decreasing direction; indicates a solver bug."""


# --- environment discretization ---

class EmptyFreeSpace(TravmarchError):
    """The map contains no free cells to discretize."""


class NoSeeds(TravmarchError):
    """Partitioning was requested with an empty seed list."""


class UnknownRegion(TravmarchError):
    """A region id is not present in the region graph."""


class NoObstaclesInSource(TravmarchError):
    """Dispersion was requested from a region without obstacle trajectories."""


class GoalUnreachableFromRobot(TravmarchError):
    """Robot and goal regions are not connected in the region graph."""


# --- planning ---

class NoPath(TravmarchError):
    """The wavefront never finalized the goal cell."""


class StartBlocked(TravmarchError):
    """The start position is occupied or impassable."""


class GoalBlocked(TravmarchError):
    """The goal position is occupied or impassable."""


# --- simulation / experiments / service ---

class InvalidConfig(TravmarchError):
    """A simulation configuration violates its invariants."""


class ConfigError(TravmarchError):
    """An experiment spec or scenario file is invalid."""


class InvalidTarget(TravmarchError):
    """A command names a world point that cannot be used."""


class UnknownObstacle(TravmarchError):
    """A command names an obstacle id that does not exist."""


class BindError(TravmarchError):
    """The service could not bind its listening address."""
