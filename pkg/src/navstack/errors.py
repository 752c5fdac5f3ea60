"""Error types shared across the stack.

Every domain failure raises a subclass of NavError so callers (CLI,
server) can map them to exit codes / protocol error replies uniformly.
"""


class NavError(Exception):
    """Base class for all domain errors."""


# -- map database parsing --------------------------------------------------

class MalformedFile(NavError):
    """Input bytes are not a decodable map database."""


class MissingField(NavError):
    """A required field is absent from the map database."""


class BadQuaternion(NavError):
    """Keyframe rotation norm deviates from 1 beyond tolerance."""


class UnsupportedVersion(NavError):
    """Map database version is not supported."""


class EmptyMap(NavError):
    """Map database has no keyframes to project."""


# -- occupancy grid --------------------------------------------------------

class NoPoints(NavError):
    """Grid construction needs at least one point."""


class OutOfBounds(NavError):
    """Point or cell index lies outside the grid extent."""


class MalformedGrid(NavError):
    """Grid encoding is not decodable or violates grid invariants."""


# -- planning ---------------------------------------------------------------

class StartOccupied(NavError):
    """Planning start cell is occupied."""


class GoalOccupied(NavError):
    """Planning goal cell is occupied."""


class NoPath(NavError):
    """Open set exhausted without reaching the goal."""


class NoFreeCells(NavError):
    """Grid has no unoccupied cell to snap to."""


class EmptyPath(NavError):
    """Controller was given a path with no cells."""


# -- simulation -------------------------------------------------------------

class StartInObstacle(NavError):
    """Vehicle start position lies in an occupied cell."""


class InvalidDt(NavError):
    """Simulation step size outside (0, 0.5]."""


class CommandOutOfLimits(NavError):
    """Command exceeds configured velocity limits."""


class InvalidSector(NavError):
    """LiDAR sector outside (0, 2*pi]."""


class InvalidRayCount(NavError):
    """LiDAR needs at least one ray."""


# -- protocol ---------------------------------------------------------------

class BadMessage(NavError):
    """Frame is malformed, has an unknown type, or wrong field shape."""
