"""Exception types raised by the library."""


class MemleakError(ValueError):
    """Base class for all library errors."""


class MalformedInput(MemleakError):
    """A series or labels file could not be parsed."""


class WindowTooSmall(MemleakError):
    pass


class DegenerateTime(MemleakError):
    pass


class EmptySeries(MemleakError):
    pass


class InvalidSpec(MemleakError):
    pass


class MissingLabel(MemleakError):
    pass


class UnknownAlgorithm(MemleakError):
    pass
