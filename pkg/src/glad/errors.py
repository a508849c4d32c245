"""Exception hierarchy shared by every module."""


class GladError(Exception):
    """Base class for all errors raised by the package."""


class ValidationError(GladError, ValueError):
    pass


class MissingVertex(ValidationError):
    def __init__(self, vertex):
        super().__init__(f"layout does not assign vertex {vertex}")
        self.vertex = vertex


class UnknownServer(ValidationError):
    def __init__(self, server):
        super().__init__(f"unknown edge server {server}")
        self.server = server


class UnknownVertex(ValidationError):
    def __init__(self, vertex):
        super().__init__(f"unknown vertex {vertex}")
        self.vertex = vertex


class SelfLoop(ValidationError):
    def __init__(self, vertex, line=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"self-loop on vertex {vertex}{where}")
        self.vertex = vertex
        self.line = line


class DuplicateLink(ValidationError):
    def __init__(self, u, v):
        super().__init__(f"link {{{u}, {v}}} already exists")
        self.link = (u, v)


class MissingLink(ValidationError):
    def __init__(self, u, v):
        super().__init__(f"link {{{u}, {v}}} does not exist")
        self.link = (u, v)


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class ConfigError(ValidationError):
    """Invalid configuration value; ``field`` is a dotted path into the config."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.detail = message


class EmptyInput(ValidationError):
    pass


class UnreachablePair(GladError):
    """A layout needs traffic between two servers that are not connected."""

    def __init__(self, i, j):
        super().__init__(f"servers {i} and {j} are not connected")
        self.pair = (i, j)


class PairNotConnected(GladError):
    def __init__(self, i, j):
        super().__init__(f"servers {i} and {j} are not connected")
        self.pair = (i, j)


class NoConnectedPairs(GladError):
    pass


class TooLarge(GladError):
    """Exhaustive search space exceeds the configured guard."""

    def __init__(self, states, max_states):
        super().__init__(f"{states} states exceed the limit of {max_states}")
        self.states = states
        self.max_states = max_states
