"""Exception hierarchy shared by the engine, simulator and CLI."""


class BoomerangError(Exception):
    pass


class IdentityError(BoomerangError, KeyError):
    """Unknown worker, requester, project, task or submission id."""

    def __str__(self):
        return Exception.__str__(self)


class StateError(BoomerangError):
    """Operation not allowed in the object's current lifecycle state."""


class AccessDenied(BoomerangError):
    """Worker's effective rating is below the project's release threshold."""


class PermissionDenied(BoomerangError):
    """Actor does not own the object it tried to act on."""


class OrderingError(BoomerangError):
    """A tick went backwards."""


class DomainError(BoomerangError, ValueError):
    pass


class ScenarioError(BoomerangError, ValueError):
    """Invalid scenario; message starts with the offending field path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class LogParseError(BoomerangError, ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
