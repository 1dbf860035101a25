"""Exception types shared across the package."""


class GameError(Exception):
    """Base class for all errors raised by this package."""


class InvalidNodeError(GameError):
    """A node index is out of range or an edge has equal endpoints."""


class IllegalMoveError(GameError):
    """An already-claimed edge was claimed again."""


class ExhaustedError(GameError):
    """An operation needed an unclaimed edge but none remain."""


class SingularBalanceError(GameError):
    """The balance denominator vanished for the given Maker-degree."""


class OutOfRegimeError(GameError):
    """A diagnostic formula was evaluated outside its valid regime."""


class InvalidParametersError(GameError):
    """A parameter set violates a construction-time constraint."""


class ReplayError(GameError):
    """A move log or turn plan is inconsistent with the game state."""
