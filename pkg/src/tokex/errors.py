"""Exception hierarchy.

Everything raised deliberately by the library derives from :class:`TokexError`.
Log and config problems derive from :class:`ValidationError` so the CLI can map
them to exit status 2.
"""

from __future__ import annotations


class TokexError(Exception):
    """Base class for library errors."""


class ValidationError(TokexError):
    """An input file or in-memory game violates the data model."""


class ConfigError(ValidationError):
    pass


class MissingGiver(ValidationError):
    def __init__(self, round_: int, player: int):
        self.round = round_
        self.player = player
        super().__init__(f"round {round_}: player {player} gave no token")


class DuplicateGiver(ValidationError):
    def __init__(self, round_: int, player: int):
        self.round = round_
        self.player = player
        super().__init__(f"round {round_}: player {player} gave more than one token")


class IdOutOfRange(ValidationError):
    def __init__(self, record: tuple[int, int, int]):
        self.record = tuple(int(v) for v in record)
        super().__init__(f"record (round, giver, receiver) = {self.record} is out of range")


class RoundGap(ValidationError):
    def __init__(self, round_: int):
        self.round = round_
        super().__init__(f"round {round_} has no records")


class RoundOrderError(ValidationError):
    def __init__(self, position: int):
        self.position = position
        super().__init__(f"record {position} belongs to an earlier round than its predecessor")


class RoundOutOfRange(TokexError, IndexError):
    def __init__(self, round_: int, n_rounds: int):
        self.round = round_
        super().__init__(f"round {round_} outside 1..{n_rounds}")


class UnknownPlayer(TokexError, KeyError):
    def __init__(self, player):
        self.player = player
        super().__init__(f"unknown player id {player!r}")


class DimensionMismatch(TokexError, ValueError):
    pass


class SelfRowPresent(TokexError, ValueError):
    pass


class AllFitsDegenerate(TokexError):
    pass


class UnknownCoefficient(TokexError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown coefficient {name!r}")


class EmptyScope(TokexError, ValueError):
    pass
