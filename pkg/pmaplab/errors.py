from __future__ import annotations

from typing import Any


class PmaplabError(RuntimeError):
    """Base class for every error raised by the library.

    Keyword arguments are kept on ``context`` so callers and the CLI can report
    which subset, index or retry triggered the failure.
    """

    def __init__(self, message: str = "", **context: Any) -> None:
        super().__init__(message)
        self.context: dict[str, Any] = dict(context)

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"error": type(self).__name__, "message": str(self)}
        if self.context:
            payload["context"] = {key: _jsonable(value) for key, value in self.context.items()}
        return payload


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(item) for item in items]
    return str(value)


class InvalidField(PmaplabError):
    """Field description is malformed, not prime, or of characteristic 2."""


class InvalidInput(PmaplabError):
    """Serialized matrix or instance does not match the expected format."""


class DegenerateEquation(PmaplabError):
    """Every field element solves the quadratic."""


class FieldTooSmall(PmaplabError):
    """Not enough distinct field elements for interpolation or scanning."""


class NotACut(PmaplabError):
    pass


class ZeroOffDiagonal(PmaplabError):
    pass


class PartitionMismatch(PmaplabError):
    pass


class SeedNotSatisfying(PmaplabError):
    pass


class SingularShift(PmaplabError):
    """det(A + D) vanished for the sampled diagonal shift."""


class NoRoot(PmaplabError):
    """The quadratic has no root; the oracle is not a minor oracle of a dense matrix."""


class TooLarge(PmaplabError):
    """Exhaustive routine refused an instance beyond its size limit."""


class NoRemovableIndex(PmaplabError):
    pass


class NoCandidateAccepted(PmaplabError):
    pass


class ZeroCouplingEntry(PmaplabError):
    pass


class TransitivityViolation(PmaplabError):
    """Pairwise irreducibility is not transitive inside a discovered block."""


class RetriesExhausted(PmaplabError):
    pass


class SingularAlways(PmaplabError):
    pass


class SingularAssembly(PmaplabError):
    pass


class IsolationFailed(PmaplabError):
    pass


class NotPmapShaped(PmaplabError):
    """Rank-one factors do not assemble into square invertible U, V."""


__all__ = [
    "PmaplabError",
    "InvalidField",
    "InvalidInput",
    "DegenerateEquation",
    "FieldTooSmall",
    "NotACut",
    "ZeroOffDiagonal",
    "PartitionMismatch",
    "SeedNotSatisfying",
    "SingularShift",
    "NoRoot",
    "TooLarge",
    "NoRemovableIndex",
    "NoCandidateAccepted",
    "ZeroCouplingEntry",
    "TransitivityViolation",
    "RetriesExhausted",
    "SingularAlways",
    "SingularAssembly",
    "IsolationFailed",
    "NotPmapShaped",
]
