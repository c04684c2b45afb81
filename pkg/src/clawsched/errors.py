"""Exception hierarchy shared by every module.

Two families exist so the command line can map failures onto exit codes:
:class:`InputError` (malformed or inconsistent input, exit 2) and
:class:`DomainError` (a well-formed input for which the requested answer
does not exist or would be too expensive, exit 1).
"""

from __future__ import annotations

from typing import Any


class ClawschedError(Exception):
    """Base class for all errors raised by :mod:`clawsched`."""

    exit_code = 1


class InputError(ClawschedError, ValueError):
    """The input document or argument is invalid."""

    exit_code = 2


class NetworkFormatError(InputError):
    """A network document cannot be parsed into the expected structure."""


class DuplicateIdError(InputError):
    """Two nodes share the same identifier."""


class MissingPositionError(InputError):
    """A geometric network has a node without coordinates."""


class TreeStructureError(InputError):
    """A tree network has no unique root, a dangling parent, or a cycle."""


class InvalidParameterError(InputError):
    """A numeric parameter is out of its admissible range."""


class UnknownNodeError(InputError, KeyError):
    """A node identifier does not belong to the network."""

    def __str__(self) -> str:  # KeyError would otherwise repr() the message
        return str(self.args[0]) if self.args else ""


class UnknownVertexError(InputError, KeyError):
    """A vertex index does not belong to the conflict graph."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class DomainError(ClawschedError):
    """The request is well formed but cannot be answered."""

    exit_code = 1


class ScenarioViolationError(DomainError):
    """The network breaks a blocking premise of the requested scenario.

    Parameters
    ----------
    report : ValidationReport
        The full report; ``report.blocking`` lists the offending entries.
    """

    def __init__(self, report: Any) -> None:
        self.report = report
        lines = "; ".join(v.message for v in report.blocking)
        super().__init__(f"scenario {report.scenario.value} premises violated: {lines}")


class CapExceededError(DomainError):
    """An exponential enumeration would exceed its configured size cap."""


class NotClawFreeError(DomainError):
    """The claw-free solver was handed a graph that contains a claw.

    Attributes
    ----------
    witness : ClawWitness
        The lexicographically first claw found.
    description : str
        Human-readable form of the witness, e.g. ``"(A,B); (E,B),(F,C),(G,D)"``.
    """

    def __init__(self, witness: Any, description: str) -> None:
        self.witness = witness
        self.description = description
        super().__init__(f"graph contains a claw: {description}")
