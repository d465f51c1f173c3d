from __future__ import annotations

from ..engine import Automaton


class ProtocolError(RuntimeError):
    """A protocol invariant broke at run time (e.g. a scrambled frame)."""


class SubAutomaton(Automaton):
    """Automaton that may run inside a composite node and share its event list."""

    def __init__(self, events: list[str] | None = None) -> None:
        self.events = [] if events is None else events
        self.done = False
