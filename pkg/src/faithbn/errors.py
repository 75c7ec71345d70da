"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Malformed or inconsistent input (unknown vertex, overlapping sets, bad document)."""


class CycleError(InputError):
    def __init__(self, vertices):
        self.vertices = frozenset(vertices)
        super().__init__(f"graph has a directed cycle through {sorted(self.vertices)}")


class PreconditionError(ValueError):
    """An operation was called outside its stated domain."""


class GuardError(ValueError):
    """Input is larger than the exhaustive-computation guard allows."""
