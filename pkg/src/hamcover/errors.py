"""Exception hierarchy shared by every module."""

from __future__ import annotations


class HamcoverError(Exception):
    """Base class for all library errors."""


class GraphInputError(HamcoverError, ValueError):
    pass


class SelfLoop(GraphInputError):
    def __init__(self, u: int):
        super().__init__(f"self-loop at vertex {u}")
        self.u = u


class VertexOutOfRange(GraphInputError):
    def __init__(self, u: int, n: int):
        super().__init__(f"vertex {u} outside 0..{n - 1}")
        self.u = u
        self.n = n


class DuplicateEdge(GraphInputError):
    def __init__(self, u: int, v: int):
        super().__init__(f"duplicate edge {{{u}, {v}}}")
        self.u = u
        self.v = v


class PreconditionViolated(HamcoverError, ValueError):
    """An operation was called outside its documented domain.

    ``witness`` names the offending object (vertex, pair, hypothesis name, ...).
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ModeUnavailable(HamcoverError):
    pass


class TooLarge(HamcoverError):
    pass


class NotBipartite(HamcoverError):
    def __init__(self, witness):
        super().__init__(f"graph is not bipartite w.r.t. the given sides; witness {witness}")
        self.witness = witness


class MatchingIncomplete(HamcoverError):
    pass


class DecompositionFailed(HamcoverError):
    """A linear-forest decomposition could not be completed within its budget."""


class BudgetExceeded(HamcoverError):
    def __init__(self, needed: int, allowed: int):
        super().__init__(f"needs {needed} linear forests, only {allowed} allowed")
        self.needed = needed
        self.allowed = allowed


class MergeInfeasible(HamcoverError):
    def __init__(self, max_degree: int, group_size: int):
        super().__init__(
            f"merge group of size {group_size} is below 4*{max_degree}+1"
        )
        self.max_degree = max_degree
        self.group_size = group_size


class SearchFailed(HamcoverError):
    """Randomized search gave up. Not a proof that no solution exists."""

    def __init__(self, steps_used: int, message: str = "search budget exhausted"):
        super().__init__(f"{message} after {steps_used} steps")
        self.steps_used = steps_used


class ConnectionFailed(SearchFailed):
    def __init__(self, steps_used: int, completed_pairs: int):
        super().__init__(steps_used, f"connected only {completed_pairs} pairs")
        self.completed_pairs = completed_pairs


class PhaseFailure(HamcoverError):
    def __init__(self, phase: int | str, state: dict | None = None):
        super().__init__(f"phase {phase!r} failed")
        self.phase = phase
        self.state = state or {}


class MalformedInput(HamcoverError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
