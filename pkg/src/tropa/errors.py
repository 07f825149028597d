"""Exceptions shared across modules."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .terms import Term


class AutomatonSyntaxError(ValueError):
    pass


class AlphabetMismatch(ValueError):
    pass


class HypothesisViolation(Exception):
    """Evidence that the max automaton is not below the min automaton.

    ``witness`` is a concrete term on which the hypothesis fails when one
    could be produced; the remaining fields describe where it was detected.
    """

    def __init__(
        self,
        message: str,
        witness: Optional[Term] = None,
        *,
        cycle: Optional[Term] = None,
        max_state=None,
        min_state=None,
        max_cycle_weight: Optional[Fraction] = None,
        min_cycle_weight: Optional[Fraction] = None,
    ):
        super().__init__(message)
        self.witness = witness
        self.cycle = cycle
        self.max_state = max_state
        self.min_state = min_state
        self.max_cycle_weight = max_cycle_weight
        self.min_cycle_weight = min_cycle_weight


class BudgetExceeded(Exception):
    def __init__(self, message: str, frontier: int, states: int):
        super().__init__(message)
        self.frontier = frontier
        self.states = states


class InternalError(AssertionError):
    """A construction invariant failed; this is a bug, never a user error."""
