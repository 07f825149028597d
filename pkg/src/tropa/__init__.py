"""Separation of max-plus and min-plus tree automata by an unambiguous tropical automaton."""

__version__ = "0.1.0"
