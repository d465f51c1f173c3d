"""Deterministic beeping-model simulator with broadcast and gossip protocols."""

__version__ = "0.1.0"
