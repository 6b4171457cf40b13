"""Game-semantics engine: formulas as two-player games, strategies as
interactive machines, proofs compiled into winning strategies."""

__version__ = "0.1.0"
