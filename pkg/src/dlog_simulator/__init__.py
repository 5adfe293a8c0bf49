"""Classical simulator for Shor's discrete-logarithm algorithm with padding."""

__version__ = "0.1.0"
