"""Ends, critical vertex sets and tangle spaces of finitely presented infinite graphs."""

__version__ = "0.1.0"
