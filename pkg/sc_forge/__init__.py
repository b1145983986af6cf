"""sc-forge: exact finite checks for small-cancellation presentations and δ-hyperbolic graphs."""

__version__ = "1.0.0"
