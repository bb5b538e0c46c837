"""Clone minors, C-equivalence classes and labeled group trees on small finite sets."""

__version__ = "0.1.0"
