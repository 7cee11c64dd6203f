"""fractalsym: numerical lab for quadratic dynamics, self-similarity and symmetry."""

__version__ = "0.1.0"
