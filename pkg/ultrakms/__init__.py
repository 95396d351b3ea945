"""KMS and ground states of ultragraph C*-algebras, computed combinatorially."""

__version__ = "0.1.0"
