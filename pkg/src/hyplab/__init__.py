"""Hypergeometric exponential sums on reductive groups over finite fields."""
__version__ = "0.1.0"
