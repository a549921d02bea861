"""Connectedness and tile tests for T(A, D) with A = [[p, 0], [l, q]] and D = E_m x E_n."""

from .params import AffinePair, RationalInterval, normalize_sign, parse_rational, validate

__all__ = ["AffinePair", "RationalInterval", "normalize_sign", "parse_rational", "validate"]
__version__ = "0.1.0"
