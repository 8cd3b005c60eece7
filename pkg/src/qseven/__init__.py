"""Certified arithmetic for the quartic fields Q(⁴√-q), q prime, q = 7 mod 8.

Exact and 2-adic invariants of the fields K = Q(√-q), D+ = Q(√q),
D = Q(i, √q) and F = Q(alpha) with alpha^4 = -q: class group data,
fundamental units with certificates, valuations of 2-adic logarithms,
index formula evaluations, and rigorous L-series bound chains.
"""

__version__ = "0.1.0"
