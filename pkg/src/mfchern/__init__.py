"""Exact Chern characters for global matrix factorizations.

Everything is computed over Q in exact arithmetic: schemes are presented by
finite ordered affine covers, bundles by transition cocycles, and all the
chain-level character maps land in Cech cochains valued in differential forms
with a formal even variable u.
"""

__version__ = "0.1.0"
