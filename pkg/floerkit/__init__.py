"""
Floerkit - knot Floer complexes over F_2[U, U^-1].

Invariants, surgery ranks and classification of almost L-space knot
complexes, with a command line and a small JSON API.
"""

__version__ = "0.1.0"
