"""Exact toolkit for Sklyanin-type matrix realizations and the discovery of
their Racah-Wigner structure: closed-form and solver-based Q, classical
Poisson-bracket audits, T-family and structure-constant discovery via formal
Jacobi identities, degree-3 confluence checks, and a deterministic CLI."""

__version__ = "0.1.0"

from .discovery import discover  # noqa: E402,F401
from .realization import SklyaninParams, realize  # noqa: E402,F401
