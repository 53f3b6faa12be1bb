"""Exact symbolic workbench for polynomial functional equations in generalized monomials."""

from polysym.fields import Poly, QuadExt, RatFunc

__all__ = ["Poly", "QuadExt", "RatFunc"]
__version__ = "0.1.0"
