"""Finite, exhaustively checked models of group-operad-symmetric categories of operators."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
