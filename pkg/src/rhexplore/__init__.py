"""Numerical exploration of zeta, L-functions and their zeros."""
from .kernels import BACKEND

__version__ = "0.1.0"
