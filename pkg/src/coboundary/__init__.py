"""Exact checks for coboundary Poisson Lie groups, their quantizations and twisted Hopf coproducts."""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
