"""Shared constants and builders for the fracplap tests."""

from .operators import EXPONENTS, N_NODES, ORDERS, S, make_context, smooth_profile

__all__ = ["EXPONENTS", "N_NODES", "ORDERS", "S", "make_context", "smooth_profile"]
