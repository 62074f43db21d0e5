"""Exact and asymptotic analysis of vicious lock-step walkers."""

__version__ = "0.1.0"

from ._accel import backend_name  # noqa: E402,F401
