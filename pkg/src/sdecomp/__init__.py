"""Decide s-decomposability of weighted diagrams and build their unfoldings."""

from __future__ import annotations

__version__ = "0.1.0"
