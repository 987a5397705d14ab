"""Colored-cell complexes, 3D color codes, and transversal-T error propagation."""

from __future__ import annotations

__version__ = "0.1.0"
