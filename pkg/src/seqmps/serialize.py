"""Helpers for JSON round-tripping of complex arrays.

Complex entries are encoded as [re, im] pairs.  Floats go through Python's
json module, whose shortest-repr encoding round-trips IEEE doubles exactly
(equivalent in fidelity to a fixed 17-significant-digit encoding).
"""

from __future__ import annotations

import numpy as np

SCHEMA = "seqmps/1"


def complex_to_pairs(a: np.ndarray) -> list:
    """Nested lists mirroring a's shape, innermost entries [re, im]."""
    a = np.asarray(a, dtype=complex)
    stacked = np.stack([a.real, a.imag], axis=-1)
    return stacked.tolist()


def pairs_to_complex(pairs) -> np.ndarray:
    """Inverse of complex_to_pairs."""
    arr = np.asarray(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def fmt17(x: float) -> str:
    """Format a float with 17 significant digits (CSV cells)."""
    return format(float(x), ".17g")
