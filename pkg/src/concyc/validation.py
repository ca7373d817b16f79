"""Input validation helpers shared by the library and the estimators."""

from __future__ import annotations

import numpy as np

GENERIC_REL_GAP = 1e-12


def check_radii(radii, n: int | None = None) -> np.ndarray:
    """Validate a radius vector and return it as a float array.

    Requires at least three strictly positive, finite entries.
    """
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1:
        raise ValueError(f"radii must be a 1-d sequence, got shape {r.shape}")
    if n is not None and r.size != n:
        raise ValueError(f"expected {n} radii, got {r.size}")
    if r.size < 3:
        raise ValueError(f"need at least 3 circles, got {r.size}")
    if not np.all(np.isfinite(r)):
        raise ValueError("radii must be finite")
    if np.any(r <= 0):
        raise ValueError("radii must be strictly positive")
    return r.copy()


def check_config(config, n: int, *, batch: bool = False) -> np.ndarray:
    """Validate a reduced configuration (n-1 polar angles), reduced mod 2*pi.

    With ``batch=True`` an array of shape (B, n-1) is accepted as well.
    """
    a = np.asarray(config, dtype=float)
    if batch and a.ndim == 2:
        pass
    elif a.ndim != 1:
        raise ValueError(f"configuration must be 1-d, got shape {a.shape}")
    if a.shape[-1] != n - 1:
        raise ValueError(f"expected {n - 1} angles for n={n}, got {a.shape[-1]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("angles must be finite")
    return np.mod(a, 2.0 * np.pi)


def is_generic(radii, rel_gap: float = GENERIC_REL_GAP) -> bool:
    """True when all radii are pairwise distinct (relative gap above ``rel_gap``)."""
    r = np.asarray(radii, dtype=float)
    diff = np.abs(r[:, None] - r[None, :])
    scale = np.maximum(r[:, None], r[None, :])
    off = ~np.eye(r.size, dtype=bool)
    return bool(np.all(diff[off] > rel_gap * scale[off]))
