"""Smooth compactly supported bump profiles, defined in closed form.

Two shapes cover every construction in the package:

* a pure mollifier  exp(1 - 1/(1 - (u/r)^2))  on |u| < r, and
* a plateau bump equal to 1 on |u| <= a, falling to 0 at |u| = r through
  the C-infinity step h(t)/(h(t) + h(1-t)) with h(t) = exp(-1/t).

Profiles are radial in the max norm; in several variables the profile is
evaluated at |x|_inf, so support control is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["BumpSpec", "smooth_step"]


def _h(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, strictly increasing between."""
    t = np.asarray(t, dtype=float)
    ht = _h(t)
    return ht / (ht + _h(1.0 - t))


@dataclass(frozen=True)
class BumpSpec:
    """Even smooth bump with support radius `radius` (in the max norm).

    plateau: inner radius on which the profile equals 1; None selects the
    pure mollifier shape.  normalization applies at sampling time:
    'none', 'unit_sup' (peak 1, automatic for the plateau shape) or
    'unit_l2' (used by callers that need unit-normalized test functions).
    """

    radius: float
    plateau: float | None = None
    normalization: str = "none"

    def __post_init__(self):
        if not 0 < self.radius:
            raise ValueError("radius must be positive")
        if self.plateau is not None and not 0 < self.plateau < self.radius:
            raise ValueError("plateau must lie strictly inside the support")
        if self.normalization not in ("none", "unit_sup", "unit_l2"):
            raise ValueError(f"unknown normalization {self.normalization!r}")

    def profile(self, u) -> np.ndarray:
        """Profile value at scalar distance(s) u >= 0 from the center."""
        u = np.abs(np.asarray(u, dtype=float))
        if self.plateau is None:
            out = np.zeros_like(u)
            inside = u < self.radius
            s = u[inside] / self.radius
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - s * s))
            if self.normalization == "unit_sup":
                pass  # exp(1 - 1/(1 - 0)) = 1 at the center already
            return out
        a, r = self.plateau, self.radius
        return smooth_step((r - u) / (r - a))

    def sample(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at points x of shape (..., d) using the max norm."""
        x = np.asarray(x, dtype=float)
        u = np.max(np.abs(x), axis=-1) if x.ndim > 1 else np.abs(x)
        return self.profile(u)

    def sample_1d(self, u) -> np.ndarray:
        return self.profile(u)
