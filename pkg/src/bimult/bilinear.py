"""Bilinear multiplier evaluation for band-limited inputs and sampled symbols.

The symbol m(xi, eta) is sampled on the lattice {-F..F}^{2n} with grid
spacing h; the spectral inputs live on a torus of period L = 1/h, so
lattice index p of either object refers to the same frequency p * h.
The operator output is band-limited to [-2F_in, 2F_in] per axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import FrequencyBox, PhysicalField, SpectralVector, l1_norm, l2_norm, synthesize
from .lorentz import MeasuredValues

__all__ = ["SymbolGrid", "apply_bilinear", "operator_ratio"]


@dataclass(frozen=True)
class SymbolGrid:
    """Complex symbol samples on {-F..F}^dim with grid spacing `spacing`.

    dim must be even (= 2n).  Index i along any axis corresponds to the
    coordinate (i - F) * spacing; the cell measure is spacing^dim.
    provenance optionally records the generator, parameters and seed.
    """

    dim: int
    radius: int
    values: np.ndarray = field(repr=False)
    spacing: float = 1.0
    provenance: dict | None = None

    def __post_init__(self):
        if self.dim % 2 != 0 or self.dim < 2:
            raise ValueError("dim must be a positive even integer")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        v = np.asarray(self.values, dtype=complex)
        expected = (2 * self.radius + 1,) * self.dim
        if v.shape != expected:
            raise ValueError(f"values shape {v.shape} does not match {expected}")
        if not np.all(np.isfinite(v)):
            raise ValueError("symbol values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.dim // 2

    @property
    def cell_measure(self) -> float:
        return self.spacing**self.dim

    def coords(self) -> np.ndarray:
        """Coordinates along one axis."""
        return (np.arange(-self.radius, self.radius + 1)) * self.spacing

    def measured(self) -> MeasuredValues:
        return MeasuredValues.of(self.values, self.cell_measure)

    def scaled(self, c: complex) -> "SymbolGrid":
        return SymbolGrid(self.dim, self.radius, c * self.values, self.spacing, self.provenance)


def _check_compat(m: SymbolGrid, f: SpectralVector, g: SpectralVector) -> None:
    if f.box != g.box:
        raise ValueError("f and g must share a box")
    if f.box.dim != m.n:
        raise ValueError("symbol dimension 2n does not match input dimension n")
    if f.box.radius > m.radius:
        raise ValueError("inputs exceed the symbol band limit")
    if abs(m.spacing * f.box.period - 1.0) > 1e-9:
        raise ValueError("symbol spacing and input period are inconsistent")


def _output_box(f: SpectralVector) -> FrequencyBox:
    b = f.box
    return FrequencyBox(b.dim, 2 * b.radius, b.oversample, b.period)


def _symbol_block(m: SymbolGrid, F: int) -> np.ndarray:
    """Symbol restricted to the input band, reshaped (xi-axes..., eta-axes...)."""
    sl = slice(m.radius - F, m.radius + F + 1)
    return m.values[(sl,) * m.dim]


def apply_bilinear(
    m: SymbolGrid, f: SpectralVector, g: SpectralVector, mode: str = "antidiagonal"
) -> PhysicalField:
    """Evaluate the bilinear multiplier operator on band-limited inputs.

    mode 'antidiagonal' accumulates u(zeta) = sum_{xi+eta=zeta} m f g over
    anti-diagonals and synthesizes u on the doubled band; mode 'direct' is
    the literal double-sum oracle (O(lattice^2 * grid), small inputs only).
    """
    _check_compat(m, f, g)
    n = f.box.dim
    F = f.box.radius
    box_out = _output_box(f)
    block = _symbol_block(m, F)

    if mode == "antidiagonal":
        u = np.zeros(box_out.lattice_shape, dtype=complex)
        gv = g.values
        # fixed iteration order over xi keeps the per-zeta summation deterministic
        for xi in np.ndindex(*f.box.lattice_shape):
            fval = f.values[xi]
            if fval == 0:
                continue
            target = tuple(slice(i, i + 2 * F + 1) for i in xi)
            u[target] += fval * block[xi] * gv
        return synthesize(SpectralVector(box_out, u))

    if mode == "direct":
        P = box_out.n_phys
        lattice = [np.asarray(p) - F for p in np.ndindex(*f.box.lattice_shape)]
        K = len(lattice)
        x_axes = [np.arange(P)] * n
        phases = np.zeros((K,) + box_out.phys_shape, dtype=complex)
        for i, freq in enumerate(lattice):
            ph = 1.0
            for axis in range(n):
                e = np.exp(2j * np.pi * x_axes[axis] * freq[axis] / P)
                shape = [1] * n
                shape[axis] = P
                ph = ph * e.reshape(shape)
            phases[i] = ph
        mflat = block.reshape(K, K)
        fflat = f.values.ravel()
        gflat = g.values.ravel()
        A = fflat[:, None] * phases.reshape(K, -1)
        B = gflat[:, None] * phases.reshape(K, -1)
        samples = np.einsum("ax,ab,bx->x", A, mflat, B).reshape(box_out.phys_shape)
        return PhysicalField(box_out, samples)

    raise ValueError(f"unknown mode {mode!r}")


def operator_ratio(m: SymbolGrid, f: SpectralVector, g: SpectralVector) -> float:
    """||T_m(f,g)||_1 / (||f||_2 ||g||_2)."""
    nf, ng = l2_norm(f), l2_norm(g)
    if nf == 0.0 or ng == 0.0:
        raise ValueError("inputs must have nonzero L2 norm")
    return l1_norm(apply_bilinear(m, f, g)) / (nf * ng)
