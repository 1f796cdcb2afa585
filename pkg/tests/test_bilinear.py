"""Bilinear multiplier evaluation: algebraic identities and the direct oracle."""

import numpy as np
import pytest

from bimult.bilinear import SymbolGrid, apply_bilinear, operator_ratio
from bimult.grid import (
    FrequencyBox,
    SpectralVector,
    apply_linear_multiplier,
    l1_norm,
    synthesize,
)


def random_pair(F, seed, oversample=4):
    rng = np.random.default_rng(seed)
    box = FrequencyBox(1, F, oversample, 1.0)
    shape = box.lattice_shape
    f = SpectralVector(box, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    g = SpectralVector(box, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return f, g


def ones_symbol(F_sym):
    side = 2 * F_sym + 1
    return SymbolGrid(2, F_sym, np.ones((side, side)), spacing=1.0)


def test_identity_symbol_gives_pointwise_product():
    f, g = random_pair(8, 0)
    out = apply_bilinear(ones_symbol(8), f, g)
    prod = synthesize_at(f, out.box) * synthesize_at(g, out.box)
    rel = np.max(np.abs(out.samples - prod)) / np.max(np.abs(prod))
    assert rel < 1e-9


def synthesize_at(f, box_out):
    """Resample f on the (wider) output box by zero-padding its spectrum."""
    vals = np.zeros(box_out.lattice_shape, dtype=complex)
    F_in, F_out = f.box.radius, box_out.radius
    sl = slice(F_out - F_in, F_out + F_in + 1)
    vals[(sl,) * f.box.dim] = f.values
    return synthesize(SpectralVector(box_out, vals)).samples


def test_tensor_symbol_factors_through_linear_multipliers():
    # m(xi, eta) = sigma(xi) tau(eta) means T_m(f, g) = (sigma f) * (tau g)
    F = 6
    rng = np.random.default_rng(42)
    sigma = rng.standard_normal(2 * F + 1)
    tau = rng.standard_normal(2 * F + 1)
    m = SymbolGrid(2, F, np.outer(sigma, tau), spacing=1.0)
    f, g = random_pair(F, 1)
    sf = apply_linear_multiplier(SpectralVector(f.box, sigma), f)
    tg = apply_linear_multiplier(SpectralVector(g.box, tau), g)
    out = apply_bilinear(m, f, g)
    prod = synthesize_at(sf, out.box) * synthesize_at(tg, out.box)
    rel = np.max(np.abs(out.samples - prod)) / np.max(np.abs(prod))
    assert rel < 1e-9


def test_direct_mode_cross_check_corpus():
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        F = int(rng.integers(1, 6))
        f, g = random_pair(F, 2000 + seed, oversample=2)
        side = 2 * F + 1
        m = SymbolGrid(
            2, F, rng.standard_normal((side, side)) + 1j * rng.standard_normal((side, side))
        )
        fast = apply_bilinear(m, f, g, mode="antidiagonal").samples
        slow = apply_bilinear(m, f, g, mode="direct").samples
        scale = max(np.max(np.abs(slow)), 1e-30)
        worst = max(worst, np.max(np.abs(fast - slow)) / scale)
    assert worst < 1e-10


def test_bilinearity():
    F = 5
    f1, g = random_pair(F, 3)
    f2, _ = random_pair(F, 4)
    m = ones_symbol(F)
    comb = SpectralVector(f1.box, 2.0 * f1.values + 3j * f2.values)
    lhs = apply_bilinear(m, comb, g).samples
    rhs = 2.0 * apply_bilinear(m, f1, g).samples + 3j * apply_bilinear(m, f2, g).samples
    assert np.max(np.abs(lhs - rhs)) < 1e-9 * np.max(np.abs(rhs))


def test_ratio_scale_invariance_in_inputs():
    f, g = random_pair(6, 5)
    m = ones_symbol(6)
    r1 = operator_ratio(m, f, g)
    f2 = SpectralVector(f.box, 3.7 * f.values)
    assert operator_ratio(m, f2, g) == pytest.approx(r1, rel=1e-12)


def test_ratio_homogeneous_in_symbol():
    f, g = random_pair(6, 6)
    m = ones_symbol(6)
    assert operator_ratio(m.scaled(5.0), f, g) == pytest.approx(
        5.0 * operator_ratio(m, f, g), rel=1e-12
    )


def test_sanity_bound_identity_symbol():
    # T_1(f,g) = fg and Cauchy-Schwarz on the unit torus: ||fg||_1 <= ||f||_2 ||g||_2
    for seed in range(20):
        f, g = random_pair(7, 300 + seed)
        assert operator_ratio(ones_symbol(7), f, g) <= 1.0 + 1e-9


def test_incompatible_inputs_rejected():
    f, g = random_pair(8, 7)
    with pytest.raises(ValueError):
        apply_bilinear(ones_symbol(4), f, g)  # band limit too small
    m = SymbolGrid(2, 8, np.ones((17, 17)), spacing=0.5)  # wrong spacing for period 1
    with pytest.raises(ValueError):
        apply_bilinear(m, f, g)
    with pytest.raises(ValueError):
        apply_bilinear(ones_symbol(8), f, g, mode="bogus")


def test_zero_input_ratio_rejected():
    f, _ = random_pair(4, 8)
    z = SpectralVector(f.box, np.zeros_like(f.values))
    with pytest.raises(ValueError):
        operator_ratio(ones_symbol(4), f, z)
