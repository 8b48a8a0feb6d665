import numpy as np
import pytest

from polydyn import _kernels_py as pure

compiled = pytest.importorskip(
    "polydyn._speedups", reason="compiled extension not built"
)


@pytest.mark.parametrize("degree", [1, 2, 3, 5, 8, 16, 32, 81])
def test_aberth_parity(degree):
    rng = np.random.default_rng(degree)
    coeffs = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    coeffs[-1] += 2.0
    ws = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    r1, s1, c1 = pure.aberth_batch(coeffs, ws, 1e-14, 300)
    r2, s2, c2 = compiled.aberth_batch(coeffs, ws, 1e-14, 300)
    assert c1.all() and c2.all()
    for row1, row2 in zip(r1, r2):
        a = np.sort_complex(row1)
        b = np.sort_complex(row2)
        assert np.abs(a - b).max() < 1e-8


def test_horner_parity():
    rng = np.random.default_rng(0)
    coeffs = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    zs = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    h1 = pure.horner_many(coeffs, zs)
    h2 = compiled.horner_many(coeffs, zs)
    assert (np.abs(h1 - h2) / (1 + np.abs(h1))).max() < 1e-13


def test_iterate_parity():
    rng = np.random.default_rng(1)
    coeffs = np.array([0.1, 0.0, 1.0], dtype=complex)
    zs = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    v1, s1 = pure.iterate_escape(coeffs, zs, 20, 3.0)
    v2, s2 = compiled.iterate_escape(coeffs, zs, 20, 3.0)
    assert np.array_equal(s1, s2)
    alive = s1 < 0
    assert np.abs(v1[alive] - v2[alive]).max() < 1e-10


def test_backend_constants_match():
    assert pure.GUESS_PHASE == compiled.GUESS_PHASE


def test_selected_backend_exposes_surface():
    from polydyn import kernels

    assert kernels.BACKEND in ("python", "compiled")
    assert callable(kernels.horner_many)
    assert callable(kernels.aberth_batch)
    assert callable(kernels.iterate_escape)
