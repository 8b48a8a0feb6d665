import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polydyn.discmaps import (
    DiscMap,
    LaurentTail,
    area_theorem_sum,
    denjoy_wolff,
    koebe_distortion_check,
    koebe_function,
    koebe_function_coeffs,
    koebe_quarter_check,
    poincare_distance,
    schwarz_pick,
    winding_number,
)
from polydyn.errors import NotASelfMap, NotNormalized, OutsideDisc

disc_point = st.complex_numbers(max_magnitude=0.85, allow_nan=False, allow_infinity=False)


class TestPoincare:
    def test_zero_distance(self):
        assert poincare_distance(0, 0) == 0.0

    def test_radial_integral_oracle(self):
        # oracle: numeric integral of dt/(1-t^2) from 0 to 1/2
        ts = np.linspace(0, 0.5, 200001)
        numeric = np.trapezoid(1.0 / (1.0 - ts**2), ts)
        assert poincare_distance(0, 0.5) == pytest.approx(numeric, abs=1e-9)
        assert poincare_distance(0, 0.5) == pytest.approx(math.atanh(0.5))

    def test_outside_rejected(self):
        with pytest.raises(OutsideDisc):
            poincare_distance(1.0, 0.0)

    @settings(max_examples=60, deadline=None)
    @given(disc_point, disc_point, disc_point)
    def test_mobius_invariance(self, a, z, w):
        f = DiscMap.mobius(a)
        lhs = poincare_distance(f(z), f(w))
        rhs = poincare_distance(z, w)
        assert lhs == pytest.approx(rhs, abs=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(disc_point, disc_point, disc_point)
    def test_triangle_and_symmetry(self, a, b, c):
        ab = poincare_distance(a, b)
        assert ab == pytest.approx(poincare_distance(b, a), abs=1e-10)
        assert ab <= poincare_distance(a, c) + poincare_distance(c, b) + 1e-10


class TestDiscMap:
    def test_rejects_non_self_map(self):
        with pytest.raises(NotASelfMap):
            DiscMap.from_polynomial([0, 2.0])

    def test_mobius_parameter_domain(self):
        with pytest.raises(OutsideDisc):
            DiscMap.mobius(1.0)

    def test_blaschke_kind(self):
        assert DiscMap.blaschke([0.3]).is_automorphism
        assert not DiscMap.blaschke([0.3, -0.2j]).is_automorphism


class TestSchwarzPick:
    def test_contraction_for_half(self):
        f = DiscMap.from_polynomial([0, 0.5])
        assert schwarz_pick(f, 0.1, 0.5j) < 1

    def test_automorphism_is_isometry(self):
        f = DiscMap.mobius(0.4 - 0.1j, theta=1.1)
        assert schwarz_pick(f, 0.2, -0.3 + 0.4j) == pytest.approx(1.0, abs=1e-10)

    def test_square_contracts(self):
        f = DiscMap.from_polynomial([0, 0, 1])
        rng = np.random.default_rng(2)
        for _ in range(50):
            z, w = rng.uniform(-0.6, 0.6, 2) + 1j * rng.uniform(-0.6, 0.6, 2)
            if abs(z - w) < 1e-3:
                continue
            assert schwarz_pick(f, z, w) < 1

    def test_never_expands(self):
        maps = [
            DiscMap.mobius(0.3),
            DiscMap.from_polynomial([0, 0.5]),
            DiscMap.from_polynomial([0, 0, 1]),
            DiscMap.blaschke([0.2, -0.4j]),
            DiscMap.from_polynomial([0, 0.5, 0.3]),
        ]
        rng = np.random.default_rng(5)
        for _ in range(1000):
            f = maps[int(rng.integers(0, len(maps)))]
            z = complex(*rng.uniform(-0.65, 0.65, 2))
            w = complex(*rng.uniform(-0.65, 0.65, 2))
            if abs(z - w) < 1e-3 or abs(z) > 0.9 or abs(w) > 0.9:
                continue
            assert schwarz_pick(f, z, w) <= 1 + 1e-10


class TestDenjoyWolff:
    def test_contraction_to_origin(self):
        rep = denjoy_wolff(DiscMap.from_polynomial([0, 0.5]), 0.3 + 0.2j)
        assert rep.kind == "interior_fixed"
        assert abs(rep.point) < 1e-6

    def test_hyperbolic_mobius_to_boundary(self):
        # oracle: orbit of 0 under (z + 1/2)/(1 + z/2) is 0, 1/2, 4/5, ... -> 1
        f = DiscMap.mobius(0.5)
        assert f(0) == pytest.approx(0.5)
        assert f(0.5) == pytest.approx(0.8)
        rep = denjoy_wolff(f, 0.0)
        assert rep.kind == "boundary"
        assert abs(rep.point - 1.0) < 1e-6

    def test_interior_attracting_polynomial(self):
        rep = denjoy_wolff(DiscMap.from_polynomial([0, 0.5, 0.5]), 0.4)
        assert rep.kind == "interior_fixed"
        assert abs(rep.point) < 1e-6

    def test_elliptic_rotation_undecided(self):
        rep = denjoy_wolff(DiscMap.rotation(1.0), 0.5, n_max=500)
        assert rep.kind == "undecided"

    def test_dichotomy(self):
        # either an interior fixed point with |f'| < 1, or escape to the boundary
        for f in (
            DiscMap.from_polynomial([0.1, 0.5]),
            DiscMap.from_polynomial([0.4, 0.2, 0.3]),
            DiscMap.blaschke([0.5, 0.5]),
        ):
            rep = denjoy_wolff(f, 0.1)
            if rep.kind == "interior_fixed":
                h = 1e-6
                deriv = abs(f(rep.point + h) - f(rep.point - h)) / (2 * h)
                assert deriv < 1
            else:
                assert abs(rep.point) > 0.999


class TestAreaTheorem:
    def test_pure_inverse(self):
        rep = area_theorem_sum(LaurentTail((0, 0)))
        assert rep.total == 0.0
        assert rep.passed

    def test_unit_coefficient_boundary(self):
        rep = area_theorem_sum(LaurentTail((0, 1)))
        assert rep.total == pytest.approx(1.0)
        assert rep.passed
        assert rep.univalent_on_grid

    def test_violator_flagged(self):
        rep = area_theorem_sum(LaurentTail((0, 2)))
        assert rep.total == pytest.approx(4.0)
        assert not rep.passed
        assert not rep.univalent_on_grid  # g(z) = g(1/(2z)) collides on the grid

    def test_partial_sums_monotone(self):
        b = (0.1, 0.4, 0.2j, 0.1, 0.05)
        totals = [
            area_theorem_sum(LaurentTail(b[: k + 2])).total for k in range(len(b) - 1)
        ]
        assert all(x <= y + 1e-15 for x, y in zip(totals, totals[1:]))
        assert all(area_theorem_sum(LaurentTail(b[: k + 2])).passed for k in range(len(b) - 1))


class TestKoebe:
    def test_identity(self):
        rep = koebe_quarter_check([0, 1, 0])
        assert rep.a2_abs == 0.0
        assert rep.a2_passed and rep.coverage_passed

    def test_extremal_function(self):
        coeffs = koebe_function_coeffs(30)
        rep = koebe_quarter_check(coeffs, evaluator=koebe_function)
        assert abs(rep.a2_abs - 2.0) < 1e-12
        assert rep.coverage_passed
        # oracle: the omitted value -1/4 is never attained on the disc
        zs = np.exp(2j * np.pi * np.arange(512) / 512) * 0.999
        vals = np.array([koebe_function(z) for z in zs])
        assert winding_number(vals, -0.25) == 0

    def test_small_perturbation(self):
        rep = koebe_quarter_check([0, 1, 0.5])
        assert rep.a2_passed and rep.coverage_passed

    def test_rejects_unnormalized(self):
        with pytest.raises(NotNormalized):
            koebe_quarter_check([0.1, 1, 0])
        with pytest.raises(NotNormalized):
            koebe_quarter_check([0, 2, 0])


class TestDistortion:
    def test_identity_ratio(self):
        rep = koebe_distortion_check([0, 1], 0.5)
        assert rep.ratio == pytest.approx(1 / math.sqrt(math.pi), rel=1e-9)
        assert rep.diameter == pytest.approx(1.0)
        assert rep.area == pytest.approx(math.pi, rel=1e-9)

    def test_scaling_invariance(self):
        r1 = koebe_distortion_check([0, 1], 0.5).ratio
        r2 = koebe_distortion_check([0, 1e-3], 0.5).ratio
        assert r1 == pytest.approx(r2, rel=1e-9)

    def test_family_uniformly_bounded(self):
        ratios = [
            koebe_distortion_check([0, 1, t], 0.5).ratio
            for t in np.linspace(0, 0.4, 9)
        ]
        fitted_c = max(ratios)
        assert all(r <= fitted_c for r in ratios)
        assert fitted_c < 1.0  # development oracle: family stays near 0.56..0.62


def test_winding_number_basics():
    circle = np.exp(2j * np.pi * np.arange(256) / 256)
    assert winding_number(circle, 0.0) == 1
    assert winding_number(circle, 2.0) == 0
