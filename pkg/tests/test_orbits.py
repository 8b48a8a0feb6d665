import math

import numpy as np
import pytest

from polydyn import Polynomial
from polydyn.errors import (
    DegreeCapExceeded,
    ExceptionalBasepoint,
    NotACycle,
)
from polydyn.orbits import (
    OrbitKind,
    classify,
    exceptional_set,
    group_into_orbits,
    julia_cloud,
    multiplier,
    nonrepelling_census,
    periodic_points,
)

Z2 = Polynomial.from_text("0,0,1")
BASILICA = Polynomial.from_text("-1,0,1")


class TestPeriodicPoints:
    def test_square_fixed(self):
        rs = periodic_points(Z2, 1)
        roots = sorted(rs.roots, key=lambda z: z.real)
        assert roots[0] == pytest.approx(0.0, abs=1e-10)
        assert roots[1] == pytest.approx(1.0, abs=1e-10)

    def test_quadratic_family_fixed_points(self):
        # oracle: z = (1 +- sqrt(1-4c))/2 by the quadratic formula
        c = 0.1 - 0.3j
        P = Polynomial([c, 0, 1])
        rs = periodic_points(P, 1)
        s = np.sqrt(1 - 4 * c)
        expected = np.sort_complex(np.array([(1 + s) / 2, (1 - s) / 2]))
        got = np.sort_complex(np.array(rs.roots))
        assert np.abs(got - expected).max() < 1e-9

    def test_basilica_period_two(self):
        # oracle: P^2(z) - z = z(z+1)(z^2-z-1), roots 0, -1, (1+-sqrt5)/2
        rs = periodic_points(BASILICA, 2)
        expected = np.sort_complex(
            np.array([0, -1, (1 + math.sqrt(5)) / 2, (1 - math.sqrt(5)) / 2])
        )
        got = np.sort_complex(np.array(rs.roots))
        assert np.abs(got - expected).max() < 1e-9

    def test_count_with_multiplicity(self):
        for m in (1, 2, 3):
            assert periodic_points(Z2, m).total == 2**m

    def test_cap(self):
        with pytest.raises(DegreeCapExceeded):
            periodic_points(Z2, 13)


class TestMultiplier:
    def test_superattracting_origin(self):
        assert multiplier(Z2, [0.0]) == 0

    def test_repelling_one(self):
        assert multiplier(Z2, [1.0]) == pytest.approx(2.0)

    def test_chain_rule_cycle(self):
        # oracle: P'(0) * P'(-1) = 0 * (-2) = 0
        assert multiplier(BASILICA, [0.0, -1.0]) == pytest.approx(0.0)

    def test_rejects_non_cycle(self):
        with pytest.raises(NotACycle):
            multiplier(Z2, [0.5])


class TestClassify:
    def test_superattracting(self):
        assert classify(0).kind is OrbitKind.SUPERATTRACTING

    def test_repelling(self):
        assert classify(2).kind is OrbitKind.REPELLING

    def test_attracting(self):
        assert classify(0.5 + 0.1j).kind is OrbitKind.ATTRACTING

    def test_seventh_root_of_unity(self):
        lam = complex(math.cos(2 * math.pi * 3 / 7), math.sin(2 * math.pi * 3 / 7))
        c = classify(lam)
        assert c.kind is OrbitKind.RATIONALLY_NEUTRAL
        assert c.q == 7

    def test_multiplier_one(self):
        c = classify(1.0)
        assert c.kind is OrbitKind.RATIONALLY_NEUTRAL
        assert c.q == 1

    def test_irrational_rotation(self):
        theta = (math.sqrt(5) - 1) / 2
        lam = complex(math.cos(2 * math.pi * theta), math.sin(2 * math.pi * theta))
        assert classify(lam).kind is OrbitKind.IRRATIONALLY_NEUTRAL


class TestGrouping:
    def test_square_m2(self):
        orbits = group_into_orbits(periodic_points(Z2, 2), Z2, 2)
        by_period = sorted((o.period, len(o.points)) for o in orbits)
        assert by_period == [(1, 1), (1, 1), (2, 2)]
        cycle = next(o for o in orbits if o.period == 2)
        # oracle: the 2-cycle is the pair of primitive cube roots of unity
        from conftest import assert_points_match

        assert_points_match(
            cycle.points, np.exp(2j * np.pi * np.array([1, 2]) / 3)
        )

    def test_basilica_m2(self):
        orbits = group_into_orbits(periodic_points(BASILICA, 2), BASILICA, 2)
        periods = sorted(o.period for o in orbits)
        assert periods == [1, 1, 2]
        cycle = next(o for o in orbits if o.period == 2)
        assert sorted(p.real for p in cycle.points) == pytest.approx([-1.0, 0.0])
        assert cycle.classification.kind is OrbitKind.SUPERATTRACTING

    def test_m1_periods_all_one(self):
        P = Polynomial([0.2j, -0.3, 0.1, 1.0])
        orbits = group_into_orbits(periodic_points(P, 1), P, 1)
        assert all(o.period == 1 for o in orbits)
        assert sum(len(o.points) for o in orbits) == 3


class TestCensus:
    def test_square(self):
        # orbit at 0 plus infinity; bound 3d-1 = 5
        assert nonrepelling_census(Z2, 3) == 2

    def test_basilica(self):
        assert nonrepelling_census(BASILICA, 3) == 2

    def test_parabolic_boundary_case(self):
        P = Polynomial.from_text("0.25,0,1")
        orbits = group_into_orbits(periodic_points(P, 1), P, 1)
        assert len(orbits) == 1
        assert orbits[0].classification.kind is OrbitKind.RATIONALLY_NEUTRAL
        assert nonrepelling_census(P, 1) == 2

    def test_random_census_bound(self):
        rng = np.random.default_rng(0)
        for i in range(20):
            if i < 10:
                c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
                P = Polynomial([c[0], c[1], 1.0])
            else:
                c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
                P = Polynomial([c[0], c[1], c[2], 1.0])
            assert nonrepelling_census(P, 4) <= 3 * P.degree - 1


class TestExceptionalSet:
    def test_monomial(self):
        e = exceptional_set(Polynomial.from_text("0,0,0,1"))
        assert e.finite_point == pytest.approx(0.0)

    def test_generic(self):
        assert exceptional_set(BASILICA).finite_point is None

    def test_shifted_power(self):
        # oracle: 2(z-1)^2 + 1 = 2z^2 - 4z + 3 expanded by hand
        P = Polynomial.from_text("3,-4,2")
        e = exceptional_set(P)
        assert e.finite_point == pytest.approx(1.0)

    def test_complete_invariance(self):
        from polydyn import preimages

        # containment tolerance 1e-4: a multiplicity-d root is only
        # locatable to (residual target)^(1/d), about 2e-5 for the cube
        for text in ("0,0,0,1", "3,-4,2"):
            P = Polynomial.from_text(text)
            e = exceptional_set(P)
            z0 = e.finite_point
            for root, _, _ in preimages(P, z0):
                assert e.contains(root, tol=1e-4)


class TestJuliaCloud:
    def test_roots_of_unity_tree(self):
        cloud = julia_cloud(Z2, 1.0, 10, budget=2**16)
        assert cloud.size == 1024
        assert np.abs(np.abs(cloud.points) - 1).max() < 1e-9

    def test_weights_sum_to_one(self):
        cloud = julia_cloud(Z2, 2.0, 8, budget=2**16)
        assert cloud.weights.sum() == pytest.approx(1.0, abs=1e-9)

    def test_circle_attraction_from_outside(self):
        # oracle: |z_k| = 2^(1/2^k) -> 1
        cloud = julia_cloud(Z2, 2.0, 25, budget=10, rng_seed=5, samples=64)
        assert np.abs(np.abs(cloud.points) - 1).max() < 1e-6

    def test_chebyshev_interval(self):
        P = Polynomial.from_text("-2,0,1")
        cloud = julia_cloud(P, 1.0, 12, budget=2**16)
        assert np.abs(cloud.points.imag).max() < 1e-6
        assert np.abs(cloud.points.real).max() <= 2 + 1e-6

    def test_exceptional_basepoint_rejected(self):
        with pytest.raises(ExceptionalBasepoint):
            julia_cloud(Z2, 0.0, 4)

    def test_backward_invariance(self):
        P = Polynomial.from_text("0.2j,0,1")
        deep = julia_cloud(P, 1.5, 7, budget=2**16)
        shallow = julia_cloud(P, 1.5, 6, budget=2**16)
        images = np.array([P(complex(z)) for z in deep.points])
        for w in images[:64]:
            assert np.min(np.abs(shallow.points - w)) < 1e-8

    def test_sampled_mode_deterministic(self):
        a = julia_cloud(BASILICA, 3.0, 6, budget=4, rng_seed=9, samples=200)
        b = julia_cloud(BASILICA, 3.0, 6, budget=4, rng_seed=9, samples=200)
        assert np.array_equal(a.points, b.points)

    def test_task_split_reproducible(self):
        a = julia_cloud(BASILICA, 3.0, 6, budget=4, rng_seed=9, samples=200, tasks=4)
        b = julia_cloud(BASILICA, 3.0, 6, budget=4, rng_seed=9, samples=200, tasks=4)
        assert np.array_equal(a.points, b.points)


class TestRepellingDensity:
    @pytest.mark.parametrize("text", ["0,0,1", "-1,0,1", "0+1i,0,1", "-2,0,1"])
    def test_repelling_points_near_cloud(self, text):
        P = Polynomial.from_text(text)
        fixed = group_into_orbits(periodic_points(P, 1), P, 1)
        basepoint = next(
            o.points[0] for o in fixed if o.classification.is_repelling
        )
        cloud = julia_cloud(P, basepoint, 15, budget=2**15)
        for m in range(1, 5):
            for o in group_into_orbits(periodic_points(P, m), P, m):
                if o.period == m and o.classification.is_repelling:
                    for z in o.points:
                        assert np.min(np.abs(cloud.points - z)) < 1e-2
