"""Fixed and periodic orbits, the exceptional set, and Julia point clouds.

Enumeration goes through the symbolic iterate P^m (degree d^m, capped),
classification through the cycle multiplier, and Julia clouds through
exact preimage trees or seeded stochastic backward orbits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import INFINITY, Polynomial, SpherePoint
from .errors import (
    AmbiguousGrouping,
    CensusBoundExceeded,
    DegreeCapExceeded,
    ExceptionalBasepoint,
    NotACycle,
)
from .roots import RootSet, cluster, preimages_batch

SYMBOLIC_CAP = 4096
NEUTRAL_TOL = 1e-6
ROOT_OF_UNITY_MAX = 64
PERIOD_TOL = 1e-7
DEFAULT_BURN_IN = 20


class OrbitKind(enum.Enum):
    SUPERATTRACTING = "superattracting"
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    RATIONALLY_NEUTRAL = "rationally neutral"
    IRRATIONALLY_NEUTRAL = "irrationally neutral"


@dataclass(frozen=True)
class Classification:
    """Multiplier class; q is the root-of-unity order when rational."""

    kind: OrbitKind
    q: int | None = None

    @property
    def is_repelling(self) -> bool:
        return self.kind is OrbitKind.REPELLING

    def __str__(self):
        if self.kind is OrbitKind.RATIONALLY_NEUTRAL:
            return f"{self.kind.value}({self.q})"
        return self.kind.value


def classify(
    lam: complex,
    neutral_tol: float = NEUTRAL_TOL,
    root_of_unity_max: int = ROOT_OF_UNITY_MAX,
) -> Classification:
    """Classify a multiplier by |lambda| with a documented neutral band.

    Superattracting when |lambda| < neutral_tol, attracting below
    1 - neutral_tol, repelling above 1 + neutral_tol; otherwise neutral,
    split into rationally neutral (some |lambda^q - 1| < neutral_tol
    with q <= root_of_unity_max, smallest such q reported) and
    irrationally neutral. Classification near |lambda| = 1 is
    numerically ill-posed, hence the configurable band.
    """
    if neutral_tol <= 0:
        raise ValueError("neutral_tol must be positive")
    lam = complex(lam)
    mag = abs(lam)
    if mag < neutral_tol:
        return Classification(OrbitKind.SUPERATTRACTING)
    if mag < 1.0 - neutral_tol:
        return Classification(OrbitKind.ATTRACTING)
    if mag > 1.0 + neutral_tol:
        return Classification(OrbitKind.REPELLING)
    power = lam
    for q in range(1, root_of_unity_max + 1):
        if abs(power - 1.0) < neutral_tol:
            return Classification(OrbitKind.RATIONALLY_NEUTRAL, q)
        power *= lam
    return Classification(OrbitKind.IRRATIONALLY_NEUTRAL)


@dataclass(frozen=True)
class PeriodicOrbit:
    """A cycle in dynamical order with its exact period and multiplier."""

    points: tuple
    period: int
    multiplier: complex
    classification: Classification

    def __post_init__(self):
        if len(self.points) != self.period:
            raise ValueError("cycle length must equal the period")


def _cycle_tol(z: complex) -> float:
    return PERIOD_TOL * (1.0 + abs(z))


def multiplier(P: Polynomial, points) -> complex:
    """Chain-rule multiplier: the product of P' along the cycle.

    Raises NotACycle unless consecutive points map onto each other
    within tolerance (including closing back to the start).
    """
    pts = [complex(z) for z in points]
    if not pts:
        raise NotACycle("empty cycle")
    for i, z in enumerate(pts):
        nxt = pts[(i + 1) % len(pts)]
        if abs(P(z) - nxt) > _cycle_tol(nxt):
            raise NotACycle(
                f"P(point {i}) misses point {(i + 1) % len(pts)} "
                f"by {abs(P(z) - nxt):.3e}"
            )
    dp = P.derivative()
    out = 1.0 + 0j
    for z in pts:
        out *= dp(z)
    return out


def _cycle_defect_many(P: Polynomial, zs: np.ndarray, m: int):
    """(P^m(z) - z, (P^m)'(z) - 1) for an array, by chained evaluation.

    Chained evaluation stays well-conditioned where the symbolic
    iterate's monomial coefficients cancel catastrophically, so the
    fixed-point equation of P^m is always solved in this form.
    """
    dP = P.derivative()
    w = np.array(zs, dtype=np.complex128)
    deriv = np.ones_like(w)
    with np.errstate(all="ignore"):
        for _ in range(m):
            deriv *= kernels.horner_many(dP.coeffs, w)
            w = kernels.horner_many(P.coeffs, w)
    return w - zs, deriv - 1.0


def _cycle_defect(P: Polynomial, z: complex, m: int):
    f, fp = _cycle_defect_many(P, np.array([complex(z)]), m)
    return complex(f[0]), complex(fp[0])


def _aberth_periodic(P: Polynomial, m: int, max_iter: int = 400) -> np.ndarray:
    """All d^m fixed points of P^m by simultaneous iteration.

    Aberth updates need only point values of F = P^m - id and its
    derivative, both available by stable chained evaluation; the
    pairwise repulsion distributes the guesses over the full root set,
    multiplicity included. Guesses start on a circle inside the escape
    radius (every periodic point lives there).
    """
    d = P.degree
    count = d**m
    radius = min(P.escape_radius(), 4.0) * 1.02
    angles = 2.0 * np.pi * np.arange(count) / count + kernels.GUESS_PHASE
    z = radius * np.exp(1j * angles)
    idx = np.arange(count)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            f, fp = _cycle_defect_many(P, z, m)
            resid = np.abs(f)
            wild = ~np.isfinite(resid)
            scale = 1e-9 * (1.0 + np.abs(z)) * (1.0 + np.abs(fp))
            done = (resid <= scale) & ~wild
            if done.all():
                break
            newton = f / np.where(fp == 0, 1.0, fp)
            diff = z[:, None] - z[None, :]
            diff[idx, idx] = 1.0
            collided = np.abs(diff) == 0.0
            inv = 1.0 / np.where(collided, 1.0, diff)
            inv[idx, idx] = 0.0
            s = inv.sum(axis=1)
            denom = 1.0 - newton * s
            corr = np.where(np.abs(denom) < 1e-12, newton, newton / denom)
            limit = 0.5 * (1.0 + np.abs(z))
            big = np.abs(corr) > limit
            corr = np.where(big, corr * (limit / np.abs(corr)), corr)
            corr = np.where(wild, 0.5 * z, corr)
            corr = np.where((fp == 0) | collided.any(axis=1),
                            1e-6 * limit * np.exp(1j * kernels.GUESS_PHASE), corr)
            z = z - np.where(done, 0.0, corr)
    return z


def _polish_periodic(P: Polynomial, roots: np.ndarray, m: int, steps: int = 60):
    out = np.array(roots, dtype=np.complex128)
    for i in range(out.size):
        cur = complex(out[i])
        f, fp = _cycle_defect(P, cur, m)
        best, best_defect = cur, abs(f)
        for _ in range(steps):
            if not (abs(f) > 1e-15 * (1.0 + abs(cur))):
                break
            if fp == 0 or not np.isfinite(abs(f) + abs(fp)):
                break
            step = f / fp
            limit = 0.5 * (1.0 + abs(cur))
            if abs(step) > limit:
                step *= limit / abs(step)
            cur = cur - step
            f, fp = _cycle_defect(P, cur, m)
            if abs(f) < best_defect:
                best, best_defect = cur, abs(f)
        out[i] = best
    return out


def periodic_points(P: Polynomial, m: int, cap: int = SYMBOLIC_CAP) -> RootSet:
    """Solutions of P^m(z) = z with multiplicity (d^m of them).

    The cap guards the d^m problem size (default 4096); beyond it
    periodic points are out of reach of this route (use backward
    orbits instead). The solve runs simultaneous iteration directly on
    the chained evaluation of P^m followed by a Newton polish; the
    symbolic iterate's monomial coefficients are never evaluated, since
    their cancellation already destroys all accuracy for cubics at
    m = 4. Residuals report the chained defect |P^m(z) - z|.
    """
    if m < 1:
        raise ValueError("period must be at least 1")
    if P.degree < 2:
        raise ValueError("dynamical use needs degree >= 2")
    if P.degree**m > cap:
        raise DegreeCapExceeded(
            f"periodic-point count {P.degree**m} exceeds cap {cap}"
        )
    rough = _aberth_periodic(P, m)
    polished = _polish_periodic(P, rough, m)
    resid = np.abs(_cycle_defect_many(P, polished, m)[0])
    rootset = RootSet(
        tuple(complex(z) for z in polished),
        tuple(1 for _ in polished),
        tuple(float(r) for r in resid),
    )
    eps = 1e-6 * (1.0 + float(np.max(np.abs(polished))))
    return cluster(rootset, eps)


def exact_period(P: Polynomial, z: complex, m: int) -> int:
    """Least divisor q of m with P^q(z) = z within tolerance.

    Ties resolve toward the smaller period; rounding can only merge
    periods near multiple roots, where clustering already flags
    multiplicity.
    """
    z = complex(z)
    for q in sorted(_divisors(m)):
        w = z
        for _ in range(q):
            w = P(w)
        if abs(w - z) <= _cycle_tol(z):
            return q
    raise NotACycle(f"{z!r} is not periodic with period dividing {m}")


def _divisors(m: int):
    return [q for q in range(1, m + 1) if m % q == 0]


def group_into_orbits(rootset: RootSet, P: Polynomial, m: int) -> list[PeriodicOrbit]:
    """Partition roots of P^m(z) = z into cycles with exact periods.

    Each root generates its forward cycle; duplicates (the same cycle
    entered at a different point, or a shorter period seen again at a
    divisor) collapse onto a canonical representative. Overlapping but
    unequal candidate cycles raise AmbiguousGrouping.
    """
    def overlap(a: tuple, b: tuple) -> int:
        """Tolerance-aware matching count between two point sets."""
        used = [False] * len(b)
        hits = 0
        for x in a:
            for j, y in enumerate(b):
                if not used[j] and abs(x - y) <= _cycle_tol(x):
                    used[j] = True
                    hits += 1
                    break
        return hits

    orbits: list[PeriodicOrbit] = []
    for z, _mult, _res in rootset:
        q = exact_period(P, z, m)
        cycle = [complex(z)]
        for _ in range(q - 1):
            cycle.append(P(cycle[-1]))
        matched = False
        for known in orbits:
            hits = overlap(cycle, known.points)
            if hits == 0:
                continue
            if hits == len(cycle) == known.period:
                matched = True
                break
            raise AmbiguousGrouping(
                f"candidate {q}-cycle at {cycle[0]!r} partially overlaps a "
                f"known {known.period}-cycle"
            )
        if matched:
            continue
        start = cycle.index(min(cycle, key=lambda p: (p.real, p.imag)))
        ordered = tuple(cycle[start:] + cycle[:start])
        lam = multiplier(P, ordered)
        orbits.append(PeriodicOrbit(ordered, q, lam, classify(lam)))
    return orbits


def nonrepelling_census(P: Polynomial, m_max: int, cap: int = SYMBOLIC_CAP) -> int:
    """Count distinct non-repelling orbits of exact period <= m_max.

    Infinity always counts as one (super)attracting orbit for d >= 2.
    The count can never exceed 3d - 1; a violation means the numerics
    misclassified something, and raises CensusBoundExceeded.
    """
    count = 1  # the superattracting orbit at infinity
    for m in range(1, m_max + 1):
        for orbit in group_into_orbits(periodic_points(P, m, cap=cap), P, m):
            if orbit.period == m and not orbit.classification.is_repelling:
                count += 1
    bound = 3 * P.degree - 1
    if count > bound:
        raise CensusBoundExceeded(
            f"{count} non-repelling orbits found, bound is {bound}"
        )
    return count


@dataclass(frozen=True)
class ExceptionalSet:
    """The largest finite completely invariant set: {inf} or {inf, z0}."""

    points: tuple

    def __post_init__(self):
        if not 1 <= len(self.points) <= 2:
            raise ValueError("exceptional set has one or two points")

    @property
    def finite_point(self) -> complex | None:
        for p in self.points:
            if not p.is_infinity:
                return p.value
        return None

    def contains(self, z, tol: float = 1e-9) -> bool:
        if isinstance(z, SpherePoint):
            if z.is_infinity:
                return True
            z = z.value
        finite = self.finite_point
        return finite is not None and abs(complex(z) - finite) <= tol * (
            1.0 + abs(finite)
        )


def exceptional_set(P: Polynomial, tol: float = 1e-9) -> ExceptionalSet:
    """Detect whether P is a(z - z0)^d + z0 about its critical center.

    Only such maps have a finite exceptional point (then {inf, z0});
    every other polynomial has exceptional set {inf}. Detection matches
    coefficients after centering at z0 = -a_{d-1}/(d a_d), the unique
    candidate.
    """
    if P.degree < 2:
        raise ValueError("exceptional set needs degree >= 2")
    a = P.coeffs
    d = P.degree
    z0 = -a[-2] / (d * a[-1])
    # coefficients of a_d (z - z0)^d + z0
    model = np.zeros(d + 1, dtype=np.complex128)
    for k in range(d + 1):
        model[k] = a[-1] * math.comb(d, k) * (-z0) ** (d - k)
    model[0] += z0
    scale = float(np.max(np.abs(a)))
    if float(np.max(np.abs(model - a))) <= tol * scale:
        return ExceptionalSet((INFINITY, SpherePoint(z0)))
    return ExceptionalSet((INFINITY,))


@dataclass(frozen=True)
class PointCloud:
    """Weighted finite point cloud approximating a Julia set."""

    points: np.ndarray
    weights: np.ndarray
    depth: int

    @property
    def size(self) -> int:
        return int(self.points.size)


def _task_counts(total: int, tasks: int) -> list[int]:
    base, extra = divmod(total, tasks)
    return [base + (1 if t < extra else 0) for t in range(tasks)]


def julia_cloud(
    P: Polynomial,
    basepoint: complex,
    depth: int,
    budget: int = 2**16,
    rng_seed: int | None = None,
    samples: int | None = None,
    burn_in: int = DEFAULT_BURN_IN,
    tasks: int = 1,
) -> PointCloud:
    """Backward-orbit point cloud of a non-exceptional basepoint.

    Backward orbits of any non-exceptional point are dense in the Julia
    set. When d^depth fits the budget the full preimage tree at that
    depth is returned (weights uniform, multiplicity included).
    Otherwise ``samples`` (default: budget) stochastic backward orbits
    are walked for burn_in + depth steps, each step choosing one
    preimage uniformly with multiplicity weights, and the points after
    the burn-in prefix enter the cloud.

    Sampling is reproducible: task t draws from a stream seeded by
    (rng_seed, t); merging is concatenation in task order, so a fixed
    seed and task count give identical output regardless of scheduling.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    z0 = complex(basepoint)
    if exceptional_set(P).contains(z0):
        raise ExceptionalBasepoint(
            f"basepoint {z0!r} is exceptional; its backward orbit is not dense"
        )
    d = P.degree
    exact = d**depth <= budget
    if exact:
        level = np.array([z0], dtype=np.complex128)
        for _ in range(depth):
            level = preimages_batch(P, level).ravel()
        weights = np.full(level.size, 1.0 / level.size)
        return PointCloud(level, weights, depth)

    if rng_seed is None:
        raise ValueError("stochastic sampling requires rng_seed")
    n_samples = budget if samples is None else int(samples)
    if n_samples < 1:
        raise ValueError("samples must be at least 1")
    if tasks < 1:
        raise ValueError("tasks must be at least 1")

    kept_chunks = []
    for t, count in enumerate(_task_counts(n_samples, tasks)):
        if count == 0:
            continue
        rng = np.random.default_rng(np.random.SeedSequence((rng_seed, t)))
        walkers = np.full(count, z0, dtype=np.complex128)
        kept = []
        for step in range(1, burn_in + depth + 1):
            roots = preimages_batch(P, walkers)
            pick = rng.integers(0, d, size=count)
            walkers = roots[np.arange(count), pick]
            if step > burn_in:
                kept.append(walkers.copy())
        kept_chunks.append(np.concatenate(kept) if kept else walkers)
    points = np.concatenate(kept_chunks)
    weights = np.full(points.size, 1.0 / points.size)
    return PointCloud(points, weights, depth)
