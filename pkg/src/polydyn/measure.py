"""Empirical measures on the sphere and equilibrium-measure experiments.

Pullbacks of weighted atom sets, preimage measures and their Cesaro
means, the pairing with a fixed panel of test functions, mixing and
ergodicity statistics, and the inverse-branch diameter experiment.

Exact mode (preimage trees) is used whenever d^n fits the budget and
gives identity-grade tests; beyond it, seeded stochastic backward
orbits scale. Sampling tasks draw from streams derived from
(rng_seed, task index) and merge by concatenation, so fixed seed and
task count give reproducible output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import INFINITY, Polynomial, SpherePoint
from .errors import ExceptionalBasepoint, PostcriticalOverlap, UndefinedAtAtom
from .orbits import exceptional_set
from .roots import preimages_batch

DEFAULT_BUDGET = 2**16
ATOM_MATCH_TOL = 1e-8


@dataclass(frozen=True)
class TestFunction:
    """Bounded-on-atoms test function with an explicit value at infinity.

    at_infinity follows the convention phi(inf) = lim phi(z)/(1+|z|^2)^k
    with the smallest k making that form bounded; None means the
    function is undefined at infinity and integrating a measure with an
    infinity atom raises UndefinedAtAtom.
    """

    evaluator: callable
    label: str
    at_infinity: float | None = 0.0

    __test__ = False  # pytest: not a test class despite the name

    def __call__(self, z) -> float:
        if isinstance(z, SpherePoint):
            if z.is_infinity:
                if self.at_infinity is None:
                    raise UndefinedAtAtom(f"{self.label} undefined at infinity")
                return self.at_infinity
            z = z.value
        return float(self.evaluator(complex(z)))

    def many(self, zs: np.ndarray) -> np.ndarray:
        return np.array([self.evaluator(complex(z)) for z in zs], dtype=float)


PANEL: tuple[TestFunction, ...] = (
    TestFunction(lambda z: z.real, "re", 0.0),
    TestFunction(lambda z: z.imag, "im", 0.0),
    TestFunction(lambda z: abs(z) ** 2, "abs2", 1.0),
    TestFunction(lambda z: 1.0 / (1.0 + abs(z) ** 2), "inv_abs2", 0.0),
    TestFunction(lambda z: (z * z).real, "re2", 0.0),
    TestFunction(lambda z: (z * z).imag, "im2", 0.0),
)


def _merge_atoms(points: np.ndarray, weights: np.ndarray, tol: float):
    """Deterministically merge atoms within tol*(1+|z|) of each other.

    Sort-sweep union by real part window, then weighted centroids.
    Weights may be signed (used for total-variation differences).
    """
    n = points.size
    if n <= 1:
        return points, weights
    order = np.lexsort((points.imag, points.real))
    pts = points[order]
    wts = weights[order]
    out_pts = []
    out_wts = []
    used = np.zeros(n, dtype=bool)
    scaled = tol * (1.0 + np.abs(pts))
    for i in range(n):
        if used[i]:
            continue
        members = [i]
        used[i] = True
        j = i + 1
        while j < n and pts[j].real - pts[i].real <= scaled[i]:
            if not used[j] and abs(pts[j] - pts[i]) <= max(scaled[i], scaled[j]):
                members.append(j)
                used[j] = True
            j += 1
        idx = np.array(members)
        w = wts[idx]
        total = w.sum()
        absw = np.abs(w)
        if absw.sum() > 0:
            center = (pts[idx] * absw).sum() / absw.sum()
        else:
            center = pts[idx[0]]
        out_pts.append(center)
        out_wts.append(total)
    return np.array(out_pts, dtype=np.complex128), np.array(out_wts, dtype=float)


class EmpiricalMeasure:
    """Finite weighted atom set on the sphere.

    Finite atoms are (points[i], weights[i]); the point at infinity
    carries inf_weight. Atoms may repeat; ``normalize`` merges them and
    rescales to a probability measure.
    """

    __slots__ = ("points", "weights", "inf_weight")

    def __init__(self, points, weights, inf_weight: float = 0.0):
        points = np.asarray(points, dtype=np.complex128).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if points.shape != weights.shape:
            raise ValueError("points and weights must align")
        self.points = points
        self.weights = weights
        self.inf_weight = float(inf_weight)

    @classmethod
    def dirac(cls, z) -> "EmpiricalMeasure":
        if isinstance(z, SpherePoint) and z.is_infinity:
            return cls(np.empty(0, np.complex128), np.empty(0), 1.0)
        value = z.value if isinstance(z, SpherePoint) else complex(z)
        return cls(np.array([value]), np.array([1.0]))

    @property
    def mass(self) -> float:
        return float(self.weights.sum() + self.inf_weight)

    @property
    def size(self) -> int:
        return int(self.points.size) + (1 if self.inf_weight != 0 else 0)

    def scaled(self, factor: float) -> "EmpiricalMeasure":
        return EmpiricalMeasure(
            self.points, self.weights * factor, self.inf_weight * factor
        )

    def merged(self, tol: float = ATOM_MATCH_TOL) -> "EmpiricalMeasure":
        pts, wts = _merge_atoms(self.points, self.weights, tol)
        return EmpiricalMeasure(pts, wts, self.inf_weight)

    def normalize(self, tol: float = ATOM_MATCH_TOL) -> "EmpiricalMeasure":
        m = self.mass
        if m <= 0:
            raise ValueError("cannot normalize a measure without positive mass")
        return self.scaled(1.0 / m).merged(tol)

    def integrate(self, fn: TestFunction) -> float:
        """Sum of w_i * fn(atom_i) over all atoms."""
        total = float(np.dot(fn.many(self.points), self.weights)) if self.points.size else 0.0
        if self.inf_weight != 0.0:
            total += self.inf_weight * fn(INFINITY)
        return total

    def is_probability(self, tol: float = 1e-9) -> bool:
        return abs(self.mass - 1.0) <= tol and self.inf_weight >= 0 and bool(
            (self.weights >= 0).all()
        )

    def __repr__(self):
        return (
            f"EmpiricalMeasure({self.points.size} finite atoms, "
            f"inf_weight={self.inf_weight!r}, mass={self.mass!r})"
        )


def pullback(P: Polynomial, nu: EmpiricalMeasure) -> EmpiricalMeasure:
    """Pullback measure: each atom spreads onto its d preimages.

    Every atom (y, w) is replaced by the d solutions of P(z) = y counted
    with multiplicity, each carrying weight w, so the total mass is
    d * mass(nu). The infinity atom is totally invariant and maps to
    itself with weight d * w. Callers normalize.
    """
    d = P.degree
    if nu.points.size == 0:
        return EmpiricalMeasure(
            np.empty(0, np.complex128), np.empty(0), nu.inf_weight * d
        )
    roots = preimages_batch(P, nu.points)  # (n, d), multiplicity included
    weights = np.repeat(nu.weights, d)
    return EmpiricalMeasure(roots.ravel(), weights, nu.inf_weight * d)


def _task_counts(total: int, tasks: int) -> list[int]:
    base, extra = divmod(total, tasks)
    return [base + (1 if t < extra else 0) for t in range(tasks)]


def _sampled_preimage_measure(
    P: Polynomial, x: complex, n: int, samples: int, rng_seed: int, tasks: int
) -> EmpiricalMeasure:
    d = P.degree
    chunks = []
    for t, count in enumerate(_task_counts(samples, tasks)):
        if count == 0:
            continue
        rng = np.random.default_rng(np.random.SeedSequence((rng_seed, t)))
        walkers = np.full(count, complex(x), dtype=np.complex128)
        for _ in range(n):
            roots = preimages_batch(P, walkers)
            pick = rng.integers(0, d, size=count)
            walkers = roots[np.arange(count), pick]
        chunks.append(walkers)
    pts = np.concatenate(chunks)
    return EmpiricalMeasure(pts, np.full(pts.size, 1.0 / pts.size))


def mu_nx(
    P: Polynomial,
    x: complex,
    n: int,
    budget: int = DEFAULT_BUDGET,
    rng_seed: int | None = None,
    samples: int | None = None,
    tasks: int = 1,
) -> EmpiricalMeasure:
    """The preimage measure: uniform mass on the d^n solutions of
    P^n(z) = x, counted with multiplicity.

    Exact (repeated pullback of the point mass at x, normalized each
    level) while d^n fits the budget; otherwise a Monte-Carlo
    approximation by ``samples`` (default: budget) stochastic backward
    orbits with multiplicity-weighted branching, which requires
    rng_seed.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = complex(x)
    d = P.degree
    if d**n <= budget:
        mu = EmpiricalMeasure.dirac(x)
        for _ in range(n):
            mu = pullback(P, mu).scaled(1.0 / d).merged()
        return mu
    if rng_seed is None:
        raise ValueError("stochastic mode requires rng_seed")
    count = budget if samples is None else int(samples)
    return _sampled_preimage_measure(P, x, n, count, rng_seed, tasks)


def cesaro(
    P: Polynomial,
    x: complex,
    n: int,
    budget: int = DEFAULT_BUDGET,
    rng_seed: int | None = None,
    samples: int | None = None,
    tasks: int = 1,
) -> EmpiricalMeasure:
    """Equal-weight mixture of the preimage measures at depths 1 .. n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    pts = []
    wts = []
    inf_w = 0.0
    for j in range(1, n + 1):
        mu = mu_nx(P, x, j, budget=budget, rng_seed=rng_seed, samples=samples, tasks=tasks)
        pts.append(mu.points)
        wts.append(mu.weights / n)
        inf_w += mu.inf_weight / n
    return EmpiricalMeasure(
        np.concatenate(pts), np.concatenate(wts), inf_w
    ).merged()


def tv_distance(
    mu: EmpiricalMeasure, nu: EmpiricalMeasure, tol: float = ATOM_MATCH_TOL
) -> float:
    """Total mass of the signed difference mu - nu.

    Atoms are matched within tol*(1+|z|); unmatched mass counts in
    full. This is the unhalved total-variation norm, the convention in
    which consecutive Cesaro means differ by at most 2/(n+1).
    """
    pts = np.concatenate([mu.points, nu.points])
    wts = np.concatenate([mu.weights, -nu.weights])
    merged_pts, merged_wts = _merge_atoms(pts, wts, tol)
    return float(np.abs(merged_wts).sum() + abs(mu.inf_weight - nu.inf_weight))


def panel_gap(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    panel: tuple[TestFunction, ...] = PANEL,
) -> float:
    """max over the panel of |int phi dmu - int phi dnu|."""
    return max(abs(mu.integrate(fn) - nu.integrate(fn)) for fn in panel)


def pushforward_fn(P: Polynomial, fn: TestFunction) -> TestFunction:
    """Transfer-operator image: z maps to the multiplicity-weighted sum
    of fn over the preimages of z.

    The constant function 1 pushes to the constant d. At infinity all d
    preimages are infinity, so the value is d * fn(inf).
    """
    d = P.degree

    def evaluator(z: complex) -> float:
        roots = preimages_batch(P, np.array([z]))[0]
        return float(fn.many(roots).sum())

    at_inf = None if fn.at_infinity is None else d * fn.at_infinity
    return TestFunction(evaluator, f"push[{fn.label}]", at_inf)


def duality_residual(
    P: Polynomial, fn: TestFunction, nu: EmpiricalMeasure
) -> float:
    """|int phi d(pullback nu) - int (pushforward phi) dnu|.

    A finite rearrangement identity for empirical measures; the residual
    only sees floating-point error and preimage-solver differences.
    """
    lhs = pullback(P, nu).integrate(fn)
    rhs = nu.integrate(pushforward_fn(P, fn))
    return abs(lhs - rhs)


@dataclass(frozen=True)
class GapReport:
    """Weak-convergence gap between two preimage measures."""

    gap: float
    per_function: dict
    n: int
    exact: bool


def weak_gap(
    P: Polynomial,
    x: complex,
    y: complex,
    n: int,
    panel: tuple[TestFunction, ...] = PANEL,
    budget: int = DEFAULT_BUDGET,
    rng_seed: int | None = None,
    samples: int | None = None,
    tasks: int = 1,
) -> GapReport:
    """max over the panel of |int phi dmu_{n,x} - int phi dmu_{n,y}|.

    Both basepoints must be outside the exceptional set (backward orbits
    of exceptional points never equidistribute). Sampled mode reports a
    Monte-Carlo standard error per panel function.
    """
    exc = exceptional_set(P)
    for point in (x, y):
        if exc.contains(complex(point)):
            raise ExceptionalBasepoint(f"basepoint {point!r} is exceptional")
    exact = P.degree**n <= budget
    mu = mu_nx(P, x, n, budget=budget, rng_seed=rng_seed, samples=samples, tasks=tasks)
    nu = mu_nx(
        P,
        y,
        n,
        budget=budget,
        rng_seed=None if rng_seed is None else rng_seed + 1,
        samples=samples,
        tasks=tasks,
    )
    per = {}
    worst = 0.0
    for fn in panel:
        a = mu.integrate(fn)
        b = nu.integrate(fn)
        if exact:
            stderr = 0.0
        else:
            va = fn.many(mu.points)
            vb = fn.many(nu.points)
            stderr = math.sqrt(
                va.var() / max(va.size, 1) + vb.var() / max(vb.size, 1)
            )
        per[fn.label] = {"gap": abs(a - b), "stderr": stderr}
        worst = max(worst, abs(a - b))
    return GapReport(worst, per, n, exact)


def forward_values(P: Polynomial, points: np.ndarray, n: int, radius_factor: float = 4.0):
    """P^n over an atom array with escape tracking; returns (values, escaped)."""
    radius = radius_factor * P.escape_radius()
    return P.iterate_many(points, n, radius=radius)


def mixing_correlation(
    P: Polynomial,
    fn: TestFunction,
    gn: TestFunction,
    n: int,
    mu_hat: EmpiricalMeasure,
) -> complex:
    """C_n = int fn * (gn o P^n) dmu - (int fn dmu)(int gn dmu).

    mu_hat should approximate the equilibrium measure (a deep preimage
    measure or Cesaro mean). Atoms that escape during the forward
    iteration evaluate gn at infinity.
    """
    values, escaped = forward_values(P, mu_hat.points, n)
    g_vals = np.empty(values.size, dtype=float)
    for i, (v, esc) in enumerate(zip(values, escaped)):
        g_vals[i] = gn(INFINITY) if esc else gn(complex(v))
    f_vals = fn.many(mu_hat.points)
    cross = float(np.dot(f_vals * g_vals, mu_hat.weights))
    if mu_hat.inf_weight != 0.0:
        cross += mu_hat.inf_weight * fn(INFINITY) * gn(INFINITY)
    return cross - mu_hat.integrate(fn) * mu_hat.integrate(gn)


@dataclass(frozen=True)
class ErgodicityReport:
    """Correlations of an indicator with its own preimages.

    invariance_defect is the mu-mass of the symmetric difference between
    E and P^{-1}E estimated on atoms; when it is below the tolerance the
    set is numerically invariant and consistency demands mu(E) near 0
    or 1.
    """

    mu_e: float
    correlations: dict
    invariance_defect: float
    numerically_invariant: bool
    consistent: bool


def ergodicity_check(
    P: Polynomial,
    indicator: TestFunction,
    mu_hat: EmpiricalMeasure,
    ns: tuple = (1, 2, 3, 4, 5, 6),
    invariance_tol: float = 1e-6,
) -> ErgodicityReport:
    """Estimate mu(E) and mu(E intersect P^{-n}E) on a schedule of n.

    indicator must be {0,1}-valued on atoms.
    """
    e_vals = indicator.many(mu_hat.points)
    if not np.isin(np.round(e_vals, 6), (0.0, 1.0)).all():
        raise ValueError("indicator must be 0/1-valued on atoms")
    mu_e = mu_hat.integrate(indicator)
    correlations = {}
    for n in ns:
        values, escaped = forward_values(P, mu_hat.points, n)
        e_pull = np.array(
            [
                indicator(INFINITY) if esc else indicator(complex(v))
                for v, esc in zip(values, escaped)
            ]
        )
        correlations[int(n)] = float(np.dot(e_vals * e_pull, mu_hat.weights))
    values, escaped = forward_values(P, mu_hat.points, 1)
    e_one = np.array(
        [
            indicator(INFINITY) if esc else indicator(complex(v))
            for v, esc in zip(values, escaped)
        ]
    )
    defect = float(np.dot(np.abs(e_vals - e_one), mu_hat.weights))
    invariant = defect < invariance_tol
    consistent = (not invariant) or min(mu_e, abs(1.0 - mu_e)) < 1e-6
    return ErgodicityReport(mu_e, correlations, defect, invariant, consistent)


def postcritical_points(
    P: Polynomial, depth: int = 20, bound: float | None = None
) -> np.ndarray:
    """Forward images of the critical set up to ``depth``, escape-truncated."""
    crit = P.critical_points()
    if bound is None:
        bound = 2.0 * P.escape_radius()
    out = []
    current = np.asarray(crit, dtype=np.complex128)
    for _ in range(depth):
        if current.size == 0:
            break
        current = np.array([P(complex(z)) for z in current])
        keep = np.abs(current) <= bound
        current = current[keep]
        out.append(current.copy())
    if not out:
        return np.empty(0, dtype=np.complex128)
    return np.concatenate(out)


@dataclass(frozen=True)
class DiameterReport:
    """Inverse-branch diameter statistics over sampled backward orbits.

    diameters[b, n] is the spread (max pairwise distance of the tracked
    boundary samples) of branch b at depth n, n = 0 .. n_max.
    slope_log10 is the least-squares slope of mean log10 diameter
    against depth; c_fit is the 95th percentile of diam * d^{n/2} and
    fraction_within the share of samples at or below c_fit * d^{-n/2}.
    """

    diameters: np.ndarray
    n_max: int
    degree: int
    slope_log10: float
    intercept_log10: float
    c_fit: float
    fraction_within: float

    def mean_log10(self) -> np.ndarray:
        return np.log10(self.diameters[:, 1:]).mean(axis=0)


def lyubich_diameters(
    P: Polynomial,
    center: complex,
    radius: float,
    n_max: int,
    branches: int,
    rng_seed: int,
    tasks: int = 1,
    boundary_samples: int = 16,
    postcritical_depth: int = 20,
) -> DiameterReport:
    """Track a small disc along random inverse branches.

    The disc must avoid the tracked postcritical set (inverse branches
    are only well-defined off it). A branch is a stochastic backward
    orbit of the center; the disc rides along via boundary samples, each
    assigned the preimage nearest the chosen center preimage. The
    'diameter' at depth n is the max pairwise distance of the tracked
    samples, which for near-disc branch images is the honest diameter
    up to bounded distortion.
    """
    center = complex(center)
    if radius <= 0:
        raise ValueError("radius must be positive")
    vl = postcritical_points(P, postcritical_depth)
    if vl.size and float(np.min(np.abs(vl - center))) <= radius:
        raise PostcriticalOverlap(
            "disc meets the tracked postcritical set; move it or shrink it"
        )
    d = P.degree
    m = boundary_samples
    angles = 2.0 * np.pi * np.arange(m) / m
    template = np.concatenate(([center], center + radius * np.exp(1j * angles)))

    all_diams = []
    for t, count in enumerate(_task_counts(branches, tasks)):
        if count == 0:
            continue
        rng = np.random.default_rng(np.random.SeedSequence((rng_seed, t)))
        pts = np.tile(template, (count, 1))  # (count, m+1), column 0 = center
        diams = np.empty((count, n_max + 1))
        diams[:, 0] = _spread(pts)
        for n in range(1, n_max + 1):
            flat = pts.ravel()
            roots = preimages_batch(P, flat).reshape(count, m + 1, d)
            pick = rng.integers(0, d, size=count)
            new_centers = roots[np.arange(count), 0, pick]
            dist = np.abs(roots - new_centers[:, None, None])
            choice = np.argmin(dist, axis=2)
            rows = np.arange(count)[:, None]
            cols = np.arange(m + 1)[None, :]
            pts = roots[rows, cols, choice]
            pts[:, 0] = new_centers
            diams[:, n] = _spread(pts)
        all_diams.append(diams)
    diameters = np.concatenate(all_diams, axis=0)

    ns = np.arange(1, n_max + 1, dtype=float)
    mean_log10 = np.log10(diameters[:, 1:]).mean(axis=0)
    slope, intercept = np.polyfit(ns, mean_log10, 1)
    rescaled = diameters[:, 1:] * float(d) ** (ns[None, :] / 2.0)
    c_fit = float(np.quantile(rescaled, 0.95))
    within = rescaled <= c_fit
    return DiameterReport(
        diameters,
        n_max,
        d,
        float(slope),
        float(intercept),
        c_fit,
        float(within.mean()),
    )


def _spread(pts: np.ndarray) -> np.ndarray:
    """Max pairwise distance within each row of a (b, m) point array."""
    diff = np.abs(pts[:, :, None] - pts[:, None, :])
    return diff.max(axis=(1, 2))


def pullback_iterated(
    P: Polynomial, nu: EmpiricalMeasure, n: int
) -> EmpiricalMeasure:
    """Normalized n-fold pullback of an arbitrary starting measure.

    Converges weakly to the equilibrium measure whenever nu gives no
    mass to the exceptional set.
    """
    mu = nu
    d = P.degree
    for _ in range(n):
        mu = pullback(P, mu).scaled(1.0 / d).merged()
    return mu
