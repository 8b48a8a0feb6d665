"""Hyperbolic geometry of the unit disc and holomorphic self-map iteration.

Poincare distance, non-expansion of holomorphic self-maps, iteration
limits (interior fixed point or boundary attractor), and the univalent
function inequalities: the area bound on Laurent tails and the quarter
coverage with its coefficient corollary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotASelfMap, NotNormalized, OutsideDisc

BOUNDARY_BAND = 0.999  # beyond this modulus displacement is measured Euclidean


def poincare_distance(z: complex, w: complex) -> float:
    """Hyperbolic distance for the metric |dz| / (1 - |z|^2).

    Closed form arctanh |(z - w) / (1 - conj(z) w)|, the geodesic
    minimum; disc automorphisms are isometries of it.
    """
    z, w = complex(z), complex(w)
    if abs(z) >= 1.0 or abs(w) >= 1.0:
        raise OutsideDisc("points must lie in the open unit disc")
    num = abs(z - w)
    den = abs(1.0 - z.conjugate() * w)
    return math.atanh(num / den)


_GRID_RADII = (0.3, 0.6, 0.95)
_GRID_ANGLES = 64


class DiscMap:
    """Holomorphic self-map of the unit disc with a declared kind.

    kind is "automorphism" for the disc rotations/Moebius maps (allowed
    to touch the boundary) and "strict" for declared non-automorphisms,
    which must stay uniformly inside on the validation grids
    |z| <= 1 - delta; violations are rejected at construction.
    """

    __slots__ = ("evaluator", "kind", "label")

    def __init__(self, evaluator, kind: str, label: str):
        if kind not in ("automorphism", "strict"):
            raise ValueError("kind must be 'automorphism' or 'strict'")
        self.evaluator = evaluator
        self.kind = kind
        self.label = label
        self._validate()

    def _validate(self):
        for r in _GRID_RADII:
            zs = r * np.exp(2j * np.pi * np.arange(_GRID_ANGLES) / _GRID_ANGLES)
            vals = np.array([self.evaluator(complex(z)) for z in zs])
            mags = np.abs(vals)
            if self.kind == "automorphism":
                if (mags > 1.0 + 1e-12).any():
                    raise NotASelfMap(f"{self.label} leaves the closed disc")
            else:
                if (mags > 1.0 - 1e-9).any():
                    raise NotASelfMap(
                        f"{self.label} is not strictly inside the disc on |z|={r}"
                    )

    def __call__(self, z: complex) -> complex:
        return complex(self.evaluator(complex(z)))

    @property
    def is_automorphism(self) -> bool:
        return self.kind == "automorphism"

    # -- constructors ------------------------------------------------------

    @classmethod
    def mobius(cls, a: complex, theta: float = 0.0) -> "DiscMap":
        """Disc automorphism e^{i theta} (z + a) / (1 + conj(a) z)."""
        a = complex(a)
        if abs(a) >= 1.0:
            raise OutsideDisc("Moebius parameter must satisfy |a| < 1")
        phase = complex(math.cos(theta), math.sin(theta))

        def f(z):
            return phase * (z + a) / (1.0 + a.conjugate() * z)

        return cls(f, "automorphism", f"mobius(a={a}, theta={theta})")

    @classmethod
    def rotation(cls, theta: float) -> "DiscMap":
        phase = complex(math.cos(theta), math.sin(theta))
        return cls(lambda z: phase * z, "automorphism", f"rotation({theta})")

    @classmethod
    def blaschke(cls, zeros, theta: float = 0.0) -> "DiscMap":
        """Finite Blaschke product with the given zeros.

        A single factor is an automorphism; two or more make a strict
        self-map.
        """
        zeros = [complex(a) for a in zeros]
        if any(abs(a) >= 1 for a in zeros):
            raise OutsideDisc("Blaschke zeros must lie in the open disc")
        phase = complex(math.cos(theta), math.sin(theta))

        def f(z):
            out = phase
            for a in zeros:
                out *= (z - a) / (1.0 - a.conjugate() * z)
            return out

        kind = "automorphism" if len(zeros) <= 1 else "strict"
        return cls(f, kind, f"blaschke({zeros}, theta={theta})")

    @classmethod
    def from_polynomial(cls, coeffs) -> "DiscMap":
        """Polynomial restricted to the disc; must be a strict self-map."""
        c = np.asarray(coeffs, dtype=np.complex128)

        def f(z):
            out = c[-1]
            for k in range(c.size - 2, -1, -1):
                out = out * z + c[k]
            return out

        return cls(f, "strict", f"poly({list(c)})")


def schwarz_pick(f: DiscMap, z: complex, w: complex) -> float:
    """Contraction ratio rho(f(z), f(w)) / rho(z, w).

    At most 1 for every holomorphic self-map; equal to 1 exactly for
    automorphisms and strictly below 1 otherwise.
    """
    z, w = complex(z), complex(w)
    if z == w:
        raise ValueError("needs two distinct points")
    base = poincare_distance(z, w)
    image = poincare_distance(f(z), f(w))
    return image / base


@dataclass(frozen=True)
class DenjoyWolffResult:
    """Iteration limit of a disc self-map.

    kind is "interior_fixed" (hyperbolic displacement converged inside),
    "boundary" (Euclidean displacement converged near the boundary) or
    "undecided" after n_max steps (e.g. an elliptic rotation).
    """

    point: complex
    kind: str
    iterations: int
    displacement: float


def denjoy_wolff(
    f: DiscMap,
    z0: complex = 0j,
    tol: float = 1e-9,
    n_max: int = 100_000,
) -> DenjoyWolffResult:
    """Iterate until successive displacement drops below tol.

    Interior displacement is hyperbolic; once the orbit passes modulus
    0.999 it is measured Euclidean (the hyperbolic metric blows up at
    the boundary).
    """
    z = complex(z0)
    if abs(z) >= 1.0:
        raise OutsideDisc("starting point must lie in the open disc")
    for n in range(1, n_max + 1):
        z_next = f(z)
        near_boundary = abs(z) > BOUNDARY_BAND or abs(z_next) > BOUNDARY_BAND
        if near_boundary:
            disp = abs(z_next - z)
        else:
            disp = poincare_distance(z, z_next)
        if disp < tol:
            kind = "boundary" if abs(z_next) > BOUNDARY_BAND else "interior_fixed"
            return DenjoyWolffResult(z_next, kind, n, disp)
        z = z_next
    return DenjoyWolffResult(z, "undecided", n_max, disp)


# -- univalent-function inequalities -------------------------------------------


@dataclass(frozen=True)
class LaurentTail:
    """Coefficients b_0 .. b_N of g(z) = 1/z + sum b_n z^n."""

    b: tuple

    def __post_init__(self):
        if len(self.b) < 2:
            raise ValueError("tail needs at least b_0, b_1")
        object.__setattr__(self, "b", tuple(complex(v) for v in self.b))

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        out = 1.0 / z
        zp = 1.0 + 0j
        for coeff in self.b:
            out += coeff * zp
            zp *= z
        return out


@dataclass(frozen=True)
class AreaReport:
    """Partial sum S = sum n |b_n|^2 against the univalence budget 1."""

    total: float
    passed: bool
    univalent_on_grid: bool
    min_grid_gap: float


def area_theorem_sum(tail: LaurentTail, injectivity_tol: float = 1e-9) -> AreaReport:
    """S = sum_{n<=N} n |b_n|^2, PASS iff S <= 1 + 1e-9.

    The caller asserts univalence; a spot-check evaluates the map on a
    fixed polar grid (including the radius 1/sqrt(2) circle, where the
    classical counterexamples collide) and reports whether any two grid
    images coincide within tolerance. The check warns, it does not
    certify.
    """
    n = np.arange(len(tail.b), dtype=float)
    total = float((n * np.abs(np.asarray(tail.b)) ** 2).sum())

    radii = (0.2, 0.45, 1.0 / math.sqrt(2.0), 0.85)
    angles = np.exp(2j * np.pi * np.arange(32) / 32)
    grid = np.concatenate([r * angles for r in radii])
    vals = np.array([tail(z) for z in grid])
    diff = np.abs(vals[:, None] - vals[None, :])
    np.fill_diagonal(diff, np.inf)
    min_gap = float(diff.min())
    return AreaReport(
        total,
        total <= 1.0 + 1e-9,
        min_gap > injectivity_tol,
        min_gap,
    )


def winding_number(curve: np.ndarray, w: complex) -> int:
    """Winding of a closed sampled curve about w, by angle summation."""
    rel = curve - w
    angles = np.angle(rel[np.r_[1:curve.size, 0]] / rel)
    return int(round(float(angles.sum()) / (2.0 * math.pi)))


def koebe_function(z: complex) -> complex:
    """The extremal function z / (1 - z)^2 = z + 2 z^2 + 3 z^3 + ..."""
    z = complex(z)
    return z / (1.0 - z) ** 2


def koebe_function_coeffs(order: int) -> np.ndarray:
    return np.arange(order + 1, dtype=np.complex128)


@dataclass(frozen=True)
class KoebeReport:
    """Coefficient bound and quarter-disc coverage by winding number."""

    a2_abs: float
    a2_passed: bool
    coverage_passed: bool
    bad_windings: tuple
    univalent_on_grid: bool


def koebe_quarter_check(
    coeffs,
    evaluator=None,
    boundary_radius: float = 0.999,
    boundary_samples: int = 4096,
    coverage_radius: float = 0.24,
    rings: int = 4,
    ray_count: int = 16,
) -> KoebeReport:
    """Check |a_2| <= 2 and coverage of the 0.24 disc for a normalized
    univalent series f = z + a_2 z^2 + ...

    Coverage holds when every grid point of the coverage disc has
    winding number exactly 1 for the curve f(|z| = boundary_radius) - w.
    The tested radius sits strictly inside the sharp 1/4, which is the
    honest numerical statement. evaluator (default: coefficient
    evaluation) allows an exact closed form when the series truncation
    is unusable at the boundary.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    if c.size < 3:
        raise ValueError("need coefficients through order 2")
    if abs(c[0]) > 1e-12 or abs(c[1] - 1.0) > 1e-12:
        raise NotNormalized("need f(0) = 0 and f'(0) = 1")
    if evaluator is None:
        def evaluator(z, _c=c):
            out = _c[-1]
            for k in range(_c.size - 2, -1, -1):
                out = out * z + _c[k]
            return out

    a2 = abs(complex(c[2]))
    a2_passed = a2 <= 2.0 + 1e-9

    zs = boundary_radius * np.exp(
        2j * np.pi * np.arange(boundary_samples) / boundary_samples
    )
    curve = np.array([evaluator(complex(z)) for z in zs])

    targets = [0j]
    for r in np.linspace(coverage_radius / rings, coverage_radius, rings):
        for k in range(ray_count):
            targets.append(r * np.exp(2j * np.pi * k / ray_count))
    bad = []
    for w in targets:
        wn = winding_number(curve, complex(w))
        if wn != 1:
            bad.append((complex(w), wn))

    # Pairwise-distinct spot check on an interior polar grid.
    radii = np.linspace(0.1, 0.9, 9)
    angles = np.exp(2j * np.pi * np.arange(24) / 24)
    grid = np.concatenate([r * angles for r in radii])
    vals = np.array([evaluator(complex(z)) for z in grid])
    diff = np.abs(vals[:, None] - vals[None, :])
    np.fill_diagonal(diff, np.inf)
    univalent = bool(diff.min() > 1e-9)

    return KoebeReport(a2, a2_passed, not bad, tuple(bad), univalent)


@dataclass(frozen=True)
class DistortionReport:
    """Spread-to-area ratio sup |f(z)-f(w)| / sqrt(Area f(disc))."""

    ratio: float
    diameter: float
    area: float
    s: float


def koebe_distortion_check(
    coeffs,
    s: float,
    angular: int = 128,
    radial: int = 96,
) -> DistortionReport:
    """Distortion statistic of a univalent series on |z| <= s.

    The image area is the Jacobian integral of |f'|^2 over the unit
    disc (exact for univalent maps, multiplicity-counted otherwise);
    the spread maximum is attained on the torus |z| = |w| = s.
    """
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie in (0, 1)")
    c = np.asarray(coeffs, dtype=np.complex128)
    dc = c[1:] * np.arange(1, c.size)

    def ev(points, coef):
        out = np.full(points.shape, coef[-1], dtype=np.complex128)
        for k in range(coef.size - 2, -1, -1):
            out = out * points + coef[k]
        return out

    boundary = s * np.exp(2j * np.pi * np.arange(angular) / angular)
    vals = ev(boundary, c)
    diameter = float(np.abs(vals[:, None] - vals[None, :]).max())

    r_mid = (np.arange(radial) + 0.5) / radial
    thetas = 2.0 * np.pi * np.arange(angular) / angular
    zs = r_mid[:, None] * np.exp(1j * thetas)[None, :]
    jac = np.abs(ev(zs, dc)) ** 2
    area = float((jac * r_mid[:, None]).sum() * (1.0 / radial) * (2.0 * np.pi / angular))
    return DistortionReport(diameter / math.sqrt(area), diameter, area, s)
