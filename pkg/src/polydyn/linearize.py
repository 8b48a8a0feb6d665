"""Local conjugacies at fixed points and their obstructions.

Linearizing series for attracting/repelling fixed points, the conjugacy
to w -> w^p at superattracting points (and its logarithm at infinity,
the escape-rate potential), irrational-rotation linearization with a
small-denominator ledger, non-linearizable rotation-number
certificates, a plan-size recursion for the fast-convergence iteration
scheme, and attracting petals at multiplier-one fixed points.

Every conjugacy is computed by exact coefficient recursion on truncated
series; the classical limit constructions survive in the tests as
low-order cross-checks. The recursion is numerically stable and leaves
a machine-checkable residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Polynomial, monicize_scale
from .errors import (
    NotAttracting,
    NotSuperattracting,
    NotTangentToIdentity,
    ResonantMultiplier,
    SmallDenominator,
    WrongOrder,
)

RESONANCE_TOL = 1e-12
DENOMINATOR_FLOOR = 1e-14
RESIDUAL_TARGET = 1e-6
GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0


class PowerSeries:
    """Truncated one-variable power series c_0 + c_1 z + ... + c_N z^N.

    Arithmetic truncates consistently at the order of the shorter
    operand. radius_hint records an estimated domain of validity
    (0 when unknown).
    """

    __slots__ = ("_c", "radius_hint")

    def __init__(self, coeffs, radius_hint: float = 0.0):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128)).copy()
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("series needs at least order 1 (two coefficients)")
        arr.setflags(write=False)
        self._c = arr
        self.radius_hint = float(radius_hint)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return self._c.size - 1

    def __getitem__(self, k: int) -> complex:
        return complex(self._c[k]) if k < self._c.size else 0j

    def __call__(self, z):
        out = self._c[-1]
        for k in range(self._c.size - 2, -1, -1):
            out = out * z + self._c[k]
        return out

    def truncated(self, order: int) -> "PowerSeries":
        n = min(order, self.order)
        return PowerSeries(self._c[: n + 1], self.radius_hint)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        return PowerSeries(self._c[: n + 1] + other._c[: n + 1])

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        return PowerSeries(self._c[: n + 1] - other._c[: n + 1])

    def __mul__(self, other):
        if np.isscalar(other) or isinstance(other, complex):
            return PowerSeries(self._c * other, self.radius_hint)
        n = min(self.order, other.order)
        full = np.convolve(self._c[: n + 1], other._c[: n + 1])
        return PowerSeries(full[: n + 1])

    __rmul__ = __mul__

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner(z)), truncated; inner must vanish at 0."""
        if abs(inner[0]) > 0:
            raise ValueError("inner series must have zero constant term")
        n = min(self.order, inner.order)
        inner_c = inner._c[: n + 1]
        # Horner in the truncated series ring.
        acc = np.zeros(n + 1, dtype=np.complex128)
        acc[0] = self[n]
        for k in range(n - 1, -1, -1):
            acc = np.convolve(acc, inner_c)[: n + 1]
            acc[0] += self[k]
        return PowerSeries(acc)

    def pow_int(self, p: int) -> "PowerSeries":
        one = np.zeros(self.order + 1, dtype=np.complex128)
        one[0] = 1.0
        out = PowerSeries(one)
        for _ in range(p):
            out = out * self
        return out

    def derivative(self) -> "PowerSeries":
        if self.order == 1:
            return PowerSeries([self._c[1], 0.0])
        ks = np.arange(1, self._c.size)
        return PowerSeries(self._c[1:] * ks)

    def __repr__(self):
        head = ", ".join(f"{c:.6g}" for c in self._c[:4])
        return f"PowerSeries([{head}{', ...' if self.order > 3 else ''}], N={self.order})"


def identity_series(order: int) -> PowerSeries:
    c = np.zeros(order + 1, dtype=np.complex128)
    c[1] = 1.0
    return PowerSeries(c)


def polynomial_series(P: Polynomial, order: int) -> PowerSeries:
    c = np.zeros(order + 1, dtype=np.complex128)
    upto = min(order, P.degree)
    c[: upto + 1] = P.coeffs[: upto + 1]
    return PowerSeries(c)


def _shift_to_fixed_point(P: Polynomial, z0: complex) -> Polynomial:
    """Local map u -> P(z0 + u) - z0 about a fixed point z0."""
    z0 = complex(z0)
    shifted = P.compose(Polynomial([z0, 1.0]))
    c = shifted.coeffs.copy()
    c[0] -= z0
    if abs(c[0]) > 1e-9 * (1.0 + abs(z0)):
        raise ValueError(f"{z0!r} is not a fixed point (defect {abs(c[0]):.3e})")
    c[0] = 0.0
    return Polynomial(c)


def _residual_on_circle(lhs_fn, rhs_fn, r: float, samples: int = 64) -> float:
    zs = r * np.exp(2j * np.pi * np.arange(samples) / samples)
    return float(np.max(np.abs([lhs_fn(z) - rhs_fn(z) for z in zs])))


def _radius_hint(residual_at, r_start: float, target: float = RESIDUAL_TARGET) -> float:
    """Largest radius on a geometric grid keeping the residual below target."""
    r = r_start
    for _ in range(200):
        if residual_at(r) < target:
            return r
        r *= 0.8
    return 0.0


# -- attracting / repelling fixed points --------------------------------------


@dataclass(frozen=True)
class Linearization:
    """A linearizing series with its diagnostics.

    series transforms the local coordinate u = z - z0 (after any
    documented scaling) and satisfies the stated functional equation up
    to ``residual`` on the test circle of radius ``test_radius``.
    """

    series: PowerSeries
    multiplier: complex
    fixed_point: complex
    residual: float
    test_radius: float
    denominators_min: float = math.inf


def koenigs(P: Polynomial, z0: complex, order: int) -> Linearization:
    """Series phi with phi(P(z)) = lambda phi(z) near the fixed point z0.

    Normalized to phi(z0) = 0, phi'(z0) = 1 in u = z - z0. Works for
    attracting (0 < |lambda| < 1) and, by the same recursion, repelling
    multipliers. Multipliers at or numerically near the unit circle are
    rejected, as is lambda = 0.

    Raises
    ------
    NotAttracting
        |lambda| is 0 or within 1e-6 of 1.
    ResonantMultiplier
        Some denominator lambda^k - lambda nearly vanishes (cannot
        happen in the admissible range, but checked).
    """
    local = _shift_to_fixed_point(P, z0)
    lam = complex(local.coeffs[1])
    mag = abs(lam)
    if mag < 1e-12 or abs(mag - 1.0) < 1e-6:
        raise NotAttracting(
            f"|multiplier| = {mag:.6g}; need 0 < |lambda| < 1 or |lambda| > 1"
        )
    if order < 2:
        raise ValueError("order must be at least 2")

    q = polynomial_series(local, order)
    denom_min = math.inf
    c = np.zeros(order + 1, dtype=np.complex128)
    c[1] = 1.0
    # Powers of the local map, truncated; [q^j]_k enters the order-k identity.
    powers = [None, q]
    for j in range(2, order + 1):
        powers.append(powers[-1] * q)
    for k in range(2, order + 1):
        denom = lam**k - lam
        denom_min = min(denom_min, abs(denom))
        if abs(denom) < RESONANCE_TOL:
            raise ResonantMultiplier(
                f"lambda^{k} - lambda = {denom:.3e}: resonant multiplier"
            )
        rhs = 0j
        for j in range(1, k):
            rhs += c[j] * powers[j][k]
        c[k] = rhs / (lam - lam**k)
    phi = PowerSeries(c)

    def residual_at(r: float) -> float:
        return _residual_on_circle(lambda z: phi(local(z)), lambda z: lam * phi(z), r)

    hint = _radius_hint(residual_at, r_start=0.5 * _inner_radius(local))
    phi = PowerSeries(c, radius_hint=hint)
    r_test = 0.1 * hint if hint > 0 else 0.0
    res = residual_at(r_test) if r_test > 0 else math.inf
    return Linearization(phi, lam, complex(z0), res, r_test, denom_min)


def _inner_radius(local: Polynomial) -> float:
    # Coarse scale on which the local polynomial stays tame.
    tail = np.abs(local.coeffs[2:]).sum()
    return 1.0 if tail == 0 else min(1.0, 1.0 / tail)


# -- superattracting fixed points and the escape potential --------------------


@dataclass(frozen=True)
class BoettcherResult:
    """Conjugacy to w -> w^p at a finite superattracting fixed point.

    series lives in the monicized coordinate u = scale * (z - z0) where
    scale^(p-1) equals the leading local coefficient (principal root;
    one of p-1 equally valid gauges).
    """

    series: PowerSeries
    local_degree: int
    fixed_point: complex
    scale: complex
    residual: float
    test_radius: float


def boettcher_series(P: Polynomial, z0: complex, order: int) -> BoettcherResult:
    """Series phi with phi(M(u)) = phi(u)^p, M the monicized local map.

    Requires P(z0) = z0 with vanishing derivative; p is the local
    valuation. The recursion solves coefficient by coefficient, dividing
    only by p (no small denominators).
    """
    local = _shift_to_fixed_point(P, z0)
    c = local.coeffs
    if abs(c[1]) > 1e-10:
        raise NotSuperattracting(
            f"P'(z0) = {c[1]:.3e}; superattracting needs multiplier 0"
        )
    p = next((k for k in range(2, c.size) if abs(c[k]) > 1e-12), None)
    if p is None:
        raise NotSuperattracting("local map vanishes to all tracked orders")
    scale = monicize_scale(c[p], p)
    # M(u) = scale * local(u / scale): leading coefficient becomes 1.
    ks = np.arange(c.size)
    m_coeffs = c * scale ** (1 - ks)
    m_coeffs[1] = 0.0
    local_m = Polynomial(m_coeffs)

    # Internal order large enough that the order-(p+k-1) identity
    # determines every requested coefficient c_2 .. c_order.
    n = p + order - 1
    m_series = polynomial_series(local_m, n)
    phi = identity_series(n)
    for k in range(2, order + 1):
        defect = phi.compose(m_series) - phi.pow_int(p)
        c_new = phi.coeffs.copy()
        c_new[k] = defect[p + k - 1] / p
        phi = PowerSeries(c_new)
    phi = phi.truncated(order)

    def residual_at(r: float) -> float:
        return _residual_on_circle(
            lambda z: phi(local_m(z)), lambda z: phi(z) ** p, r
        )

    hint = _radius_hint(residual_at, r_start=0.5)
    r_test = 0.1 * hint if hint > 0 else 0.0
    res = residual_at(r_test) if r_test > 0 else math.inf
    return BoettcherResult(
        PowerSeries(phi.coeffs, radius_hint=hint),
        p,
        complex(z0),
        scale,
        res,
        r_test,
    )


@dataclass(frozen=True)
class GreenValue:
    """Escape-rate potential value; escaped=False means the orbit stayed
    bounded for n_max steps and the value is the 0 convention."""

    value: float
    escaped: bool
    iterations: int


def green_function(
    P: Polynomial,
    z: complex,
    n_max: int = 512,
    big: float = 1e12,
) -> GreenValue:
    """G(z) = lim d^{-n} log |P^n(z)|, by iterate-until-escape.

    Satisfies G(P(z)) = d G(z) and G = log|z| + O(1) at infinity; for
    bounded orbits (no escape beyond ``big`` within n_max) the value is
    0 with escaped=False. The leading-coefficient correction
    log|a_d|/(d-1) makes the telescoped limit accurate once |iterate| >
    big.
    """
    d = P.degree
    if d < 2:
        raise ValueError("escape potential needs degree >= 2")
    lead = abs(complex(P.coeffs[-1]))
    w = complex(z)
    for n in range(n_max + 1):
        mag = abs(w)
        if mag > big:
            g = (math.log(mag) + math.log(lead) / (d - 1)) / d**n
            return GreenValue(g, True, n)
        w = P(w)
    return GreenValue(0.0, False, n_max)


# -- irrationally neutral fixed points ----------------------------------------


@dataclass(frozen=True)
class SiegelResult:
    """Linearization h with h(lambda z) = P(h(z)), h(0)=0, h'(0)=1.

    denominators[j-2] is |lambda^j - lambda| used for coefficient j; the
    inverse of the smallest one bounds the amplification the recursion
    saw.
    """

    series: PowerSeries
    multiplier: complex
    denominators: tuple
    denominators_min: float
    residual: float
    test_radius: float


def siegel_series(
    lam: complex,
    P: Polynomial,
    order: int,
    test_radius: float = 0.01,
) -> SiegelResult:
    """Exact coefficient recursion for the rotation conjugacy.

    Solves h(lambda z) = P(h(z)) order by order; each coefficient h_j
    divides by lambda^j - lambda, so the full small-denominator ledger
    is recorded. |lambda| must be 1 and lambda must not be a root of
    unity up to the truncation order.

    Raises
    ------
    SmallDenominator
        Some |lambda^j - lambda| fell below the hard floor 1e-14
        (resonance within the truncation).
    """
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-9:
        raise ValueError("rotation multiplier must have modulus 1")
    local = Polynomial(P.coeffs)
    if abs(complex(local.coeffs[0])) > 1e-12 or abs(complex(local.coeffs[1]) - lam) > 1e-9:
        raise ValueError("need P(0) = 0 and P'(0) = lambda")
    if order < 2:
        raise ValueError("order must be at least 2")

    n = order
    h = np.zeros(n + 1, dtype=np.complex128)
    h[1] = 1.0
    p_coeffs = local.coeffs
    denoms = []
    # powers[m] = (h^m truncated), refreshed incrementally per order.
    for j in range(2, n + 1):
        denom = lam**j - lam
        denoms.append(abs(denom))
        if abs(denom) < DENOMINATOR_FLOOR:
            raise SmallDenominator(
                f"|lambda^{j} - lambda| = {abs(denom):.3e} below floor"
            )
        hs = PowerSeries(h[: j + 1])
        rhs = 0j
        power = hs
        for m in range(2, min(j, local.degree) + 1):
            power = power * hs  # h^m truncated at order j
            rhs += p_coeffs[m] * power[j]
        h[j] = rhs / denom
    series = PowerSeries(h)

    def residual_at(r: float) -> float:
        return _residual_on_circle(
            lambda z: series(lam * z), lambda z: local(series(z)), r
        )

    res = residual_at(test_radius)
    return SiegelResult(
        series,
        lam,
        tuple(denoms),
        float(min(denoms)),
        res,
        test_radius,
    )


# -- rotation-number arithmetic ------------------------------------------------


@dataclass(frozen=True)
class DiophantineParams:
    """Lower-bound profile |lambda^n - 1| >= c / n^mu."""

    c: float
    mu: float
    n_max: int

    def __post_init__(self):
        if self.c <= 0 or self.mu <= 1 or self.n_max < 1:
            raise ValueError("need c > 0, mu > 1, n_max >= 1")


@dataclass(frozen=True)
class DiophantineReport:
    theta: float
    params: DiophantineParams
    margin: float
    worst_n: int
    passed: bool


def circle_distance(theta: float, n: int) -> float:
    """|e^{2 pi i n theta} - 1| = 2 |sin(pi n theta)|, computed stably."""
    frac = math.fmod(n * theta, 1.0)
    return 2.0 * abs(math.sin(math.pi * frac))


def diophantine_check(theta: float, params: DiophantineParams) -> DiophantineReport:
    """Scan n <= n_max for the minimum of |lambda^n - 1| n^mu.

    PASS when the minimum stays at or above c; the minimizing n is
    reported so failures point at the resonance.
    """
    worst = math.inf
    worst_n = 1
    for n in range(1, params.n_max + 1):
        val = circle_distance(theta, n) * n**params.mu
        if val < worst:
            worst = val
            worst_n = n
    return DiophantineReport(theta, params, worst, worst_n, worst >= params.c)


@dataclass(frozen=True)
class CremerCertificate:
    """One smallness certificate |lambda^{2^{q_l}} - 1| <= 4 pi 2^{q_l - q_{l+1}}."""

    ell: int
    power: int
    observed: float
    bound: float
    holds: bool
    growth_lhs_log10: float
    growth_rhs_log10: dict


@dataclass(frozen=True)
class CremerReport:
    theta: float
    exponents: tuple
    certificates: tuple


def cremer_theta(q: tuple, terms: int | None = None) -> CremerReport:
    """Rotation number theta = sum 2^{-q_k} with smallness certificates.

    For each ell below the last index the power lambda^{2^{q_ell}} is
    verified to sit within 4 pi 2^{q_ell - q_{ell+1}} of 1 (computed
    exactly in rational angle arithmetic). The growth comparison against
    (1/ell)^{d^{2^{q_ell}}} is reported in log10 form for d = 2..ell,
    since the raw right side underflows any float; no quantifier order
    is guessed.
    """
    q = tuple(int(v) for v in q)
    if terms is not None:
        q = q[:terms]
    if len(q) < 2 or any(b <= a for a, b in zip(q, q[1:])) or q[0] <= 1:
        raise ValueError("need strictly increasing exponents with q_1 > 1")
    theta_frac = sum(Fraction(1, 2**qk) for qk in q)
    theta = float(theta_frac)
    certs = []
    for ell in range(len(q) - 1):
        power = 2 ** q[ell]
        angle = theta_frac * power
        frac = angle - int(angle)  # exact fractional part
        observed = 2.0 * abs(math.sin(math.pi * float(frac)))
        bound = 4.0 * math.pi * 2.0 ** (q[ell] - q[ell + 1])
        lhs_log10 = math.log10(bound)
        rhs = {}
        # Growth comparison target (1/ell)^(d^power), 1-based ell; the raw
        # value underflows, so report -log10(rhs) = d^power * log10(ell)
        # through its own log10. d only ranges when ell >= 2.
        ell_1based = ell + 1
        for d in range(2, ell_1based + 1):
            exponent_log10 = power * math.log10(d)
            rhs[d] = {
                "exponent_log10": exponent_log10,
                "neg_log10_rhs_log10": exponent_log10
                + math.log10(math.log10(ell_1based)),
            }
        certs.append(
            CremerCertificate(
                ell + 1,
                power,
                observed,
                bound,
                observed <= bound + 1e-15,
                lhs_log10,
                rhs,
            )
        )
    return CremerReport(theta, q, tuple(certs))


def siegel_radius_bound(lam: complex, d: int, n_max: int) -> float:
    """Upper bound min_n |lambda^n - 1|^{1/(d^n - 1)} on any
    linearization radius in the normalized gauge.

    Degenerates to 0 at a resonance (a gap below the 1e-14 floor, i.e.
    lambda a root of unity within n_max up to rounding); tends to 1 for
    strongly diophantine rotation numbers.
    """
    if d < 2 or n_max < 1:
        raise ValueError("need d >= 2 and n_max >= 1")
    lam = complex(lam)
    log_r = 0.0
    for n in range(1, n_max + 1):
        gap = abs(lam**n - 1.0)
        if gap <= DENOMINATOR_FLOOR:
            return 0.0
        denom = float(d) ** n - 1.0
        if not math.isfinite(denom):
            continue  # exponent 1/(d^n - 1) -> 0, bound -> 1, never binding
        log_r = min(log_r, math.log(gap) / denom)
    return math.exp(log_r)


# -- plan-size recursion for the fast-convergence scheme ----------------------


@dataclass(frozen=True)
class KamSchedule:
    """Radii, shrink factors and defect sizes of the iteration plan.

    valid[n] records the admissibility conditions at step n
    (0 < eta < 1/5, c0 delta < eta^(mu+2), delta < eta). When every flag
    holds the radii converge to a positive limit, since the eta_n halve.
    """

    r: tuple
    eta: tuple
    delta: tuple
    valid: tuple
    r_limit_ratio: float
    all_valid: bool


def kam_schedule(
    eta0: float,
    delta0: float,
    c0: float,
    mu: float,
    steps: int,
    r0: float = 1.0,
) -> KamSchedule:
    """Run the shrink/defect recurrences for ``steps`` steps.

    r_{n+1} = r_n (1 - 5 eta_n), eta_{n+1} = eta_n / 2,
    delta_{n+1} = c0 delta_n^2 eta_n^(-mu-2) 2^(-mu-2). Invalid steps
    are flagged, not fatal.
    """
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    rs, etas, deltas, valid = [float(r0)], [float(eta0)], [float(delta0)], []
    for n in range(steps):
        eta, delta = etas[n], deltas[n]
        ok = (0.0 < eta < 0.2) and (c0 * delta < eta ** (mu + 2)) and (delta < eta)
        valid.append(bool(ok))
        rs.append(rs[n] * (1.0 - 5.0 * eta))
        etas.append(eta / 2.0)
        deltas.append(c0 * delta**2 * eta ** (-mu - 2) * 2.0 ** (-mu - 2))
    ratio = rs[-1] / r0
    return KamSchedule(
        tuple(rs), tuple(etas), tuple(deltas), tuple(valid), ratio, all(valid)
    )


# -- parabolic petals ----------------------------------------------------------


@dataclass(frozen=True)
class PetalReport:
    """Verified attracting petal at a multiplier-one fixed point.

    The disc |z + eps| < eps (in the normalized coordinate) maps into
    the closed disc |z + eps_prime| <= eps_prime with eps_prime <= eps.
    fatou_defects samples |Q(w) - (w + 1)| for the conjugated map
    Q(w) = -1/P(-1/w) at growing Re w. For order k >= 2 the report
    describes the petal of the sector-substituted map in w = z^k.
    """

    k: int
    eps: float
    eps_prime: float
    boundary_ok: bool
    normalization_scale: complex
    fatou_defects: tuple
    iterate_steps: int | None
    iterate_final: float | None
    substituted_coeffs: tuple | None = None


def _petal_boundary_check(P1: Polynomial, eps: float, samples: int):
    thetas = 2.0 * np.pi * np.arange(samples) / samples
    zs = -eps + eps * np.exp(1j * thetas)
    ws = np.array([P1(complex(z)) for z in zs])
    inside = np.abs(ws + eps) <= eps * (1.0 + 1e-12)
    re = ws.real
    with np.errstate(divide="ignore", invalid="ignore"):
        needed = np.where(
            np.abs(ws) == 0.0, 0.0, (np.abs(ws) ** 2) / (-2.0 * re)
        )
    feasible = bool(inside.all()) and bool((re <= 0).all())
    eps_prime = float(np.max(needed)) if feasible else math.inf
    return feasible, eps_prime


def parabolic_petal(
    P: Polynomial,
    k: int = 1,
    eps: float | None = None,
    samples: int = 360,
    iterate_tol: float = 1e-6,
    max_steps: int = 2_000_000,
) -> PetalReport:
    """Attracting petal for P = z + a z^{k+1} + ... at the origin.

    k = 1: the map is rescaled so a = 1 and a disc |z + eps| < eps with
    P(disc) inside itself is verified by boundary sampling (eps found by
    geometric search when not supplied). Convergence of the iterates of
    -eps to 0 is verified directly; note the orbit decays like -1/n, so
    reaching 1e-6 takes on the order of 1e6 steps.

    k >= 2: the substitution w = z^k (valid on a sector) must turn the
    map into w + k a w^2 + ...; the substituted coefficients are checked
    and the k = 1 machinery runs on the substituted map.

    Raises
    ------
    NotTangentToIdentity
        P'(0) differs from 1 beyond 1e-10.
    WrongOrder
        Leading nonlinearity inconsistent with k, or the substitution
        leaves non-multiple-of-k powers.
    """
    c = P.coeffs
    if abs(c[0]) > 1e-12 or abs(c[1] - 1.0) > 1e-10:
        raise NotTangentToIdentity("need P(0) = 0 and P'(0) = 1")
    lead_idx = next((j for j in range(2, c.size) if abs(c[j]) > 1e-12), None)
    if lead_idx is None or lead_idx != k + 1:
        raise WrongOrder(
            f"leading nonlinearity at order {lead_idx}, expected {k + 1}"
        )
    a = complex(c[k + 1])

    substituted = None
    if k == 1:
        # Conjugate by z -> a z; coefficient k picks up a^(1-k) and the
        # quadratic term becomes 1.
        ks = np.arange(c.size)
        p1 = Polynomial(c * a ** (1 - ks))
        scale = a
    else:
        powered = _poly_power(P, k)
        pc = powered.coeffs
        wc = np.zeros(pc.size // k + 2, dtype=np.complex128)
        tol = 1e-10 * float(np.max(np.abs(pc)))
        for j, coeff in enumerate(pc):
            if abs(coeff) <= tol:
                continue
            if j % k != 0:
                raise WrongOrder(
                    f"substitution w = z^{k} leaves a z^{j} term of size {abs(coeff):.3e}"
                )
            wc[j // k] = coeff
        wpoly = Polynomial(wc)
        substituted = tuple(complex(v) for v in wpoly.coeffs)
        b = complex(wpoly.coeffs[2])  # equals k a, tangent to identity in w
        ks = np.arange(wpoly.coeffs.size)
        p1 = Polynomial(wpoly.coeffs * b ** (1 - ks))
        scale = b

    if eps is None:
        eps_try = 0.25
        for _ in range(40):
            ok, _ = _petal_boundary_check(p1, eps_try, samples)
            if ok:
                break
            eps_try *= 0.5
        eps = eps_try
    boundary_ok, eps_prime = _petal_boundary_check(p1, eps, samples)

    defects = []
    for w in (1e2, 1e3, 1e4):
        q = -1.0 / p1(complex(-1.0 / w))
        defects.append((float(w), abs(q - w - 1.0)))

    steps = None
    final = None
    if boundary_ok:
        z = complex(-eps)
        for n in range(1, max_steps + 1):
            z = p1(z)
            if abs(z) < iterate_tol:
                steps = n
                break
        final = abs(z)
    return PetalReport(
        k,
        float(eps),
        eps_prime,
        boundary_ok,
        scale,
        tuple(defects),
        steps,
        final,
        substituted,
    )


def _poly_power(P: Polynomial, k: int) -> Polynomial:
    acc = np.array([1.0 + 0j])
    for _ in range(k):
        acc = np.convolve(acc, P.coeffs)
    return Polynomial(acc)
