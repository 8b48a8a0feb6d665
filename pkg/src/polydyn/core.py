"""Complex polynomials, affine conjugation, and iteration with escape.

Values are immutable after construction and every operation is pure, so
everything here is safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegreeCapExceeded, PolynomialParseError

#: Hard cap on coefficient counts produced by symbolic composition.
DEGREE_CAP = 4096


class SpherePoint:
    """A point of the Riemann sphere: a finite complex value or infinity.

    Infinity is a first-class point here (it is a superattracting fixed
    point of every polynomial of degree >= 2), never an encoded NaN.
    Use ``SpherePoint(z)`` for finite points and the module constant
    ``INFINITY`` for the point at infinity.
    """

    __slots__ = ("_value",)

    def __init__(self, value=None):
        if value is not None:
            value = complex(value)
            if not (np.isfinite(value.real) and np.isfinite(value.imag)):
                raise ValueError("finite sphere point must have finite parts")
        self._value = value

    @property
    def is_infinity(self) -> bool:
        return self._value is None

    @property
    def value(self) -> complex:
        if self._value is None:
            raise ValueError("the point at infinity has no complex value")
        return self._value

    def __eq__(self, other):
        if isinstance(other, SpherePoint):
            return self._value == other._value
        if isinstance(other, (int, float, complex)):
            return self._value is not None and self._value == complex(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._value)

    def __repr__(self):
        if self._value is None:
            return "SpherePoint(infinity)"
        return f"SpherePoint({self._value!r})"


#: The point at infinity.
INFINITY = SpherePoint()


@dataclass(frozen=True)
class AffineMap:
    """Invertible affine map w = a*z + b of the plane."""

    a: complex
    b: complex = 0j

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("affine map must be invertible (a != 0)")
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    def __call__(self, z: complex) -> complex:
        return self.a * z + self.b

    def inverse(self) -> "AffineMap":
        return AffineMap(1.0 / self.a, -self.b / self.a)

    @staticmethod
    def identity() -> "AffineMap":
        return AffineMap(1.0, 0.0)


_MINUS_VARIANTS = str.maketrans({"−": "-", "–": "-"})


def _parse_complex(text: str) -> complex:
    """Parse one coefficient: RE or RE+IMi / RE-IMi (also bare IMi)."""
    cleaned = text.strip().translate(_MINUS_VARIANTS).replace(" ", "")
    if not cleaned:
        raise PolynomialParseError("empty coefficient")
    try:
        value = complex(cleaned.replace("i", "j").replace("I", "j"))
    except ValueError as exc:
        raise PolynomialParseError(f"bad coefficient {text!r}") from exc
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise PolynomialParseError(f"non-finite coefficient {text!r}")
    return value


def _format_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_complex(z: complex) -> str:
    """Inverse of the coefficient text format: RE or RE+IMi."""
    z = complex(z)
    if z.imag == 0:
        return _format_real(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{_format_real(z.real)}{sign}{_format_real(abs(z.imag))}i"


class Polynomial:
    """Complex polynomial stored as ascending coefficients a_0 .. a_d.

    Trailing zero coefficients are trimmed, so the leading coefficient is
    nonzero and ``degree == len(coeffs) - 1``. Degree 2 or more is
    required for dynamical use; degree >= 0 objects are allowed so that
    derived polynomials (derivatives, differences) can be represented.

    Parameters
    ----------
    coeffs : sequence of complex
        Coefficients in ascending order, constant term first.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coefficients must be a nonempty 1-d sequence")
        if not np.isfinite(arr.view(float)).all():
            raise ValueError("coefficients must be finite")
        last = arr.size - 1
        while last > 0 and arr[last] == 0:
            last -= 1
        arr = arr[: last + 1].copy()
        arr.setflags(write=False)
        self._coeffs = arr

    # -- basic accessors -------------------------------------------------

    @property
    def coeffs(self) -> np.ndarray:
        """Read-only ascending coefficient array."""
        return self._coeffs

    @property
    def degree(self) -> int:
        return self._coeffs.size - 1

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._coeffs.shape == other._coeffs.shape and bool(
            (self._coeffs == other._coeffs).all()
        )

    def __hash__(self):
        return hash(tuple(self._coeffs.tolist()))

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"

    # -- text format -----------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "Polynomial":
        """Parse the comma-separated ascending coefficient format.

        Example: ``"-1,0,1"`` is z^2 - 1 and ``"0,0.5+0.1i,1"`` is
        z^2 + (0.5+0.1i) z.
        """
        parts = text.split(",")
        if not parts or not text.strip():
            raise PolynomialParseError("empty polynomial text")
        return cls([_parse_complex(p) for p in parts])

    def to_text(self) -> str:
        return ",".join(format_complex(c) for c in self._coeffs)

    # -- evaluation and calculus -----------------------------------------

    def __call__(self, z):
        """Evaluate by Horner's scheme; exact for degree 0.

        Accepts a scalar (returns complex) or an array (returns array).
        """
        if np.isscalar(z) or isinstance(z, complex):
            out = self._coeffs[-1]
            for k in range(self._coeffs.size - 2, -1, -1):
                out = out * z + self._coeffs[k]
            return complex(out)
        return kernels.horner_many(self._coeffs, z)

    def derivative(self) -> "Polynomial":
        """Coefficient sequence k*a_k shifted down one slot."""
        if self.degree == 0:
            return Polynomial([0.0])
        ks = np.arange(1, self._coeffs.size)
        return Polynomial(self._coeffs[1:] * ks)

    def compose(self, inner: "Polynomial", cap: int = DEGREE_CAP) -> "Polynomial":
        """Coefficients of self(inner(z)); degree multiplies.

        Raises DegreeCapExceeded when the result would carry more than
        ``cap + 1`` coefficients: iteration should prefer repeated
        evaluation over symbolic composition except for small orders.
        """
        out_degree = self.degree * inner.degree
        if out_degree > cap:
            raise DegreeCapExceeded(
                f"composition degree {out_degree} exceeds cap {cap}"
            )
        acc = np.array([self._coeffs[-1]], dtype=np.complex128)
        q = inner._coeffs
        for k in range(self._coeffs.size - 2, -1, -1):
            acc = np.convolve(acc, q)
            acc[0] += self._coeffs[k]
        return Polynomial(acc)

    def iterate_poly(self, m: int, cap: int = DEGREE_CAP) -> "Polynomial":
        """Symbolic m-th iterate; degree d^m, guarded by the cap."""
        if m < 0:
            raise ValueError("iterate order must be nonnegative")
        result = Polynomial([0.0, 1.0])
        for _ in range(m):
            result = self.compose(result, cap=cap)
        return result

    # -- dynamics helpers --------------------------------------------------

    def escape_radius(self) -> float:
        """Radius R with |z| > R implying |P(z)| >= 2|z|.

        Concretely R = max(1, (2 + sum_{k<d} |a_k|) / |a_d|); beyond it
        orbits tend to infinity.
        """
        if self.degree < 2:
            raise ValueError("escape radius needs degree >= 2")
        others = np.abs(self._coeffs[:-1]).sum()
        return float(max(1.0, (2.0 + others) / abs(self._coeffs[-1])))

    def iterate(self, z, n: int, radius: float | None = None) -> SpherePoint:
        """n-th forward iterate as a sphere point.

        Returns Infinity as soon as any iterate exceeds the escape
        radius in modulus (legitimate: beyond it orbits tend to
        infinity); otherwise the finite value P^n(z).
        """
        if n < 0:
            raise ValueError("iteration count must be nonnegative")
        if radius is None:
            radius = self.escape_radius()
        values, steps = kernels.iterate_escape(
            self._coeffs, np.array([complex(z)]), int(n), float(radius)
        )
        if steps[0] >= 0:
            return INFINITY
        return SpherePoint(values[0])

    def iterate_many(self, zs, n: int, radius: float | None = None):
        """Vector version of :meth:`iterate`; returns (values, escaped)."""
        if radius is None:
            radius = self.escape_radius()
        values, steps = kernels.iterate_escape(
            self._coeffs, np.asarray(zs, dtype=np.complex128), int(n), float(radius)
        )
        return values, steps >= 0

    def conjugate(self, phi: AffineMap, cap: int = DEGREE_CAP) -> "Polynomial":
        """The conjugate Q = phi o P o phi^{-1}.

        Q satisfies Q(phi(z)) = phi(P(z)) coefficientwise up to rounding,
        and multipliers at corresponding periodic points are preserved.
        """
        inv = phi.inverse()
        inner = Polynomial([inv.b, inv.a])  # phi^{-1} as a degree-1 polynomial
        comp = self.compose(inner, cap=cap)
        out = comp._coeffs * phi.a
        out = out.copy()
        out[0] += phi.b
        return Polynomial(out)

    def critical_points(self) -> np.ndarray:
        """Finite critical points (roots of P'), with multiplicity."""
        from .roots import all_roots  # local import: roots builds on core

        dp = self.derivative()
        if dp.degree == 0:
            return np.empty(0, dtype=np.complex128)
        return np.asarray(all_roots(dp).roots, dtype=np.complex128)


def monicize_scale(lead: complex, p: int) -> complex:
    """Principal scaling constant c with c^(p-1) = lead.

    One of p-1 valid gauges; the principal root is the documented choice.
    """
    if p < 2:
        raise ValueError("monicization needs local degree >= 2")
    return complex(lead) ** (1.0 / (p - 1))


_WHITESPACE_RE = re.compile(r"\s+")


def parse_point(text: str) -> complex:
    """Parse a single complex point in the coefficient text format."""
    return _parse_complex(_WHITESPACE_RE.sub("", text))
