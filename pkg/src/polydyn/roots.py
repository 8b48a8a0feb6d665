"""Simultaneous root-finding and preimage solving.

The numerical kernel behind periodic points and pullback measures: an
Aberth-Ehrlich simultaneous iteration from circular starting guesses,
self-contained (no linear-algebra dependency), plus multiplicity
detection by clustering. Pure operations; concurrent calls are safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Polynomial
from .errors import NonConvergence

DEFAULT_TOL = 1e-14
DEFAULT_MAX_ITER = 300


@dataclass(frozen=True)
class RootSet:
    """Roots with multiplicities and residuals |P(root)|.

    Multiplicities always sum to the degree of the solved polynomial.
    """

    roots: tuple
    multiplicities: tuple
    residuals: tuple

    def __post_init__(self):
        if not (len(self.roots) == len(self.multiplicities) == len(self.residuals)):
            raise ValueError("parallel sequences must have equal length")

    @property
    def total(self) -> int:
        return int(sum(self.multiplicities))

    def expanded(self) -> np.ndarray:
        """Roots repeated by multiplicity, as an array."""
        return np.repeat(
            np.asarray(self.roots, dtype=np.complex128),
            np.asarray(self.multiplicities, dtype=int),
        )

    def __iter__(self):
        return iter(zip(self.roots, self.multiplicities, self.residuals))


def _sorted_rootset(roots, mults, resids) -> RootSet:
    order = np.lexsort((np.imag(roots), np.real(roots)))
    return RootSet(
        tuple(complex(roots[i]) for i in order),
        tuple(int(mults[i]) for i in order),
        tuple(float(resids[i]) for i in order),
    )


def all_roots(
    P: Polynomial,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RootSet:
    """All d roots of P, each reported with multiplicity 1.

    Residual contract: |P(root)| < tol * scale with scale the largest
    coefficient magnitude. Use :func:`cluster` (or :func:`preimages`)
    when coincident roots should be merged into multiplicities.

    Raises
    ------
    NonConvergence
        After max_iter sweeps some residual still exceeds the target;
        best roots and residuals ride along on the exception.
    ValueError
        Degree-zero input has no roots to report.
    """
    if P.degree == 0:
        raise ValueError("degree-zero polynomial has no roots")
    roots, resid, ok = kernels.aberth_batch(
        P.coeffs, np.zeros(1, dtype=np.complex128), tol, max_iter
    )
    if not ok[0]:
        raise NonConvergence(
            f"root iteration did not reach {tol:g}*scale in {max_iter} sweeps",
            roots=roots[0],
            residuals=resid[0],
        )
    d = P.degree
    return _sorted_rootset(roots[0], np.ones(d, int), resid[0])


def cluster(rootset: RootSet, eps: float) -> RootSet:
    """Merge roots within eps of each other (transitive closure).

    Groups are connected components of the "within eps" graph; each
    component becomes its multiplicity-weighted centroid with the
    multiplicities summed and the worst member residual retained.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    pts = np.asarray(rootset.roots, dtype=np.complex128)
    n = pts.size
    if n <= 1:
        return rootset
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = np.argsort(pts.real, kind="stable")
    for a in range(n):
        i = order[a]
        for b in range(a + 1, n):
            j = order[b]
            if pts[j].real - pts[i].real > eps:
                break
            if abs(pts[i] - pts[j]) <= eps:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    mults = np.asarray(rootset.multiplicities, dtype=float)
    resid = np.asarray(rootset.residuals, dtype=float)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out_roots, out_mults, out_resid = [], [], []
    for members in groups.values():
        idx = np.array(members)
        w = mults[idx]
        out_roots.append(complex((pts[idx] * w).sum() / w.sum()))
        out_mults.append(int(w.sum()))
        out_resid.append(float(resid[idx].max()))
    return _sorted_rootset(
        np.array(out_roots), np.array(out_mults), np.array(out_resid)
    )


def preimage_eps(w: complex) -> float:
    """Default clustering width for preimages of w: 1e-6 * (1 + |w|).

    Multiplicity only matters near critical values; the threshold is
    scale-aware so large targets do not fragment.
    """
    return 1e-6 * (1.0 + abs(w))


def preimages(
    P: Polynomial,
    w: complex,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    eps: float | None = None,
) -> RootSet:
    """The d solutions of P(z) = w, counted with multiplicity.

    Coincident solutions are merged by :func:`cluster` with the
    scale-aware default width, so critical values show up as
    multiplicities. Multiplicities always sum to d.
    """
    shifted = P.coeffs.copy()
    shifted[0] -= w
    raw = all_roots(Polynomial(shifted), tol=tol, max_iter=max_iter)
    return cluster(raw, preimage_eps(w) if eps is None else eps)


def preimages_batch(
    P: Polynomial,
    ws,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> np.ndarray:
    """Raw preimages of many targets at once, shape (len(ws), d).

    Rows are unclustered: coincident roots simply repeat, which is the
    multiplicity-correct weighting for measure pullbacks and sampling.
    """
    ws = np.asarray(ws, dtype=np.complex128)
    roots, resid, ok = kernels.aberth_batch(P.coeffs, ws, tol, max_iter)
    if not ok.all():
        bad = int(np.argmin(ok))
        raise NonConvergence(
            f"preimage solve failed for target {ws[bad]!r}",
            roots=roots[bad],
            residuals=resid[bad],
        )
    return roots
