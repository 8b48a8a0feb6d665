"""Numerical one-dimensional complex dynamics.

Polynomial iteration and periodic-orbit classification, equilibrium
measures by preimage trees and stochastic backward orbits, linearizing
conjugacies at fixed points, and hyperbolic-geometry checks on the unit
disc, all with machine-checkable residuals and reproducible sampling.
"""

from .core import AffineMap, INFINITY, Polynomial, SpherePoint
from .kernels import BACKEND as KERNEL_BACKEND
from .linearize import PowerSeries
from .measure import EmpiricalMeasure, TestFunction
from .orbits import Classification, OrbitKind, PeriodicOrbit
from .roots import RootSet, all_roots, cluster, preimages

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "Classification",
    "EmpiricalMeasure",
    "INFINITY",
    "KERNEL_BACKEND",
    "OrbitKind",
    "PeriodicOrbit",
    "Polynomial",
    "PowerSeries",
    "RootSet",
    "SpherePoint",
    "TestFunction",
    "all_roots",
    "cluster",
    "preimages",
    "__version__",
]
