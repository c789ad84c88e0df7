"""
Geometry of the upper half-plane.

This module provides:
- HPoint: a point of the open upper half-plane
- ExtendedReal: a non-negative-or-finite real that may be +infinity
- Pseudo-hyperbolic and hyperbolic distances on the half-plane
- The Cayley transfer to the unit disk used for cross-checks
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .const import ATANH_SWITCH, MIN_IMAG, RHO_CEILING
from .exceptions import OutsideHalfPlaneError


@dataclass(frozen=True, slots=True)
class HPoint:
    """
    A point z = x + iy with y > 0.

    Attributes
    ----------
    x : float
        Real part of the point.
    y : float
        Imaginary part of the point, strictly positive.

    """

    x: float
    y: float

    def __post_init__(self) -> None:
        """Reject points outside the open upper half-plane."""
        if not (math.isfinite(self.x) and math.isfinite(self.y)) or self.y < MIN_IMAG:
            raise OutsideHalfPlaneError(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> HPoint:
        """Create a point from a complex number."""
        return cls(float(z.real), float(z.imag))

    @property
    def z(self) -> complex:
        """Return the point as a complex number."""
        return complex(self.x, self.y)

    @property
    def arg(self) -> float:
        """Return arg z, which lies in (0, pi)."""
        return math.atan2(self.y, self.x)

    def __complex__(self) -> complex:
        """Return the point as a complex number."""
        return self.z

    def __str__(self) -> str:
        """Return a compact representation."""
        return f"{self.x!r}{self.y:+}i"


@dataclass(frozen=True, slots=True)
class ExtendedReal:
    """A finite real or positive infinity; NaN is never stored."""

    value: float

    def __post_init__(self) -> None:
        """Reject NaN and negative infinity."""
        if math.isnan(self.value) or self.value == -math.inf:
            msg = f"ExtendedReal cannot hold {self.value!r}"
            raise ValueError(msg)

    @classmethod
    def finite(cls, value: float) -> ExtendedReal:
        """Create a finite value."""
        if not math.isfinite(value):
            msg = f"Finite value expected, got {value!r}"
            raise ValueError(msg)
        return cls(float(value))

    @classmethod
    def infinity(cls) -> ExtendedReal:
        """Create positive infinity."""
        return cls(math.inf)

    @property
    def is_finite(self) -> bool:
        """Return True unless the value is positive infinity."""
        return math.isfinite(self.value)

    def __float__(self) -> float:
        """Return the value, math.inf for positive infinity."""
        return self.value

    def __str__(self) -> str:
        """Return "inf" or the finite value."""
        return repr(self.value) if self.is_finite else "inf"


def pseudo_hyperbolic(z: HPoint, w: HPoint) -> float:
    """Return |z - w| / |z - conj(w)|, kept below 1 for distinct points."""
    rho = abs(z.z - w.z) / abs(z.z - w.z.conjugate())
    return min(rho, RHO_CEILING)


def hyperbolic_distance(z: HPoint, w: HPoint) -> float:
    """
    Return arctanh of the pseudo-hyperbolic distance.

    Far apart points use the form log((|z - conj w| + |z - w|) / (2 sqrt(y_z y_w))),
    which stays finite where the pseudo-hyperbolic distance rounds to 1.
    """
    rho = pseudo_hyperbolic(z, w)
    if rho < ATANH_SWITCH:
        return math.atanh(rho)
    spread = abs(z.z - w.z.conjugate()) + abs(z.z - w.z)
    return math.log(spread) - 0.5 * (math.log(z.y) + math.log(w.y)) - math.log(2.0)


def cayley_to_disk(z: HPoint) -> complex:
    """Map z to the unit disk by (z - i) / (z + i)."""
    return (z.z - 1j) / (z.z + 1j)


def disk_pseudo_hyperbolic(a: complex, b: complex) -> float:
    """Return |a - b| / |1 - conj(a) b| for points of the unit disk."""
    return abs(a - b) / abs(1 - a.conjugate() * b)


def consecutive_pseudo_hyperbolic(zs: np.ndarray) -> np.ndarray:
    """Return rho(z[n+1], z[n]) for a complex array of half-plane points."""
    head, tail = zs[:-1], zs[1:]
    return np.minimum(np.abs(tail - head) / np.abs(tail - np.conj(head)), RHO_CEILING)
