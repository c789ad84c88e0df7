"""
Parabolic self-maps of the upper half-plane in Herglotz form.

f(z) = z + beta + integral of (1 + t z) / (t - z) dmu(t)

The integral is evaluated per component: atoms exactly, densities by
adaptive quadrature with a tangent substitution centred on the pole, atom
trains by an explicit head plus a corrected tail integral.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import brentq

from .const import (
    ABSCISSA_LIMIT,
    ABSCISSA_XTOL,
    DEFAULT_EPS_BETA,
    DEFAULT_EVAL_TOL,
    EVAL_RTOL_FLOOR,
    TRAIN_POLE_PAD,
    TRAIN_SMOOTH_WIDTH,
    Region,
)
from .exceptions import IdentityMapError, NotHalfLineError, NotL1Error, SearchFailureError
from .halfplane import HPoint
from .measure import (
    DENSITY_BREAKPOINTS,
    Atom,
    AtomTrain,
    Component,
    DensityComponent,
    IntegrabilityProfile,
    MeasureSpec,
    head_length,
    integrability_profile,
    moment,
    reflect,
)
from .quadrature import ZERO, QuadResult, integrate_line, sum_series

if TYPE_CHECKING:
    from collections.abc import Callable

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class ParabolicMap:
    """
    The map z -> z + beta + integral (1 + t z) / (t - z) dmu(t).

    Attributes
    ----------
    beta : float
        Real translation part.
    mu : MeasureSpec
        Finite positive measure; beta = 0 together with mu = 0 is the
        identity and is rejected.

    """

    beta: float
    mu: MeasureSpec

    def __post_init__(self) -> None:
        """Reject the identity and non-finite beta."""
        if not math.isfinite(self.beta):
            msg = f"beta must be finite, got {self.beta!r}"
            raise ValueError(msg)
        if self.beta == 0 and self.mu.is_zero:
            raise IdentityMapError

    @property
    def profile(self) -> IntegrabilityProfile:
        """Return the integrability profile of mu."""
        return integrability_profile(self.mu)

    def evaluate(self, z: HPoint, tol: float = DEFAULT_EVAL_TOL) -> HPoint:
        """Return f(z)."""
        return evaluate(self, z, tol)

    def image(self, z: HPoint, tol: float = DEFAULT_EVAL_TOL) -> complex:
        """Return f(z) as a complex number, which may be non-finite."""
        return image(self, z, tol)

    def reflected(self) -> ParabolicMap:
        """Return z -> -conj(f(-conj(z))), the map with -beta and reflected mu."""
        return ParabolicMap(-self.beta, reflect(self.mu))


@dataclass(frozen=True, slots=True)
class EvalResult:
    """An integral value with an absolute error bound."""

    value: complex
    error_bound: float


def _complex_kernel(z: complex) -> Callable[[np.ndarray], np.ndarray]:
    x, y = z.real, z.imag

    def kernel(ts: np.ndarray) -> np.ndarray:
        shifted = ts - x
        denominator = shifted * shifted + y * y
        real = ((1.0 + ts * x) * shifted - ts * y * y) / denominator
        # imaginary part kept as a sum of positive terms
        imag = y * (1.0 + ts * ts) / denominator
        return real + 1j * imag

    return kernel


def _real_kernel(x: float) -> Callable[[np.ndarray], np.ndarray]:
    def kernel(ts: np.ndarray) -> np.ndarray:
        return (1.0 + ts * x) / (ts - x)

    return kernel


def _density_integral(
    density: DensityComponent,
    kernel: Callable[[np.ndarray], np.ndarray],
    x: float,
    y: float,
    atol: float,
) -> QuadResult:
    lower, upper = density.support
    center = min(max(x, lower), upper)
    scale = max(y, abs(x - center))
    points = {*DENSITY_BREAKPOINTS, lower, upper, x}
    if y > 0:
        points |= {x - y, x + y}
    inside = sorted(p for p in points if lower < p < upper)

    def integrand(ts: np.ndarray) -> np.ndarray:
        return density.density(ts) * kernel(ts)

    return integrate_line(
        integrand,
        lower,
        upper,
        center=center,
        scale=scale,
        points=inside,
        atol=atol,
        rtol=EVAL_RTOL_FLOOR,
        decay_pos=density.tail_pos,
        decay_neg=density.tail_neg,
    )


def _train_integral(
    train: AtomTrain,
    kernel: Callable[[np.ndarray], np.ndarray],
    x: float,
    y: float,
    atol: float,
) -> QuadResult:
    result = ZERO
    width = y / abs(train.step)
    for side in train.sides:

        def head(n: int, side: float = side) -> np.ndarray:
            positions, weights = train.nodes(n)
            return weights * kernel(side * positions)

        if train.count is not None:
            values = head(train.count)
            result += QuadResult(complex(values.sum()), 0.0, train.count)
            continue

        def term(ks: np.ndarray, side: float = side) -> np.ndarray:
            return train.weights(ks) * kernel(side * train.positions(ks))

        # real index where side * t_k meets Re z
        pole = (side * x - train.t0) / train.step
        minimum = 0.0
        points: list[float] = []
        if pole >= 0:
            if width < TRAIN_SMOOTH_WIDTH:
                minimum = pole + TRAIN_POLE_PAD * max(1.0, width)
            else:
                points = [pole - width, pole, pole + width]
        terms = head_length(minimum)
        _LOGGER.debug("Train side %+.0f: pole index %.3g, head %d", side, pole, terms)
        result += sum_series(
            head,
            term,
            terms=terms,
            atol=atol / len(train.sides),
            rtol=EVAL_RTOL_FLOOR,
            points=points,
            decay=train.decay,
        )
    return result


def _component_integral(
    component: Component,
    kernel: Callable[[np.ndarray], np.ndarray],
    x: float,
    y: float,
    atol: float,
) -> QuadResult:
    match component:
        case Atom(t=t, w=w):
            return QuadResult(complex(w * kernel(np.array([t]))[0]), 0.0, 1)
        case AtomTrain():
            return _train_integral(component, kernel, x, y, atol)
        case DensityComponent():
            return _density_integral(component, kernel, x, y, atol)
    msg = f"Unknown component {component!r}"
    raise TypeError(msg)


def _measure_integral(
    m: MeasureSpec,
    kernel: Callable[[np.ndarray], np.ndarray],
    x: float,
    y: float,
    tol: float,
) -> QuadResult:
    if tol <= 0:
        msg = f"Tolerance must be positive, got {tol}"
        raise ValueError(msg)
    share = tol / max(1, sum(not isinstance(c, Atom) for c in m.components))
    result = ZERO
    for component in m.components:
        result += _component_integral(component, kernel, x, y, share)
    return result


def herglotz_integral(m: MeasureSpec, z: HPoint, tol: float = DEFAULT_EVAL_TOL) -> EvalResult:
    """
    Return the integral of (1 + t z) / (t - z) dmu(t) at a point of the half-plane.

    The absolute error bound is at most tol, or a relative 1e-13 of the value
    when that is larger. Raises QuadratureFailureError when the evaluation
    budget cannot meet the target.
    """
    result = _measure_integral(m, _complex_kernel(z.z), z.x, z.y, tol)
    return EvalResult(complex(result.value), result.error)


def image(f: ParabolicMap, z: HPoint, tol: float = DEFAULT_EVAL_TOL) -> complex:
    """Return f(z) without checking that it is representable."""
    if f.mu.is_zero:
        return complex(z.x + f.beta, z.y)
    integral = herglotz_integral(f.mu, z, tol).value
    return complex(z.x + f.beta + integral.real, z.y + max(integral.imag, 0.0))


def evaluate(f: ParabolicMap, z: HPoint, tol: float = DEFAULT_EVAL_TOL) -> HPoint:
    """Return f(z); its imaginary part is never below Im z."""
    return HPoint.from_complex(image(f, z, tol))


def tilde_beta(f: ParabolicMap) -> float:
    """Return beta minus the first moment of mu; needs t in L1(mu)."""
    profile = f.profile
    if not profile.t_l1:
        raise NotL1Error
    return f.beta - profile.moment1


def _half_line_bound(f: ParabolicMap) -> float:
    upper = f.profile.support_upper
    if f.mu.is_zero or upper is None:
        raise NotHalfLineError
    return upper


def real_trace_eval(f: ParabolicMap, x: float, tol: float = DEFAULT_EVAL_TOL) -> float:
    """
    Evaluate the extension of f to the real axis right of the support of mu.

    Parameters
    ----------
    f : ParabolicMap
        A map whose measure is supported in (-inf, a].
    x : float
        Abscissa with x > a.
    tol : float
        Absolute error target of the integral.

    Returns
    -------
    float
        x + beta + p(x), where p(x) = integral (1 + t x) / (t - x) dmu(t)
        is increasing in x.

    """
    upper = _half_line_bound(f)
    if not x > upper:
        msg = f"x={x!r} must lie right of the support bound {upper!r}"
        raise ValueError(msg)
    trace = _measure_integral(f.mu, _real_kernel(x), x, 0.0, tol)
    return x + f.beta + float(np.real(trace.value))


def find_invariant_abscissa(f: ParabolicMap, margin: float) -> float:
    """
    Return b right of the support with p(b) + beta >= margin.

    Then f maps (b, inf) into itself. The search doubles the offset from the
    support bound until the condition holds, brackets the crossing, refines
    it with Brent's method and finally steps right of the root.
    """
    if not margin > 0:
        msg = f"Margin must be positive, got {margin!r}"
        raise ValueError(msg)
    upper = _half_line_bound(f)

    def excess(b: float) -> float:
        return real_trace_eval(f, b) - b - margin

    offset = 1.0
    if excess(upper + offset) >= 0:
        # shrink toward the support while the condition still holds
        for _ in range(64):
            if excess(upper + offset / 2) < 0:
                break
            offset /= 2
        else:
            return upper + offset
        low, high = upper + offset / 2, upper + offset
    else:
        while excess(upper + offset) < 0:
            offset *= 2
            if upper + offset > ABSCISSA_LIMIT:
                raise SearchFailureError(ABSCISSA_LIMIT)
        low, high = upper + offset / 2, upper + offset
    root = brentq(excess, low, high, xtol=ABSCISSA_XTOL, rtol=4 * np.finfo(float).eps)
    _LOGGER.debug("Invariant abscissa bracket [%s, %s], root %s", low, high, root)
    step = ABSCISSA_XTOL * max(1.0, abs(root))
    b = root
    while excess(b) < 0:
        b = min(b + step, high)
        step *= 2
    return b


def predicted_angular_limit(f: ParabolicMap, eps_beta: float = DEFAULT_EPS_BETA) -> float | None:
    """
    Return the expected limit of z (f(z) - z) as z -> inf non-tangentially.

    With t in L2(mu) the limit is -integral (1 + t^2) dmu when beta minus the
    first moment vanishes and infinite otherwise. None means no prediction:
    t is not in L2(mu), or the vanishing is only numerical.
    """
    profile = f.profile
    if not (profile.t_l1 and profile.t2_pos_finite and profile.t2_neg_finite):
        return None
    drift = tilde_beta(f)
    if abs(drift) > eps_beta:
        return math.inf
    if not profile.moment1_exact:
        return None
    second = moment(f.mu, 2, Region.ALL, absolute=True).value
    return -(profile.mass + second)
