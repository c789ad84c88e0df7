"""
Adaptive Gauss-Kronrod quadrature and tail-corrected series summation.

The local rule is the 7/15 Gauss-Kronrod pair with the QUADPACK error
estimate. Refinement is global and vectorized: every round bisects all
subintervals whose error exceeds the average share of the target and
evaluates the new children in a single call, so integrands are numpy
functions of an abscissa array.
"""

from __future__ import annotations

import logging
import math
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .const import (
    DEFAULT_EVAL_BUDGET,
    GK15_GAUSS_WEIGHTS,
    GK15_KRONROD_WEIGHTS,
    GK15_NODES,
    QUAD_MIN_INTERVALS,
    TAIL_MAX_POWER,
    TAIL_REACH,
    TRAIN_MAX_TERMS,
)
from .exceptions import QuadratureFailureError

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator, Sequence

_LOGGER = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny

_HALF_NODES = np.array(GK15_NODES[:7])
_NODES = np.concatenate((-_HALF_NODES, [0.0], _HALF_NODES[::-1]))
_KRONROD = np.concatenate(
    (GK15_KRONROD_WEIGHTS[:7], [GK15_KRONROD_WEIGHTS[7]], GK15_KRONROD_WEIGHTS[6::-1])
)
_GAUSS_HALF = np.array(
    [0.0, GK15_GAUSS_WEIGHTS[0], 0.0, GK15_GAUSS_WEIGHTS[1], 0.0, GK15_GAUSS_WEIGHTS[2], 0.0]
)
_GAUSS = np.concatenate((_GAUSS_HALF, [GK15_GAUSS_WEIGHTS[3]], _GAUSS_HALF[::-1]))

_EVAL_BUDGET: ContextVar[int] = ContextVar("eval_budget", default=DEFAULT_EVAL_BUDGET)


@contextmanager
def eval_budget(evaluations: int) -> Iterator[None]:
    """Set the per-integral evaluation budget for the current context."""
    if evaluations <= 0:
        msg = f"Evaluation budget must be positive, got {evaluations}"
        raise ValueError(msg)
    token = _EVAL_BUDGET.set(evaluations)
    try:
        yield
    finally:
        _EVAL_BUDGET.reset(token)


def current_budget() -> int:
    """Return the evaluation budget in effect."""
    return _EVAL_BUDGET.get()


@dataclass(frozen=True, slots=True)
class QuadResult:
    """
    Value of an integral or series with its error bound.

    Attributes
    ----------
    value : complex
        The estimate; real integrands give a real-valued complex or float.
    error : float
        Estimated absolute error, non-negative.
    evaluations : int
        Number of integrand evaluations spent.

    """

    value: complex
    error: float
    evaluations: int

    def __add__(self, other: QuadResult) -> QuadResult:
        """Combine two independent results."""
        return QuadResult(
            self.value + other.value,
            self.error + other.error,
            self.evaluations + other.evaluations,
        )


ZERO = QuadResult(0.0, 0.0, 0)


def _gk15(
    func: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    abscissae = center[:, None] + half[:, None] * _NODES
    values = np.asarray(func(abscissae.ravel())).reshape(abscissae.shape)
    if not np.all(np.isfinite(values)):
        bad = abscissae[~np.isfinite(values)].flat[0]
        msg = f"non-finite integrand at {bad!r}"
        raise QuadratureFailureError(msg)
    kronrod = (values @ _KRONROD) * half
    gauss = (values @ _GAUSS) * half
    resabs = (np.abs(values) @ _KRONROD) * half
    mean = 0.5 * (values @ _KRONROD)
    resasc = (np.abs(values - mean[:, None]) @ _KRONROD) * half
    error = np.abs(kronrod - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * error / resasc) ** 1.5)
    error = np.where((resasc != 0) & (error != 0), scaled, error)
    return kronrod, np.where(
        resabs > _UFLOW / (50 * _EPS), np.maximum(50 * _EPS * resabs, error), error
    )


def integrate(  # noqa: PLR0913
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    points: Sequence[float] = (),
    atol: float = 0.0,
    rtol: float = 1e-10,
    min_width: float = 0.0,
) -> QuadResult:
    """
    Integrate func over the finite interval [a, b].

    Parameters
    ----------
    func : Callable[[np.ndarray], np.ndarray]
        Vectorized integrand, real or complex valued.
    a, b : float
        Finite limits.
    points : Sequence[float]
        Breakpoints inside (a, b) where the integrand has features.
    atol, rtol : float
        The result is accepted once the summed error is at most
        ``max(atol, rtol * |value|)``.
    min_width : float
        Subintervals narrower than this are never bisected.

    Returns
    -------
    QuadResult
        Estimate, error bound and evaluation count.

    Raises
    ------
    QuadratureFailureError
        When the budget runs out, no subinterval can be bisected, or the
        integrand is not finite.

    """
    if not (math.isfinite(a) and math.isfinite(b)):
        msg = f"Finite limits expected, got [{a}, {b}]"
        raise ValueError(msg)
    if a == b:
        return ZERO
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    inner = [p for p in points if a < p < b]
    edges = np.unique(np.concatenate(([a, b], inner, np.linspace(a, b, QUAD_MIN_INTERVALS + 1))))
    lo, hi = edges[:-1], edges[1:]
    values, errors = _gk15(func, lo, hi)
    evaluations = _NODES.size * lo.size
    budget = current_budget()
    while True:
        total = values.sum()
        error = float(errors.sum())
        target = max(atol, rtol * abs(total))
        if error <= target:
            return QuadResult(sign * total, error, evaluations)
        remaining = (budget - evaluations) // (2 * _NODES.size)
        if remaining < 1:
            msg = "evaluation budget exhausted"
            raise QuadratureFailureError(msg, sign * total, error, evaluations)
        width = hi - lo
        split = (errors > target / errors.size) & (width > 2 * min_width)
        split &= width > 8 * np.spacing(np.maximum(np.abs(lo), np.abs(hi)))
        if not split.any():
            msg = "no subinterval can be refined"
            raise QuadratureFailureError(msg, sign * total, error, evaluations)
        if split.sum() > remaining:
            cutoff = np.sort(errors[split])[-remaining]
            split &= errors >= cutoff
        mids = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate((lo[split], mids))
        new_hi = np.concatenate((mids, hi[split]))
        new_values, new_errors = _gk15(func, new_lo, new_hi)
        evaluations += _NODES.size * new_lo.size
        keep = ~split
        lo = np.concatenate((lo[keep], new_lo))
        hi = np.concatenate((hi[keep], new_hi))
        values = np.concatenate((values[keep], new_values))
        errors = np.concatenate((errors[keep], new_errors))


def theta_of(t: float, center: float, scale: float) -> float:
    """Return the angle of t under t = center + scale * tan(theta)."""
    if t == math.inf:
        return 0.5 * math.pi
    if t == -math.inf:
        return -0.5 * math.pi
    return math.atan((t - center) / scale)


def _algebraic_tail(  # noqa: PLR0913
    func: Callable[[np.ndarray], np.ndarray],
    start: float,
    direction: float,
    *,
    reach: float,
    decay: float,
    atol: float,
    rtol: float,
) -> QuadResult:
    # t = start + direction * reach * (u^-power - 1) makes a |t|^-decay tail
    # vanish linearly at u = 0
    power = min(2.0 / (decay - 1.0), TAIL_MAX_POWER)

    def mapped(u: np.ndarray) -> np.ndarray:
        stretch = u**-power
        return func(start + direction * reach * (stretch - 1.0)) * (reach * power * stretch / u)

    return integrate(mapped, 0.0, 1.0, atol=atol, rtol=rtol)


def integrate_line(  # noqa: PLR0913
    func: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: float,
    *,
    center: float,
    scale: float,
    points: Sequence[float] = (),
    atol: float = 0.0,
    rtol: float = 1e-10,
    decay_pos: float | None = None,
    decay_neg: float | None = None,
) -> QuadResult:
    """
    Integrate func over [lower, upper] with t = center + scale * tan(theta).

    Either limit may be infinite. With center = Re z and scale = Im z the
    Cauchy factor 1 / |t - z|^2 becomes constant in theta. An infinite end
    whose integrand decays like |t|^-q with q < 2 (``decay_pos`` /
    ``decay_neg``) is split off and integrated with an algebraic
    substitution instead, since the tangent map leaves an endpoint
    singularity there.
    """
    if scale <= 0:
        msg = f"Substitution scale must be positive, got {scale}"
        raise ValueError(msg)
    finite = [p for p in (*points, lower, upper, center) if math.isfinite(p)]
    result = ZERO
    if upper == math.inf and decay_pos is not None and decay_pos < 2:  # noqa: PLR2004
        cut = max(finite) + TAIL_REACH * scale
        result += _algebraic_tail(
            func, cut, 1.0, reach=cut - center, decay=decay_pos, atol=atol / 3, rtol=rtol
        )
        upper = cut
    if lower == -math.inf and decay_neg is not None and decay_neg < 2:  # noqa: PLR2004
        cut = min(finite) - TAIL_REACH * scale
        result += _algebraic_tail(
            func, cut, -1.0, reach=center - cut, decay=decay_neg, atol=atol / 3, rtol=rtol
        )
        lower = cut

    def mapped(theta: np.ndarray) -> np.ndarray:
        tangent = np.tan(theta)
        return func(center + scale * tangent) * (scale * (1.0 + tangent * tangent))

    return result + integrate(
        mapped,
        theta_of(lower, center, scale),
        theta_of(upper, center, scale),
        points=[theta_of(p, center, scale) for p in points if lower < p < upper],
        atol=atol / 3 if result.evaluations else atol,
        rtol=rtol,
    )


def sum_series(  # noqa: PLR0913
    head: Callable[[int], np.ndarray],
    term: Callable[[np.ndarray], np.ndarray],
    *,
    terms: int,
    atol: float = 0.0,
    rtol: float = 1e-10,
    points: Sequence[float] = (),
    decay: float | None = None,
    max_terms: int = TRAIN_MAX_TERMS,
) -> QuadResult:
    """
    Sum term(k) over all integers k >= 0.

    The first K terms are summed explicitly; the rest is
    ``integral_K^inf term + term(K)/2 - term'(K)/12 + term'''(K)/720`` with
    derivatives from central differences; the last correction doubles as the
    error estimate. K doubles until the error
    target is met.

    Parameters
    ----------
    head : Callable[[int], np.ndarray]
        ``head(n)`` returns term(0), ..., term(n - 1), typically from cached
        nodes.
    term : Callable[[np.ndarray], np.ndarray]
        The same summand as a function of a real index.
    terms : int
        Initial explicit length K, at least 8.
    atol, rtol : float
        Error target as in :func:`integrate`.
    points : Sequence[float]
        Real indices where the summand has features, passed to the tail
        integral.
    decay : float | None
        Exponent q with term(s) = O(s^-q), used by the tail integral.
    max_terms : int
        Largest explicit length tried.

    """
    count = max(int(terms), 8)
    evaluations = 0
    while True:
        values = head(count + 3)
        evaluations += count + 3
        explicit = values[:count].sum()
        window = values[count - 2 : count + 3]  # k = K-2 .. K+2
        derivative = (window[0] - 8 * window[1] + 8 * window[3] - window[4]) / 12
        third = (window[4] - 2 * window[3] + 2 * window[1] - window[0]) / 2
        tail_target = 0.25 * max(atol, rtol * abs(explicit))
        tail = integrate_line(
            term,
            float(count),
            math.inf,
            center=float(count),
            scale=float(count),
            points=[p for p in points if p > count],
            atol=tail_target,
            decay_pos=decay,
            rtol=0.25 * rtol,
        )
        evaluations += tail.evaluations
        total = explicit + tail.value + 0.5 * window[2] - derivative / 12 + third / 720
        roundoff = 16 * _EPS * float(np.abs(values[:count]).sum())
        error = tail.error + abs(third) / 720 + roundoff
        if error <= max(atol, rtol * abs(total)):
            return QuadResult(total, error, evaluations)
        if 2 * count > max_terms:
            msg = f"series needs more than {max_terms} explicit terms"
            raise QuadratureFailureError(msg, total, error, evaluations)
        _LOGGER.debug("Series error %.3g with %d terms, doubling", error, count)
        count *= 2
