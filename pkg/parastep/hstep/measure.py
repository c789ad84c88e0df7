"""
Finite positive measures on the real line.

A measure is a list of components: atoms, arithmetic trains of atoms with
expression weights, and densities given by an expression on an interval.
Whether an improper moment is finite is decided from the declared tail
exponents, never from quadrature; finite moments are then computed
numerically.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Any

import numpy as np

from .const import (
    FIRST_MOMENT_RTOL,
    MASS_RTOL,
    MOMENT_RTOL,
    SAMPLE_POINTS,
    SYMMETRY_RTOL,
    TAIL_SAMPLE_RANGE,
    TAIL_SLOPE_TOLERANCE,
    TRAIN_MAX_TERMS,
    TRAIN_MIN_TERMS,
    TRAIN_SAMPLE_RANGE,
    Region,
)
from .exceptions import ExprEvalError, InvalidMeasureError
from .exprparse import Expr, eval_array, eval_expr, has_variable
from .halfplane import ExtendedReal
from .quadrature import ZERO, QuadResult, integrate_line, sum_series

if TYPE_CHECKING:
    from collections.abc import Iterable

_LOGGER = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
# points where densities typically change shape
DENSITY_BREAKPOINTS: tuple[float, ...] = (-8.0, -1.0, 0.0, 1.0, 8.0)


def _loglog_slope(ts: np.ndarray, values: np.ndarray) -> float:
    return float(np.polyfit(np.log(ts), np.log(values), 1)[0])


def head_length(minimum: float) -> int:
    """Return a power of two at least TRAIN_MIN_TERMS and at least minimum."""
    needed = max(TRAIN_MIN_TERMS, math.ceil(minimum))
    return 1 << (needed - 1).bit_length()


def _in_region(ts: np.ndarray, region: Region) -> np.ndarray:
    match region:
        case Region.NEG:
            return ts < 0
        case Region.POS:
            return ts > 0
        case Region.ALL:
            return np.ones(ts.shape, dtype=bool)


def _region_piece(lower: float, upper: float, region: Region) -> tuple[float, float] | None:
    match region:
        case Region.NEG:
            upper = min(upper, 0.0)
        case Region.POS:
            lower = max(lower, 0.0)
    if lower >= upper:
        return None
    return lower, upper


@dataclass(frozen=True, slots=True)
class Atom:
    """Point mass w at t."""

    t: float
    w: float

    def __post_init__(self) -> None:
        """Validate location and weight."""
        if not math.isfinite(self.t):
            msg = f"atom location {self.t!r} is not finite"
            raise InvalidMeasureError(msg)
        if not (math.isfinite(self.w) and self.w > 0):
            msg = f"atom weight {self.w!r} must be positive"
            raise InvalidMeasureError(msg)

    @property
    def support(self) -> tuple[float, float]:
        """Return the smallest closed interval carrying the atom."""
        return self.t, self.t

    def reflected(self) -> Atom:
        """Return the atom at -t."""
        return Atom(-self.t, self.w)

    def moment_finite(self, k: int, region: Region) -> bool:  # noqa: ARG002
        """Atoms have every moment."""
        return True

    def abs_moment(self, k: int, region: Region) -> QuadResult:
        """Return w |t|^k when t lies in the region."""
        if not _in_region(np.array([self.t]), region)[0]:
            return ZERO
        return QuadResult(self.w * abs(self.t) ** k, 0.0, 1)


@dataclass(frozen=True, slots=True)
class AtomTrain:
    """
    Atoms at t_k = t0 + k * step for k = 0, 1, ... with weights weight(t_k).

    Attributes
    ----------
    t0 : float
        Location of the first atom.
    step : float
        Spacing, non-zero; its sign gives the direction of the train.
    weight : Expr
        Weight as an expression in t, positive at every t_k.
    decay : float
        Declared exponent r with weight(t_k) = O(|t_k|^-r); r > 1 for
        infinite trains.
    count : int | None
        Number of atoms, None for an infinite train.
    mirrored : bool
        Also place the same weights at -t_k.
    reflected : bool
        Evaluate the weight at -t_k instead of t_k; set by reflection.

    """

    t0: float
    step: float
    weight: Expr
    decay: float
    count: int | None = None
    mirrored: bool = False
    reflected: bool = False

    def __post_init__(self) -> None:
        """Validate spacing, count, weights and the declared decay."""
        if not (math.isfinite(self.t0) and math.isfinite(self.step)) or self.step == 0:
            msg = f"train needs finite t0 and non-zero step, got {self.t0!r}, {self.step!r}"
            raise InvalidMeasureError(msg)
        if self.count is not None and not 1 <= self.count <= TRAIN_MAX_TERMS:
            msg = f"train count {self.count} outside [1, {TRAIN_MAX_TERMS}]"
            raise InvalidMeasureError(msg)
        if self.count is None and not (math.isfinite(self.decay) and self.decay > 1):
            msg = f"infinite train needs decay exponent > 1, got {self.decay!r}"
            raise InvalidMeasureError(msg)
        if self.count is not None:
            ks = np.arange(self.count, dtype=float)
        else:
            ks = np.unique(
                np.concatenate((np.arange(TRAIN_MIN_TERMS), np.round(np.logspace(3, 6, 50))))
            )
        weights = self._checked_weights(ks)
        if np.any(weights <= 0):
            bad = ks[weights <= 0][0]
            msg = f"train weight at k={int(bad)} is not positive"
            raise InvalidMeasureError(msg)
        if self.count is None:
            self._check_decay()

    def _checked_weights(self, ks: np.ndarray) -> np.ndarray:
        try:
            return self.weights(ks)
        except ExprEvalError as ex:
            msg = f"train weight cannot be evaluated: {ex}"
            raise InvalidMeasureError(msg) from ex

    def _check_decay(self) -> None:
        ks = np.unique(np.round(np.logspace(*np.log10(TRAIN_SAMPLE_RANGE), 25)))
        ts = np.abs(self.positions(ks))
        if np.any(ts == 0):
            msg = "train passes through 0 in its decay sample"
            raise InvalidMeasureError(msg)
        slope = _loglog_slope(ts, self._checked_weights(ks) * ts**self.decay)
        if slope > TAIL_SLOPE_TOLERANCE:
            msg = (
                f"train weights decay slower than |t|^-{self.decay} "
                f"(residual slope {slope:.3g})"
            )
            raise InvalidMeasureError(msg)

    @property
    def is_infinite(self) -> bool:
        """Return True for a train without end."""
        return self.count is None

    @property
    def sides(self) -> tuple[float, ...]:
        """Return +1, and -1 as well when mirrored."""
        return (1.0, -1.0) if self.mirrored else (1.0,)

    def positions(self, ks: np.ndarray) -> np.ndarray:
        """Return t0 + k * step for real indices k."""
        return self.t0 + np.asarray(ks, dtype=float) * self.step

    def weights(self, ks: np.ndarray) -> np.ndarray:
        """Return the weights at real indices k."""
        positions = self.positions(ks)
        return eval_array(self.weight, -positions if self.reflected else positions)

    def nodes(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Return cached positions and weights for k = 0 .. n-1."""
        return _train_nodes(self, n)

    def tail_sign(self, side: float) -> float:
        """Return the sign of the far atoms on one side."""
        return math.copysign(1.0, side * self.step)

    @property
    def crossing(self) -> int:
        """Return the first index from which t_k has the sign of step."""
        return max(0, math.floor(-self.t0 / self.step) + 1)

    @property
    def support(self) -> tuple[float, float]:
        """Return the smallest closed interval carrying the train."""
        lows, highs = [], []
        for side in self.sides:
            first = side * self.t0
            if self.count is None:
                far = math.copysign(math.inf, side * self.step)
            else:
                far = side * float(self.positions(np.array([self.count - 1]))[0])
            lows.append(min(first, far))
            highs.append(max(first, far))
        return min(lows), max(highs)

    def reflected_train(self) -> AtomTrain:
        """Return the train at -t_k with the same weights."""
        return replace(self, t0=-self.t0, step=-self.step, reflected=not self.reflected)

    def moment_finite(self, k: int, region: Region) -> bool:
        """Return whether the k-th absolute moment over the region is finite."""
        if self.count is not None:
            return True
        for side in self.sides:
            sign = self.tail_sign(side)
            reaches = region is Region.ALL or (sign > 0) == (region is Region.POS)
            if reaches and self.decay - k <= 1:
                return False
        return True

    def abs_moment(self, k: int, region: Region) -> QuadResult:
        """Return the k-th absolute moment over the region, assumed finite."""
        result = ZERO
        for side in self.sides:
            result += self._side_moment(side, k, region)
        return result

    def _side_moment(self, side: float, k: int, region: Region) -> QuadResult:
        def head(n: int) -> np.ndarray:
            positions, weights = self.nodes(n)
            ts = side * positions
            return np.where(_in_region(ts, region), weights * np.abs(ts) ** k, 0.0)

        if self.count is not None:
            values = head(self.count)
            return QuadResult(float(values.sum()), 16 * _EPS * float(values.sum()), self.count)
        sign = self.tail_sign(side)
        if not (region is Region.ALL or (sign > 0) == (region is Region.POS)):
            values = head(self.crossing) if self.crossing else np.zeros(0)
            return QuadResult(float(values.sum()), 16 * _EPS * float(values.sum()), values.size)

        def term(ks: np.ndarray) -> np.ndarray:
            return self.weights(ks) * np.abs(self.positions(ks)) ** k

        return sum_series(
            head,
            term,
            terms=head_length(self.crossing + 8),
            rtol=MOMENT_RTOL if k else MASS_RTOL,
            decay=self.decay - k,
        )


@functools.lru_cache(maxsize=64)
def _train_nodes(train: AtomTrain, n: int) -> tuple[np.ndarray, np.ndarray]:
    ks = np.arange(n, dtype=float)
    positions = train.positions(ks)
    weights = train.weights(ks)
    positions.flags.writeable = False
    weights.flags.writeable = False
    _LOGGER.debug("Cached %d nodes of train t0=%s step=%s", n, train.t0, train.step)
    return positions, weights


@dataclass(frozen=True, slots=True)
class DensityComponent:
    """
    Absolutely continuous component with density rho on [lower, upper].

    Attributes
    ----------
    rho : Expr
        Non-negative density as an expression in t.
    lower, upper : float
        Support limits; lower may be -inf and upper +inf.
    tail_pos, tail_neg : float | None
        Declared exponents a with rho(t) ~ |t|^-a at +inf and -inf, required
        exactly for the infinite ends and greater than 1.
    first_moment : Expr | None
        Optional closed form of the integral of t rho(t), a constant
        expression checked against quadrature.
    reflected : bool
        Evaluate rho at -t; set by reflection.

    """

    rho: Expr
    lower: float = -math.inf
    upper: float = math.inf
    tail_pos: float | None = None
    tail_neg: float | None = None
    first_moment: Expr | None = None
    reflected: bool = False

    def __post_init__(self) -> None:
        """Validate support, tails, sign and the declared first moment."""
        if math.isnan(self.lower) or math.isnan(self.upper) or not self.lower < self.upper:
            msg = f"density support [{self.lower}, {self.upper}] is empty"
            raise InvalidMeasureError(msg)
        for end, tail, name in (
            (self.upper, self.tail_pos, "tail_pos"),
            (-self.lower, self.tail_neg, "tail_neg"),
        ):
            if math.isinf(end) and tail is None:
                msg = f"{name} is required for an unbounded support"
                raise InvalidMeasureError(msg)
            if math.isfinite(end) and tail is not None:
                msg = f"{name} is only allowed for an unbounded support"
                raise InvalidMeasureError(msg)
            if tail is not None and not (math.isfinite(tail) and tail > 1):
                msg = f"{name} must exceed 1 for a finite mass, got {tail!r}"
                raise InvalidMeasureError(msg)
        samples = self._checked_density(self.sample_support())
        if np.any(samples < 0):
            msg = "density is negative on its support"
            raise InvalidMeasureError(msg)
        if not np.any(samples > 0):
            msg = "density vanishes on its support"
            raise InvalidMeasureError(msg)
        self._check_tails()
        if self.first_moment is not None:
            self._check_first_moment()

    def _checked_density(self, ts: np.ndarray) -> np.ndarray:
        try:
            return self.density(ts)
        except ExprEvalError as ex:
            msg = f"density cannot be evaluated: {ex}"
            raise InvalidMeasureError(msg) from ex

    def _check_tails(self) -> None:
        for tail, direction, start in (
            (self.tail_pos, 1.0, self.lower),
            (self.tail_neg, -1.0, -self.upper),
        ):
            if tail is None:
                continue
            base = TAIL_SAMPLE_RANGE[0]
            if math.isfinite(start):
                base = max(base, 2 * abs(start))
            ts = base * np.logspace(0, math.log10(TAIL_SAMPLE_RANGE[1] / TAIL_SAMPLE_RANGE[0]), 25)
            values = self._checked_density(direction * ts) * ts**tail
            if np.any(values <= 0) or abs(_loglog_slope(ts, values)) > TAIL_SLOPE_TOLERANCE:
                msg = f"density tail does not behave like |t|^-{tail}"
                raise InvalidMeasureError(msg)

    def _check_first_moment(self) -> None:
        if has_variable(self.first_moment):
            msg = "first_moment must be a constant expression"
            raise InvalidMeasureError(msg)
        if not self.moment_finite(1, Region.ALL):
            msg = "first_moment declared for a density without a first moment"
            raise InvalidMeasureError(msg)
        positive = self.abs_moment(1, Region.POS).value.real
        negative = self.abs_moment(1, Region.NEG).value.real
        declared = self.declared_first_moment
        if abs(declared - (positive - negative)) > FIRST_MOMENT_RTOL * (positive + negative):
            msg = f"first_moment {declared!r} disagrees with {positive - negative!r}"
            raise InvalidMeasureError(msg)

    @property
    def declared_first_moment(self) -> float | None:
        """Return the closed-form first moment, if declared."""
        if self.first_moment is None:
            return None
        value = eval_expr(self.first_moment, 0.0)
        return -value if self.reflected else value

    @property
    def support(self) -> tuple[float, float]:
        """Return the support interval."""
        return self.lower, self.upper

    def density(self, ts: np.ndarray) -> np.ndarray:
        """Evaluate rho at an array of points of the support."""
        ts = np.asarray(ts, dtype=float)
        return eval_array(self.rho, -ts if self.reflected else ts)

    def sample_support(self, n: int = SAMPLE_POINTS) -> np.ndarray:
        """Return n interior points spread over the support."""
        center = min(max(0.0, self.lower), self.upper)
        lo = -0.5 * math.pi if self.lower == -math.inf else math.atan(self.lower - center)
        hi = 0.5 * math.pi if self.upper == math.inf else math.atan(self.upper - center)
        return center + np.tan(np.linspace(lo, hi, n + 2)[1:-1])

    def reflected_density(self) -> DensityComponent:
        """Return the density t -> rho(-t) on the mirrored support."""
        return replace(
            self,
            lower=-self.upper,
            upper=-self.lower,
            tail_pos=self.tail_neg,
            tail_neg=self.tail_pos,
            reflected=not self.reflected,
        )

    def moment_finite(self, k: int, region: Region) -> bool:
        """Return whether the k-th absolute moment over the region is finite."""
        piece = _region_piece(self.lower, self.upper, region)
        if piece is None:
            return True
        lo, hi = piece
        if hi == math.inf and self.tail_pos <= k + 1:
            return False
        return not (lo == -math.inf and self.tail_neg <= k + 1)

    def abs_moment(self, k: int, region: Region) -> QuadResult:
        """Return the k-th absolute moment over the region, assumed finite."""
        piece = _region_piece(self.lower, self.upper, region)
        if piece is None:
            return ZERO
        lo, hi = piece

        def integrand(ts: np.ndarray) -> np.ndarray:
            return self.density(ts) * np.abs(ts) ** k

        return integrate_line(
            integrand,
            lo,
            hi,
            center=min(max(0.0, lo), hi),
            scale=1.0,
            points=DENSITY_BREAKPOINTS,
            rtol=MOMENT_RTOL if k else MASS_RTOL,
            decay_pos=None if self.tail_pos is None else self.tail_pos - k,
            decay_neg=None if self.tail_neg is None else self.tail_neg - k,
        )


Component = Atom | AtomTrain | DensityComponent


def reflect_component(component: Component) -> Component:
    """Map a component through t -> -t."""
    match component:
        case Atom():
            return component.reflected()
        case AtomTrain():
            return component.reflected_train()
        case DensityComponent():
            return component.reflected_density()
    msg = f"Unknown component {component!r}"
    raise TypeError(msg)


def _close(a: np.ndarray, b: np.ndarray) -> bool:
    scale = float(np.max(np.abs(a), initial=0.0))
    return bool(np.allclose(a, b, rtol=SYMMETRY_RTOL, atol=SYMMETRY_RTOL * scale))


def _mirrors(a: Component, b: Component) -> bool:  # noqa: PLR0911
    """Return True when b is the image of a under t -> -t."""
    match a, b:
        case Atom(), Atom():
            return a.t == -b.t and a.w == b.w
        case AtomTrain(), AtomTrain():
            if (a.count, a.mirrored, a.decay) != (b.count, b.mirrored, b.decay):
                return False
            if a.t0 != -b.t0 or a.step != -b.step:
                return False
            ks = np.arange(min(a.count or SAMPLE_POINTS, SAMPLE_POINTS), dtype=float)
            return _close(a.weights(ks), b.weights(ks))
        case DensityComponent(), DensityComponent():
            if (a.lower, a.upper) != (-b.upper, -b.lower):
                return False
            if (a.tail_pos, a.tail_neg) != (b.tail_neg, b.tail_pos):
                return False
            ts = a.sample_support()
            return _close(a.density(ts), b.density(-ts))
    return False


def _self_symmetric(component: Component) -> bool:
    if isinstance(component, Atom):
        return component.t == 0
    if isinstance(component, AtomTrain) and component.mirrored:
        return True
    return _mirrors(component, component)


def _structurally_symmetric(components: Iterable[Component]) -> Component | None:
    """Return a component without a mirror image, or None."""
    pending = [c for c in components if not _self_symmetric(c)]
    while pending:
        component = pending.pop()
        partner = next((c for c in pending if _mirrors(component, c)), None)
        if partner is None:
            return component
        pending.remove(partner)
    return None


@dataclass(frozen=True, slots=True)
class MeasureSpec:
    """
    A finite positive measure as a sum of components.

    Attributes
    ----------
    components : tuple[Component, ...]
        Atoms, atom trains and densities; empty for the zero measure.
    declared_symmetric : bool
        The measure is invariant under t -> -t. Checked structurally:
        every component is self-symmetric or paired with its mirror image.

    """

    components: tuple[Component, ...] = ()
    declared_symmetric: bool = False

    def __post_init__(self) -> None:
        """Normalize the component list and check declared symmetry."""
        object.__setattr__(self, "components", tuple(self.components))
        for component in self.components:
            if not isinstance(component, Atom | AtomTrain | DensityComponent):
                msg = f"unknown component {component!r}"
                raise InvalidMeasureError(msg)
        if self.declared_symmetric:
            lonely = _structurally_symmetric(self.components)
            if lonely is not None:
                msg = f"declared symmetric but {lonely} has no mirror image"
                raise InvalidMeasureError(msg)

    @property
    def is_zero(self) -> bool:
        """Return True for the zero measure."""
        return not self.components


@dataclass(frozen=True, slots=True)
class IntegrabilityProfile:
    """Integrability data of a measure used by the classifier."""

    mass: float
    t_l1: bool
    moment1: float | None
    t2_pos_finite: bool
    t2_neg_finite: bool
    abs_t_neg_finite: bool
    abs_t_pos_finite: bool
    symmetric: bool
    support_upper: float | None
    support_lower: float | None
    moment1_exact: bool = False

    def as_dict(self) -> dict[str, Any]:
        """Return the profile with stable JSON field names."""
        return {
            "mass": self.mass,
            "t_L1": self.t_l1,
            "moment1": self.moment1,
            "moment1_exact": self.moment1_exact,
            "t2_pos_finite": self.t2_pos_finite,
            "t2_neg_finite": self.t2_neg_finite,
            "abs_t_neg_finite": self.abs_t_neg_finite,
            "abs_t_pos_finite": self.abs_t_pos_finite,
            "symmetric": self.symmetric,
            "support_upper": self.support_upper,
            "support_lower": self.support_lower,
        }


def _sum(results: Iterable[QuadResult]) -> float:
    return math.fsum(float(r.value.real) for r in results)


def total_mass(m: MeasureSpec) -> float:
    """Return the total mass of the measure."""
    return _sum(c.abs_moment(0, Region.ALL) for c in m.components)


def _moment_finite(m: MeasureSpec, k: int, region: Region) -> bool:
    return all(c.moment_finite(k, region) for c in m.components)


def _abs_moment(m: MeasureSpec, k: int, region: Region) -> float:
    return _sum(c.abs_moment(k, region) for c in m.components)


def moment(m: MeasureSpec, k: int, region: Region, *, absolute: bool) -> ExtendedReal:
    """
    Return the k-th moment of the measure over a region.

    Parameters
    ----------
    m : MeasureSpec
        The measure.
    k : int
        Moment order; 1 and 2 are the orders used by classification, 0 gives
        the mass of the region.
    region : Region
        ``NEG`` for (-inf, 0), ``POS`` for (0, inf), ``ALL`` for the line.
    absolute : bool
        Integrate |t|^k instead of t^k.

    Returns
    -------
    ExtendedReal
        Positive infinity when the absolute moment diverges, whatever the
        value of ``absolute``; otherwise the finite value.

    """
    if k not in (0, 1, 2):
        msg = f"Moment order must be 0, 1 or 2, got {k}"
        raise ValueError(msg)
    if not _moment_finite(m, k, region):
        return ExtendedReal.infinity()
    if absolute or k % 2 == 0:
        return ExtendedReal.finite(_abs_moment(m, k, region))
    positive = _abs_moment(m, k, Region.POS) if region is not Region.NEG else 0.0
    negative = _abs_moment(m, k, Region.NEG) if region is not Region.POS else 0.0
    return ExtendedReal.finite(positive - negative)


def _exact_first_moment(m: MeasureSpec) -> float | None:
    """Return the first moment when every component knows it in closed form."""
    if m.declared_symmetric:
        return 0.0
    terms: list[float] = []
    unresolved: list[Component] = []
    for component in m.components:
        match component:
            case Atom(t=t, w=w):
                terms.append(t * w)
            case DensityComponent(first_moment=declared) if declared is not None:
                terms.append(component.declared_first_moment)
            case _ if _self_symmetric(component):
                pass
            case _:
                unresolved.append(component)
    # mirror pairs cancel
    if _structurally_symmetric(unresolved) is not None:
        return None
    return math.fsum(terms)


def support_bounds(m: MeasureSpec) -> tuple[float | None, float | None]:
    """Return finite (lower, upper) support bounds, None where unbounded."""
    if m.is_zero:
        return None, None
    lows, highs = zip(*(c.support for c in m.components), strict=True)
    lower, upper = min(lows), max(highs)
    return (lower if math.isfinite(lower) else None), (upper if math.isfinite(upper) else None)


@functools.lru_cache(maxsize=64)
def integrability_profile(m: MeasureSpec) -> IntegrabilityProfile:
    """Collect mass, moment finiteness, symmetry and support of the measure."""
    abs_t_neg_finite = _moment_finite(m, 1, Region.NEG)
    abs_t_pos_finite = _moment_finite(m, 1, Region.POS)
    t_l1 = abs_t_neg_finite and abs_t_pos_finite
    moment1: float | None = None
    exact = False
    if t_l1:
        moment1 = _exact_first_moment(m)
        exact = moment1 is not None
        if moment1 is None:
            moment1 = moment(m, 1, Region.ALL, absolute=False).value
    lower, upper = support_bounds(m)
    profile = IntegrabilityProfile(
        mass=total_mass(m),
        t_l1=t_l1,
        moment1=moment1,
        t2_pos_finite=_moment_finite(m, 2, Region.POS),
        t2_neg_finite=_moment_finite(m, 2, Region.NEG),
        abs_t_neg_finite=abs_t_neg_finite,
        abs_t_pos_finite=abs_t_pos_finite,
        symmetric=m.declared_symmetric,
        support_upper=upper,
        support_lower=lower,
        moment1_exact=exact,
    )
    _LOGGER.debug("Integrability profile: %s", profile)
    return profile


def reflect(m: MeasureSpec) -> MeasureSpec:
    """Return the image of the measure under t -> -t."""
    return MeasureSpec(
        tuple(reflect_component(c) for c in m.components),
        declared_symmetric=m.declared_symmetric,
    )
