"""
Forward orbits and the diagnostics read off them.

An orbit z_n = f^n(z_0) is stored as a complex array together with the
derived sequences: pseudo-hyperbolic steps d_n, Pommerenke quotients
b_n = (x_{n+1} - x_n) / y_n, ratios y_{n+1} / y_n and arguments arg z_n.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np

from .const import (
    DEFAULT_EVAL_TOL,
    DEFAULT_ORBIT_TOL,
    DEFAULT_ZERO_THRESHOLD,
    DEGENERATE_STEP,
    EVAL_TOL_FLOOR,
    OVERFLOW_LIMIT,
    PLATEAU_REL_DECREASE,
    POMMERENKE_ABS_THRESHOLD,
    POMMERENKE_DISPERSION,
    POMMERENKE_MIN_LENGTH,
    POMMERENKE_TAIL_FRACTION,
    PROGRESS_FRACTION,
    SCHWARZ_PICK_SLACK,
    Y_DIVERGENCE_SLOPE,
    EmpiricalOutcome,
    StopReason,
    Tangential,
)
from .exceptions import (
    DegenerateStepError,
    InvalidTraceError,
    OrbitOverflowError,
    QuadratureFailureError,
)
from .halfplane import HPoint, consecutive_pseudo_hyperbolic
from .herglotz import ParabolicMap, herglotz_integral

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Sequence

_LOGGER = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "x", "y", "d", "b", "y_ratio", "arg")


@dataclass(frozen=True, eq=False)
class OrbitTrace:
    """
    An orbit z_0 .. z_N with its derived sequences.

    Attributes
    ----------
    points : np.ndarray
        Complex orbit points, N + 1 entries.
    steps : np.ndarray
        d_n = rho(z_{n+1}, z_n), N entries.
    b_seq : np.ndarray
        (x_{n+1} - x_n) / y_n, N entries.
    y_ratio : np.ndarray
        y_{n+1} / y_n, N entries.
    args : np.ndarray
        arg z_n in (0, pi), N + 1 entries.
    z_ratio : np.ndarray
        |z_{n+1} / z_n - 1|, N entries.
    x_increments : np.ndarray
        x_{n+1} - x_n, N entries.
    eval_tol : float
        Tolerance of each evaluation of f.
    stop_reason : StopReason
        Why the computation ended.

    """

    points: np.ndarray
    steps: np.ndarray
    b_seq: np.ndarray
    y_ratio: np.ndarray
    args: np.ndarray
    z_ratio: np.ndarray
    x_increments: np.ndarray
    eval_tol: float
    stop_reason: StopReason = StopReason.COMPLETED

    @classmethod
    def from_points(
        cls,
        points: Sequence[complex] | np.ndarray,
        eval_tol: float,
        stop_reason: StopReason = StopReason.COMPLETED,
    ) -> OrbitTrace:
        """Build a trace and its derived sequences from orbit points."""
        zs = np.asarray(points, dtype=complex)
        xs, ys = zs.real, zs.imag
        increments = np.diff(xs)
        with np.errstate(divide="ignore", invalid="ignore"):
            z_ratio = np.abs(zs[1:] / zs[:-1] - 1.0)
        return cls(
            points=zs,
            steps=consecutive_pseudo_hyperbolic(zs),
            b_seq=increments / ys[:-1],
            y_ratio=ys[1:] / ys[:-1],
            args=np.arctan2(ys, xs),
            z_ratio=z_ratio,
            x_increments=increments,
            eval_tol=eval_tol,
            stop_reason=stop_reason,
        )

    @property
    def length(self) -> int:
        """Return the number of steps N."""
        return self.points.size - 1

    @property
    def valid(self) -> bool:
        """Return False when the orbit was cut short by a quadrature failure."""
        return self.stop_reason is not StopReason.QUADRATURE_FAILURE

    @property
    def ys(self) -> np.ndarray:
        """Return Im z_n."""
        return self.points.imag

    def schwarz_pick_violations(self, slack: float = SCHWARZ_PICK_SLACK) -> int:
        """Return how often d_{n+1} exceeds d_n by more than slack."""
        return int(np.count_nonzero(np.diff(self.steps) > slack))

    def rows(self) -> Iterator[tuple[Any, ...]]:
        """Yield CSV rows n, x, y, d, b, y_ratio, arg; the last row lacks d, b and y_ratio."""
        for index, z in enumerate(self.points):
            if index < self.length:
                derived = (self.steps[index], self.b_seq[index], self.y_ratio[index])
            else:
                derived = (None, None, None)
            yield (index, z.real, z.imag, *derived, self.args[index])


@dataclass(frozen=True, slots=True)
class PommerenkeEstimate:
    """Tail estimate of lim (x_{n+1} - x_n) / y_n."""

    estimate: float
    dispersion: float
    converged: bool


@dataclass(frozen=True, slots=True)
class EmpiricalVerdict:
    """Hyperbolic step verdict observed on an orbit, with its evidence."""

    verdict: EmpiricalOutcome
    d_tail: float
    b_estimate: float
    y_final: float
    y_diverging: bool
    tangential: Tangential | None
    drift_tail: float
    y_ratio_tail: float

    def as_dict(self) -> dict[str, Any]:
        """Return a JSON-ready mapping."""
        return {
            "verdict": self.verdict.value,
            "d_tail": self.d_tail,
            "b_estimate": self.b_estimate,
            "y_final": self.y_final,
            "y_diverging": self.y_diverging,
            "tangential": None if self.tangential is None else self.tangential.value,
            "drift_tail": self.drift_tail,
            "y_ratio_tail": self.y_ratio_tail,
        }


def orbit(f: ParabolicMap, z0: HPoint, n: int, tol: float = DEFAULT_ORBIT_TOL) -> OrbitTrace:
    """
    Iterate f n times from z0.

    Each evaluation uses tolerance max(tol / n, 1e-12) so the accumulated
    evaluation error stays near tol. A quadrature failure ends the orbit and
    returns the partial trace marked invalid; leaving |z| <= 1e300 ends it
    with stop reason overflow.
    """
    if n < 1:
        msg = f"Orbit length must be at least 1, got {n}"
        raise ValueError(msg)
    step_tol = max(tol / n, EVAL_TOL_FLOOR)
    points = [z0.z]
    z = z0
    reason = StopReason.COMPLETED
    report_every = max(1, int(n * PROGRESS_FRACTION))
    for index in range(1, n + 1):
        try:
            w = f.image(z, step_tol)
        except QuadratureFailureError as ex:
            _LOGGER.warning("Orbit stopped at step %d: %s", index, ex)
            reason = StopReason.QUADRATURE_FAILURE
            break
        if not cmath.isfinite(w) or abs(w) > OVERFLOW_LIMIT:
            _LOGGER.warning("Orbit left the representable range at step %d", index)
            reason = StopReason.OVERFLOW
            if cmath.isfinite(w):
                points.append(w)
            break
        z = HPoint.from_complex(w)
        points.append(w)
        if index % report_every == 0:
            _LOGGER.debug("Orbit step %d/%d at %s", index, n, z)
    trace = OrbitTrace.from_points(points, step_tol, reason)
    if violations := trace.schwarz_pick_violations():
        _LOGGER.warning("Step sequence increased %d times beyond tolerance", violations)
    return trace


def require_complete(trace: OrbitTrace) -> OrbitTrace:
    """Return the trace if it ran to the end, raise otherwise."""
    match trace.stop_reason:
        case StopReason.OVERFLOW:
            raise OrbitOverflowError(trace)
        case StopReason.QUADRATURE_FAILURE:
            msg = f"quadrature failed after {trace.length} steps"
            raise InvalidTraceError(msg)
    return trace


def _tail(values: np.ndarray, fraction: float) -> np.ndarray:
    return values[-max(1, int(values.size * fraction)) :]


def pommerenke_b(trace: OrbitTrace) -> PommerenkeEstimate:
    """Average b_n over the last tenth of the orbit."""
    if not trace.valid:
        msg = "the orbit was cut short by a quadrature failure"
        raise InvalidTraceError(msg)
    if trace.length < POMMERENKE_MIN_LENGTH:
        msg = f"{trace.length} steps, at least {POMMERENKE_MIN_LENGTH} needed"
        raise InvalidTraceError(msg)
    tail = _tail(trace.b_seq, POMMERENKE_TAIL_FRACTION)
    estimate = float(tail.mean())
    dispersion = float(tail.std())
    converged = (
        dispersion < POMMERENKE_DISPERSION * abs(estimate)
        or abs(estimate) < POMMERENKE_ABS_THRESHOLD
    )
    return PommerenkeEstimate(estimate, dispersion, converged)


def _y_diverging(trace: OrbitTrace) -> bool:
    log_y = _tail(np.log(trace.ys), POMMERENKE_TAIL_FRACTION)
    if log_y.size < 2:  # noqa: PLR2004
        return False
    slope = np.polyfit(np.arange(log_y.size, dtype=float), log_y, 1)[0]
    return bool(slope > Y_DIVERGENCE_SLOPE)


def _tangential(trace: OrbitTrace, window: int) -> Tangential | None:
    first, last = trace.args[-window - 1], trace.args[-1]
    if last < first and last < 0.5 * math.pi:
        return Tangential.TOWARD_ZERO
    if last > first and last > 0.5 * math.pi:
        return Tangential.TOWARD_PI
    return None


def empirical_step(
    trace: OrbitTrace,
    zero_threshold: float = DEFAULT_ZERO_THRESHOLD,
    plateau_window: int | None = None,
    *,
    t_l1: bool | None = None,
) -> EmpiricalVerdict:
    """
    Decide zero or positive hyperbolic step from the tail of an orbit.

    Parameters
    ----------
    trace : OrbitTrace
        A valid orbit.
    zero_threshold : float
        Steps below this count as vanishing.
    plateau_window : int | None
        Number of trailing steps inspected; a tenth of the orbit by default.
    t_l1 : bool | None
        Whether t is integrable against the measure. When True a positive
        step also needs Im z_n to stay bounded.

    Returns
    -------
    EmpiricalVerdict
        ZeroHS when the last step is below the threshold and still
        decreasing; PositiveHS when the steps have levelled off above it and
        the orbit behaves accordingly; Inconclusive otherwise.

    """
    if not trace.valid:
        msg = "the orbit was cut short by a quadrature failure"
        raise InvalidTraceError(msg)
    if plateau_window is None:
        plateau_window = max(1, trace.length // 10)
    if not 1 <= plateau_window <= trace.length:
        msg = f"plateau window {plateau_window} does not fit {trace.length} steps"
        raise InvalidTraceError(msg)
    steps = trace.steps
    d_tail = float(steps[-1])
    start = float(steps[-plateau_window])
    relative_decrease = (start - d_tail) / start if start > 0 else 0.0
    y_diverging = _y_diverging(trace)
    tangential = _tangential(trace, plateau_window)
    if trace.length >= POMMERENKE_MIN_LENGTH:
        b_estimate = pommerenke_b(trace).estimate
    else:
        b_estimate = float(_tail(trace.b_seq, POMMERENKE_TAIL_FRACTION).mean())

    if d_tail < zero_threshold and relative_decrease > 0:
        verdict = EmpiricalOutcome.ZERO_HS
    elif (
        relative_decrease < PLATEAU_REL_DECREASE
        and d_tail > zero_threshold
        and not (t_l1 and y_diverging)
        and tangential is not None
    ):
        verdict = EmpiricalOutcome.POSITIVE_HS
    else:
        verdict = EmpiricalOutcome.INCONCLUSIVE
    _LOGGER.debug(
        "Empirical step %s: d_tail=%.3g, decrease=%.3g, y_diverging=%s, tangential=%s",
        verdict.value,
        d_tail,
        relative_decrease,
        y_diverging,
        tangential,
    )
    return EmpiricalVerdict(
        verdict=verdict,
        d_tail=d_tail,
        b_estimate=b_estimate,
        y_final=float(trace.ys[-1]),
        y_diverging=y_diverging,
        tangential=tangential,
        drift_tail=float(_tail(trace.x_increments, POMMERENKE_TAIL_FRACTION).mean()),
        y_ratio_tail=float(_tail(trace.y_ratio, POMMERENKE_TAIL_FRACTION).mean()),
    )


def _check_grid(y_grid: Iterable[float]) -> np.ndarray:
    ys = np.asarray(list(y_grid), dtype=float)
    if ys.size == 0:
        msg = "Probe grid is empty"
        raise ValueError(msg)
    if np.any(ys <= 0) or np.any(np.diff(ys) <= 0):
        msg = "Probe grid must be positive and increasing"
        raise ValueError(msg)
    return ys


def drift_probe(
    f: ParabolicMap, y_grid: Iterable[float], tol: float = DEFAULT_EVAL_TOL
) -> np.ndarray:
    """Return f(iy) - iy along the grid; tends to beta minus the first moment for t in L1."""
    values = []
    for y in _check_grid(y_grid):
        integral = 0j
        if not f.mu.is_zero:
            integral = herglotz_integral(f.mu, HPoint(0.0, float(y)), tol).value
        values.append(f.beta + integral)
    return np.asarray(values, dtype=complex)


def angular_probe(
    f: ParabolicMap, y_grid: Iterable[float], tol: float = DEFAULT_EVAL_TOL
) -> np.ndarray:
    """Return iy (f(iy) - iy) along the grid."""
    ys = _check_grid(y_grid)
    return 1j * ys * drift_probe(f, ys, tol)


def abel_residual(
    f: ParabolicMap, z: HPoint, z0: HPoint, n: int, tol: float = DEFAULT_ORBIT_TOL
) -> np.ndarray:
    """
    Return r_k = |h_k(f(z)) - h_k(z) - 1| for k = 0 .. n.

    h_k(w) = (f^k(w) - z_k) / (z_{k+1} - z_k) with z_k the orbit of z0; the
    residual equals |(w_{k+1} - w_k) - (z_{k+1} - z_k)| / |z_{k+1} - z_k|
    with w_k the orbit of z.
    """
    if n < 2:  # noqa: PLR2004
        msg = f"At least two steps needed, got {n}"
        raise ValueError(msg)
    if z == z0:
        msg = "z and z0 must differ"
        raise ValueError(msg)
    base = require_complete(orbit(f, z0, n + 1, tol)).points
    moved = require_complete(orbit(f, z, n + 1, tol)).points
    base_steps = np.diff(base)
    sizes = np.abs(base_steps)
    if np.any(small := sizes < DEGENERATE_STEP):
        index = int(np.argmax(small))
        raise DegenerateStepError(index, float(sizes[index]))
    return (np.abs(np.diff(moved) - base_steps) / sizes)[: n + 1]
