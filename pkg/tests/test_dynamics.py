"""Tests for orbits and orbit diagnostics."""

from __future__ import annotations

import math

import numpy as np
import pytest

from parastep.hstep.const import EmpiricalOutcome, StopReason, Tangential
from parastep.hstep.dynamics import (
    CSV_COLUMNS,
    OrbitTrace,
    abel_residual,
    angular_probe,
    drift_probe,
    empirical_step,
    orbit,
    pommerenke_b,
    require_complete,
)
from parastep.hstep.exceptions import (
    InvalidTraceError,
    OrbitOverflowError,
    QuadratureFailureError,
)
from parastep.hstep.exprparse import parse
from parastep.hstep.halfplane import HPoint
from parastep.hstep.herglotz import ParabolicMap
from parastep.hstep.measure import Atom, DensityComponent, MeasureSpec

from .conftest import golden_map

TRANSLATION = ParabolicMap(1.0, MeasureSpec())


def test_translation_orbit():
    trace = orbit(TRANSLATION, HPoint(0, 1), 5)
    assert trace.length == 5
    assert trace.points.tolist() == [complex(k, 1) for k in range(6)]
    assert trace.steps == pytest.approx([1 / math.sqrt(5)] * 5)
    assert trace.b_seq.tolist() == [1.0] * 5
    assert trace.y_ratio.tolist() == [1.0] * 5
    assert trace.stop_reason is StopReason.COMPLETED
    assert trace.valid
    assert trace.eval_tol == pytest.approx(2e-9)


def test_orbit_length_is_checked():
    with pytest.raises(ValueError, match="at least 1"):
        orbit(TRANSLATION, HPoint(0, 1), 0)


def test_ex1_orbit_climbs_imaginary_axis():
    trace = orbit(golden_map("ex1"), HPoint(0, 1), 2)
    assert trace.points == pytest.approx([1j, 1.5j, 1.9j], abs=1e-10)


def test_from_points_derived_sequences():
    trace = OrbitTrace.from_points([1j, 1 + 1j, 2 + 1j], 1e-10)
    assert trace.args == pytest.approx([math.pi / 2, math.pi / 4, math.atan(0.5)])
    assert trace.x_increments.tolist() == [1.0, 1.0]
    assert trace.z_ratio == pytest.approx([abs((1 + 1j) / 1j - 1), abs((2 + 1j) / (1 + 1j) - 1)])


def test_rows_leave_last_derived_values_empty():
    rows = list(orbit(TRANSLATION, HPoint(0, 1), 2).rows())
    assert len(rows) == 3
    assert all(len(row) == len(CSV_COLUMNS) for row in rows)
    assert rows[0][:3] == (0, 0.0, 1.0)
    assert rows[-1][3:6] == (None, None, None)
    assert rows[-1][6] == pytest.approx(math.atan2(1, 2))


def test_pommerenke_on_translation():
    estimate = pommerenke_b(orbit(TRANSLATION, HPoint(0, 1), 100))
    assert estimate.estimate == 1.0
    assert estimate.dispersion == 0.0
    assert estimate.converged


def test_pommerenke_needs_long_orbit():
    with pytest.raises(InvalidTraceError, match="at least 100"):
        pommerenke_b(orbit(TRANSLATION, HPoint(0, 1), 10))


def test_zero_step_orbit():
    trace = orbit(golden_map("ex1"), HPoint(0, 1), 200)
    assert trace.schwarz_pick_violations() == 0
    assert pommerenke_b(trace).estimate == pytest.approx(0.0, abs=1e-9)
    verdict = empirical_step(trace, zero_threshold=1e-2)
    assert verdict.verdict is EmpiricalOutcome.ZERO_HS
    assert verdict.y_diverging
    assert verdict.y_final > 10


def test_positive_step_orbit():
    verdict = empirical_step(orbit(TRANSLATION, HPoint(0, 1), 200))
    assert verdict.verdict is EmpiricalOutcome.POSITIVE_HS
    assert verdict.tangential is Tangential.TOWARD_ZERO
    assert verdict.d_tail == pytest.approx(1 / math.sqrt(5))
    assert verdict.drift_tail == 1.0
    assert verdict.y_ratio_tail == 1.0
    assert verdict.as_dict()["tangential"] == "toward_0"


def test_negative_translation_moves_toward_pi():
    verdict = empirical_step(orbit(ParabolicMap(-1.0, MeasureSpec()), HPoint(0, 1), 200))
    assert verdict.tangential is Tangential.TOWARD_PI


def test_plateau_window_is_checked():
    trace = orbit(TRANSLATION, HPoint(0, 1), 20)
    with pytest.raises(InvalidTraceError, match="plateau window"):
        empirical_step(trace, plateau_window=21)


def test_quadrature_failure_gives_partial_trace(monkeypatch):
    f = golden_map("ex1")
    original = ParabolicMap.image
    calls = 0

    def failing(self, z, tol=1e-10):
        nonlocal calls
        calls += 1
        if calls == 3:
            msg = "evaluation budget exhausted"
            raise QuadratureFailureError(msg)
        return original(self, z, tol)

    monkeypatch.setattr(ParabolicMap, "image", failing)
    trace = orbit(f, HPoint(0, 1), 10)
    assert trace.length == 2
    assert trace.stop_reason is StopReason.QUADRATURE_FAILURE
    assert not trace.valid
    with pytest.raises(InvalidTraceError):
        empirical_step(trace)
    with pytest.raises(InvalidTraceError, match="quadrature failed after 2 steps"):
        require_complete(trace)


def test_overflow_stops_orbit():
    trace = orbit(ParabolicMap(1e299, MeasureSpec()), HPoint(0, 1), 100)
    assert trace.stop_reason is StopReason.OVERFLOW
    assert trace.length < 100
    assert abs(trace.points[-1]) > 1e300
    assert np.all(np.isfinite(trace.steps))
    with pytest.raises(OrbitOverflowError):
        require_complete(trace)


def test_non_finite_image_stops_orbit():
    trace = orbit(ParabolicMap(1e308, MeasureSpec()), HPoint(1e308, 1), 10)
    assert trace.stop_reason is StopReason.OVERFLOW
    assert trace.length == 0
    assert trace.points.tolist() == [complex(1e308, 1)]


def random_map(rng: np.random.Generator) -> ParabolicMap:
    count = int(rng.integers(1, 4))
    components = [Atom(rng.uniform(-5, 5), rng.uniform(0.1, 2)) for _ in range(count)]
    if rng.random() < 0.5:
        center, width = rng.uniform(-3, 3), rng.uniform(0.5, 2)
        rho = parse(f"{rng.uniform(0.1, 1)!r}/(1+((t-({center!r}))/{width!r})^2)")
        components.append(DensityComponent(rho, -math.inf, math.inf, tail_neg=2.0, tail_pos=2.0))
    return ParabolicMap(float(rng.uniform(-2, 2)), MeasureSpec(tuple(components)))


def test_steps_never_increase_on_random_maps(rng):
    for _ in range(20):
        f = random_map(rng)
        z0 = HPoint(rng.uniform(-5, 5), rng.uniform(0.5, 3))
        trace = orbit(f, z0, 200)
        assert trace.stop_reason is StopReason.COMPLETED
        assert trace.schwarz_pick_violations() == 0
        assert np.all(np.diff(trace.steps) <= 1e-9)


def test_drift_probe_tends_to_balanced_beta(ex2):
    values = drift_probe(ex2.to_map(0.0), [1e2, 1e4, 1e6])
    assert values[-1].real == pytest.approx(-math.pi / 4, abs=1e-4)
    assert abs(values[-1] - (-math.pi / 4)) < abs(values[0] - (-math.pi / 4))


def test_angular_probe_limit(ex1):
    values = angular_probe(ex1.to_map(), [1e2, 1e4, 1e6])
    assert abs(values[-1] + 1) < 1e-3
    assert abs(angular_probe(ex1.to_map(1.0), [1e6])[0]) > 1e3


@pytest.mark.parametrize("grid", [[], [1.0, 1.0], [-1.0, 2.0]])
def test_probe_grid_is_checked(ex1, grid):
    with pytest.raises(ValueError, match="grid"):
        drift_probe(ex1.to_map(), grid)


def test_abel_residual_on_translation():
    residuals = abel_residual(TRANSLATION, HPoint(0, 2), HPoint(0, 1), 10)
    assert residuals.size == 11
    assert residuals.tolist() == [0.0] * 11


def test_abel_residual_arguments():
    with pytest.raises(ValueError, match="differ"):
        abel_residual(TRANSLATION, HPoint(0, 1), HPoint(0, 1), 10)
    with pytest.raises(ValueError, match="two steps"):
        abel_residual(TRANSLATION, HPoint(0, 2), HPoint(0, 1), 1)


@pytest.mark.slow
def test_abel_residual_decays(ex4):
    residuals = abel_residual(ex4.to_map(), HPoint(0, 2), HPoint(0, 1), 1000)
    assert residuals[1000] * 10 <= residuals[10]
