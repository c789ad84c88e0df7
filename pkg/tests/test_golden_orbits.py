"""Long orbits of the shipped closed-form maps."""

from __future__ import annotations

import functools

import pytest

from parastep.hstep.classify import agreement, classify
from parastep.hstep.const import Agreement
from parastep.hstep.dynamics import OrbitTrace, empirical_step, orbit, pommerenke_b
from parastep.hstep.halfplane import HPoint

from .conftest import GOLDEN_PAIRS, golden_map

pytestmark = pytest.mark.slow

LENGTH = 100_000
STARTS = ((0.0, 1.0), (1.0, 2.0), (-3.0, 0.5))
PAIRS = [(name, beta) for name, beta, _ in GOLDEN_PAIRS]


@functools.cache
def golden_orbit(name: str, beta: float, start: tuple[float, float]) -> OrbitTrace:
    return orbit(golden_map(name, beta), HPoint(*start), LENGTH)


def verdict_of(name: str, beta: float, start: tuple[float, float]) -> str:
    f = golden_map(name, beta)
    return empirical_step(golden_orbit(name, beta, start), t_l1=f.profile.t_l1).verdict.value


@pytest.mark.parametrize(("name", "beta", "expected"), GOLDEN_PAIRS)
def test_verdict_does_not_depend_on_start(name, beta, expected):
    assert [verdict_of(name, beta, start) for start in STARTS] == [expected] * len(STARTS)


@pytest.mark.parametrize(("name", "beta", "expected"), GOLDEN_PAIRS)
def test_pommerenke_dichotomy(name, beta, expected):
    f = golden_map(name, beta)
    trace = golden_orbit(name, beta, STARTS[0])
    empirical = empirical_step(trace, t_l1=f.profile.t_l1)
    assert agreement(classify(f), empirical) is Agreement.YES
    estimate = pommerenke_b(trace)
    if expected == "ZeroHS":
        assert abs(estimate.estimate) < 1e-3
    else:
        assert abs(estimate.estimate) > 1e-2
        assert estimate.converged


@pytest.mark.parametrize("start", STARTS)
@pytest.mark.parametrize(("name", "beta"), PAIRS)
def test_steps_never_increase(name, beta, start):
    trace = golden_orbit(name, beta, start)
    assert trace.length == LENGTH
    assert trace.schwarz_pick_violations() == 0


@pytest.mark.parametrize(("name", "beta", "expected"), GOLDEN_PAIRS)
def test_height_growth(name, beta, expected):
    ys = golden_orbit(name, beta, STARTS[0]).ys
    if expected == "ZeroHS":
        assert ys[LENGTH] > 100 * ys[0]
    elif golden_map(name, beta).profile.t_l1:
        assert ys[LENGTH] / ys[10_000] < 1.01


@pytest.mark.parametrize(("name", "beta"), PAIRS)
def test_consecutive_ratios_tend_to_one(name, beta):
    trace = golden_orbit(name, beta, STARTS[0])
    assert abs(trace.y_ratio[-1] - 1) < 1e-3
    assert trace.z_ratio[-1] < 1e-3
