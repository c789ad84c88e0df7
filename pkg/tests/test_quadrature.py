"""Tests for the adaptive quadrature and series summation."""

from __future__ import annotations

import math

import numpy as np
import pytest

from parastep.hstep.exceptions import QuadratureFailureError
from parastep.hstep.quadrature import (
    current_budget,
    eval_budget,
    integrate,
    integrate_line,
    sum_series,
)


def test_finite_interval():
    result = integrate(np.sin, 0.0, math.pi, rtol=1e-12)
    assert result.value == pytest.approx(2.0, rel=1e-12)
    assert result.error <= 1e-11
    assert result.evaluations > 0


def test_reversed_limits_change_sign():
    assert integrate(np.cos, 0.5, 0.0).value == pytest.approx(-math.sin(0.5))


def test_complex_integrand():
    result = integrate(lambda t: np.exp(1j * t), 0.0, math.pi)
    assert result.value == pytest.approx(2j)


def test_infinite_limits_need_line_integral():
    with pytest.raises(ValueError, match="Finite limits"):
        integrate(np.sin, 0.0, math.inf)


def test_cauchy_density_on_line():
    result = integrate_line(
        lambda t: 1 / (1 + t * t), -math.inf, math.inf, center=0.0, scale=1.0, atol=1e-12
    )
    assert result.value == pytest.approx(math.pi, rel=1e-11)


def test_slow_tail_uses_algebraic_substitution():
    result = integrate_line(
        lambda t: t**-1.5, 1.0, math.inf, center=1.0, scale=1.0, atol=1e-10, decay_pos=1.5
    )
    assert result.value == pytest.approx(2.0, rel=1e-8)


def test_line_integral_rejects_bad_scale():
    with pytest.raises(ValueError, match="scale"):
        integrate_line(np.sin, 0.0, 1.0, center=0.0, scale=0.0)


def test_series_sum():
    def term(k):
        return 1.0 / (np.asarray(k, dtype=float) + 1.0) ** 2

    result = sum_series(
        lambda n: term(np.arange(n)), term, terms=64, atol=1e-12, decay=2.0
    )
    assert result.value == pytest.approx(math.pi**2 / 6, abs=1e-10)


def test_budget_exhaustion():
    with eval_budget(100), pytest.raises(QuadratureFailureError) as info:
        integrate(lambda t: np.sqrt(np.abs(t - 0.3)), 0.0, 1.0, rtol=1e-12)
    assert info.value.evaluations <= 100
    assert math.isfinite(info.value.error)


def test_budget_is_scoped():
    before = current_budget()
    with eval_budget(5000):
        assert current_budget() == 5000
    assert current_budget() == before
    with pytest.raises(ValueError, match="positive"), eval_budget(0):
        pass


def test_non_finite_integrand():
    with pytest.raises(QuadratureFailureError, match="non-finite"):
        integrate(lambda t: np.where(t > 0.9, np.inf, 1.0), 0.0, 1.0)
