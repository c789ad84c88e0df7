"""Tests for measures, moments and integrability profiles."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from parastep.hstep.const import Region
from parastep.hstep.exceptions import InvalidMeasureError
from parastep.hstep.exprparse import parse
from parastep.hstep.measure import (
    Atom,
    AtomTrain,
    DensityComponent,
    MeasureSpec,
    head_length,
    integrability_profile,
    moment,
    reflect,
    support_bounds,
    total_mass,
)

from .conftest import spec

GROWTH_RATIO = 0.5


def test_ex1_profile(ex1):
    profile = integrability_profile(ex1.measure)
    assert profile.mass == pytest.approx(0.5, rel=1e-10)
    assert profile.t_l1
    assert profile.moment1 == 0.0
    assert profile.moment1_exact
    assert profile.t2_pos_finite
    assert profile.t2_neg_finite
    assert profile.symmetric
    assert (profile.support_lower, profile.support_upper) == (None, None)
    assert float(moment(ex1.measure, 2, Region.ALL, absolute=False)) == pytest.approx(0.5)
    assert float(moment(ex1.measure, 1, Region.ALL, absolute=True)) == pytest.approx(1 / math.pi)


def test_ex2_profile(ex2):
    profile = integrability_profile(ex2.measure)
    assert profile.mass == pytest.approx(0.5 * math.log(2), rel=1e-10)
    assert profile.t_l1
    assert profile.moment1 == pytest.approx(math.pi / 4, rel=1e-15)
    assert profile.moment1_exact
    assert not profile.t2_pos_finite
    assert profile.t2_neg_finite
    assert profile.support_lower == 1.0
    assert profile.support_upper is None


def test_ex3_profile(ex3):
    profile = integrability_profile(ex3.measure)
    assert profile.mass == pytest.approx(math.tanh(1.0), rel=1e-9)
    assert not profile.t_l1
    assert profile.moment1 is None
    assert not profile.abs_t_neg_finite
    assert not profile.abs_t_pos_finite
    assert profile.symmetric


def test_ex4_profile(ex4):
    profile = integrability_profile(ex4.measure)
    assert profile.mass == pytest.approx(math.pi / 2, rel=1e-10)
    assert not profile.t_l1
    assert not profile.abs_t_neg_finite
    assert profile.abs_t_pos_finite
    assert profile.t2_pos_finite
    assert not profile.t2_neg_finite
    assert profile.support_upper == 0.0
    assert profile.as_dict()["t_L1"] is False


def test_signed_first_moment_by_quadrature(ex2):
    assert float(moment(ex2.measure, 1, Region.ALL, absolute=False)) == pytest.approx(
        math.pi / 4, rel=1e-9
    )


def test_divergent_signed_moment_is_infinite(ex4):
    value = moment(ex4.measure, 1, Region.ALL, absolute=False)
    assert not value.is_finite


def test_moment_order_is_checked(ex1):
    with pytest.raises(ValueError, match="order"):
        moment(ex1.measure, 3, Region.ALL, absolute=True)


def test_atom_at_zero_is_in_neither_half():
    m = MeasureSpec((Atom(0.0, 2.0), Atom(-1.0, 1.0)))
    assert float(moment(m, 0, Region.NEG, absolute=True)) == 1.0
    assert float(moment(m, 0, Region.POS, absolute=True)) == 0.0
    assert total_mass(m) == 3.0
    profile = integrability_profile(m)
    assert profile.moment1 == -1.0
    assert profile.moment1_exact


def test_finite_train():
    train = AtomTrain(1.0, 1.0, parse("t^-2"), decay=2.0, count=3)
    m = MeasureSpec((train,))
    assert total_mass(m) == pytest.approx(1 + 1 / 4 + 1 / 9)
    assert support_bounds(m) == (1.0, 3.0)
    assert integrability_profile(m).t2_pos_finite


def test_reflection_is_involution(ex2, ex3, ex4):
    for item in (ex2, ex3, ex4):
        assert reflect(reflect(item.measure)) == item.measure


def test_reflected_profile_mirrors(ex4):
    profile = integrability_profile(reflect(ex4.measure))
    assert profile.support_lower == 0.0
    assert profile.support_upper is None
    assert not profile.abs_t_pos_finite
    assert profile.t2_neg_finite
    assert profile.mass == pytest.approx(math.pi / 2, rel=1e-10)


def test_reflected_first_moment_changes_sign(ex2):
    profile = integrability_profile(reflect(ex2.measure))
    assert profile.moment1 == pytest.approx(-math.pi / 4)
    assert profile.moment1_exact


def test_head_length():
    assert head_length(10) == 1024
    assert head_length(1025) == 2048


@pytest.mark.parametrize(
    ("factory", "match"),
    [
        (lambda: Atom(0.0, 0.0), "positive"),
        (lambda: Atom(math.inf, 1.0), "not finite"),
        (lambda: DensityComponent(parse("t"), -1.0, 1.0), "negative"),
        (lambda: DensityComponent(parse("1/(1+t^2)"), 0.0, math.inf), "tail_pos is required"),
        (lambda: DensityComponent(parse("1/(1+t^2)"), 0.0, 1.0, tail_pos=2.0), "only allowed"),
        (
            lambda: DensityComponent(parse("1/(1+t^2)"), 0.0, math.inf, tail_pos=3.0),
            "does not behave",
        ),
        (lambda: DensityComponent(parse("0*t"), 0.0, 1.0), "vanishes"),
        (lambda: DensityComponent(parse("1"), 1.0, 1.0), "empty"),
        (lambda: DensityComponent(parse("log(t)"), -1.0, 1.0), "cannot be evaluated"),
        (
            lambda: DensityComponent(
                parse("1/((1+t^2)*t)"), 1.0, math.inf, tail_pos=3.0, first_moment=parse("1")
            ),
            "disagrees",
        ),
        (
            lambda: DensityComponent(
                parse("1/(1+t^2)"), 0.0, math.inf, tail_pos=2.0, first_moment=parse("1")
            ),
            "without a first moment",
        ),
        (lambda: AtomTrain(0.0, 0.0, parse("1"), decay=2.0, count=3), "non-zero step"),
        (lambda: AtomTrain(1.0, 1.0, parse("t^-1"), decay=1.0), "decay exponent"),
        (lambda: AtomTrain(1.0, 1.0, parse("t^-1.5"), decay=3.0), "decay slower"),
        (lambda: AtomTrain(-1.0, 1.0, parse("t"), decay=2.0, count=3), "not positive"),
    ],
)
def test_invalid_components(factory, match):
    with pytest.raises(InvalidMeasureError, match=match):
        factory()


def test_declared_symmetry_is_checked(ex4):
    with pytest.raises(InvalidMeasureError, match="mirror image"):
        MeasureSpec(ex4.measure.components, declared_symmetric=True)
    pair = MeasureSpec((Atom(1.0, 0.5), Atom(-1.0, 0.5)), declared_symmetric=True)
    assert integrability_profile(pair).moment1 == 0.0
    halves = MeasureSpec(
        (*ex4.measure.components, *reflect(ex4.measure).components), declared_symmetric=True
    )
    assert halves.declared_symmetric


def test_self_symmetric_density_has_exact_zero_moment(ex1):
    undeclared = MeasureSpec(ex1.measure.components, declared_symmetric=False)
    profile = integrability_profile(undeclared)
    assert profile.moment1 == 0.0
    assert profile.moment1_exact
    assert not profile.symmetric


def test_mirror_pairs_have_exact_moment():
    (density,) = spec("ambiguous").measure.components
    pair = MeasureSpec((density, *reflect(MeasureSpec((density,))).components, Atom(2.0, 0.25)))
    profile = integrability_profile(pair)
    assert profile.moment1 == 0.5
    assert profile.moment1_exact
    train = AtomTrain(1.0, 1.0, parse("t^-3"), decay=3.0, mirrored=True)
    assert integrability_profile(MeasureSpec((train, Atom(-1.0, 1.0)))).moment1 == -1.0


def test_unpaired_density_has_no_exact_moment():
    profile = integrability_profile(spec("ambiguous").measure)
    assert profile.moment1 == pytest.approx(math.pi / 4, rel=1e-9)
    assert not profile.moment1_exact


@pytest.mark.parametrize("name", ["ex1", "density_pair", "train"])
def test_symmetric_first_moment_vanishes(name, ex1):
    (density,) = spec("ambiguous").measure.components
    measures = {
        "ex1": ex1.measure,
        "density_pair": MeasureSpec((density, *reflect(MeasureSpec((density,))).components)),
        "train": MeasureSpec((AtomTrain(0.5, 1.0, parse("1/(1+t^2)^2"), decay=4.0, mirrored=True),)),
    }
    assert abs(float(moment(measures[name], 1, Region.ALL, absolute=False))) <= 1e-8


@pytest.mark.parametrize("name", ["ex1", "ex2", "ex3", "ex4", "vertical"])
def test_mass_is_sum_of_half_line_masses(name):
    m = spec(name).measure
    halves = float(moment(m, 0, Region.NEG, absolute=True)) + float(
        moment(m, 0, Region.POS, absolute=True)
    )
    assert total_mass(m) == pytest.approx(halves, rel=1e-9)


def _density_partial(a: float, k: int, radius: float) -> float:
    # substitute t = e^u to keep the integrand smooth over many decades
    def integrand(u: float) -> float:
        t = math.exp(u)
        return t ** (k + 1) * (1 + t * t) ** (-a / 2)

    head, _ = integrate.quad(lambda t: t**k * (1 + t * t) ** (-a / 2), 0.0, 1.0)
    tail, _ = integrate.quad(integrand, 0.0, math.log(radius), limit=200)
    return head + tail


def _train_partial(a: float, k: int, count: int) -> float:
    ts = np.arange(1.0, count + 1.0)
    return float(np.sum(ts ** (k - a)))


def _diverges(partial_small: float, partial_large: float) -> bool:
    return (partial_large - partial_small) / partial_small > GROWTH_RATIO


DENSITY_CASES = [(a, k) for a in (1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5) for k in (1, 2)]
TRAIN_CASES = [(a, k) for a in (2.0, 3.0, 4.0) for k in (1, 2)]


@pytest.mark.parametrize(("a", "k"), DENSITY_CASES)
def test_density_moment_decision_matches_partial_sums(a, k):
    component = DensityComponent(parse(f"(1+t^2)^(-{a}/2)"), 0.0, math.inf, tail_pos=a)
    analytic = moment(MeasureSpec((component,)), k, Region.POS, absolute=True).is_finite
    diverges = _diverges(_density_partial(a, k, 1e3), _density_partial(a, k, 1e6))
    assert analytic is not diverges


@pytest.mark.parametrize(("a", "k"), TRAIN_CASES)
def test_train_moment_decision_matches_partial_sums(a, k):
    train = AtomTrain(1.0, 1.0, parse(f"t^-{a}"), decay=a)
    analytic = moment(MeasureSpec((train,)), k, Region.POS, absolute=True).is_finite
    diverges = _diverges(_train_partial(a, k, 10**3), _train_partial(a, k, 10**6))
    assert analytic is not diverges
