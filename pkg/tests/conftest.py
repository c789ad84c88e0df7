"""Shared fixtures: the shipped map specs and their closed forms."""

from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from parastep.hstep.exprparse import Binary, BinaryOp, Constant
from parastep.hstep.herglotz import ParabolicMap
from parastep.hstep.measure import Atom, AtomTrain, DensityComponent, MeasureSpec
from parastep.spec_file import MapSpecFile, load_spec

MAPS_DIR = Path(__file__).parent.parent / "config" / "maps"

# integral part f(z) - z - beta of each golden map
CLOSED_FORMS = {
    "ex1": lambda z: -1 / (z + 1j),
    "ex2": lambda z: -np.log(1 - z) / z - math.pi / 4,
    "ex3": np.tan,
    "ex4": np.log,
}

GOLDEN_PAIRS = [
    ("ex1", 0.0, "ZeroHS"),
    ("ex1", 0.5, "PositiveHS"),
    ("ex1", -0.5, "PositiveHS"),
    ("ex2", 0.0, "PositiveHS"),
    ("ex2", math.pi / 4, "ZeroHS"),
    ("ex2", 1.0, "ZeroHS"),
    ("ex3", -5.0, "ZeroHS"),
    ("ex3", 0.0, "ZeroHS"),
    ("ex3", 2.0, "ZeroHS"),
    ("ex4", -2.0, "PositiveHS"),
    ("ex4", 0.0, "PositiveHS"),
    ("ex4", 7.0, "PositiveHS"),
]


def spec(name: str) -> MapSpecFile:
    """Load a shipped map spec."""
    return load_spec(MAPS_DIR / f"{name}.json")


def golden_map(name: str, beta: float | None = None) -> ParabolicMap:
    """Build a shipped map, optionally with another beta."""
    return spec(name).to_map(beta)


def scaled_measure(m: MeasureSpec, factor: float) -> MeasureSpec:
    """Return factor * m, scaling expression weights with a product node."""

    def times(expr):
        return None if expr is None else Binary(BinaryOp.MUL, Constant(factor), expr)

    components = []
    for component in m.components:
        match component:
            case Atom(t=t, w=w):
                components.append(Atom(t, w * factor))
            case AtomTrain():
                components.append(replace(component, weight=times(component.weight)))
            case DensityComponent():
                components.append(
                    replace(
                        component,
                        rho=times(component.rho),
                        first_moment=times(component.first_moment),
                    )
                )
    return MeasureSpec(tuple(components), declared_symmetric=m.declared_symmetric)


@pytest.fixture(scope="session")
def ex1() -> MapSpecFile:
    return spec("ex1")


@pytest.fixture(scope="session")
def ex2() -> MapSpecFile:
    return spec("ex2")


@pytest.fixture(scope="session")
def ex3() -> MapSpecFile:
    return spec("ex3")


@pytest.fixture(scope="session")
def ex4() -> MapSpecFile:
    return spec("ex4")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
