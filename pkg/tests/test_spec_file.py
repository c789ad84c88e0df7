"""Tests for map spec files."""

from __future__ import annotations

import json
import math

import pytest
import voluptuous as vol

from parastep.hstep.measure import Atom, AtomTrain, DensityComponent
from parastep.spec_file import SpecFileError, field_path, load_spec, number, parse_spec

from .conftest import MAPS_DIR, spec

SHIPPED = sorted(path.stem for path in MAPS_DIR.glob("*.json"))


def test_all_shipped_specs_load():
    assert SHIPPED == ["ambiguous", "ex1", "ex2", "ex3", "ex4", "translation", "vertical"]


@pytest.mark.parametrize("name", SHIPPED)
def test_dump_parses_back(name):
    original = spec(name)
    assert parse_spec(json.loads(json.dumps(original.as_dict()))) == original


def test_ex2_fields():
    ex2 = spec("ex2")
    (density,) = ex2.measure.components
    assert isinstance(density, DensityComponent)
    assert (density.lower, density.upper) == (1.0, math.inf)
    assert density.tail_pos == 3.0
    assert density.declared_first_moment == math.pi / 4
    assert spec("ambiguous").beta == math.pi / 4


def test_ex3_train():
    (train,) = spec("ex3").measure.components
    assert isinstance(train, AtomTrain)
    assert train.t0 == math.pi / 2
    assert train.step == math.pi
    assert train.count is None
    assert train.mirrored


def test_atoms_and_finite_train():
    parsed = parse_spec(
        {
            "beta": "1/2",
            "measure": [
                {"type": "atom", "t": -1, "w": "pi"},
                {"type": "train", "t0": 1, "step": 2, "count": 3, "weight": "1/t", "decay": 1},
            ],
        }
    )
    assert parsed.beta == 0.5
    assert parsed.measure.components[0] == Atom(-1.0, math.pi)
    assert parsed.measure.components[1].count == 3
    assert not parsed.measure.declared_symmetric


@pytest.mark.parametrize(
    ("data", "path"),
    [
        ({"beta": "pi/"}, "beta"),
        ({"measure": []}, "beta"),
        ({"beta": True}, "beta"),
        ({"beta": 0, "measure": [{"type": "blob"}]}, "measure[0].type"),
        (
            {
                "beta": 0,
                "measure": [
                    {"type": "atom", "t": 0, "w": 1},
                    {"type": "train", "t0": 1, "step": 1, "weight": "1/(", "decay": 2},
                ],
            },
            "measure[1].weight",
        ),
        ({"beta": 0, "measure": [{"type": "atom", "t": 1}]}, "measure[0].w"),
        ({"beta": 0, "measure": [{"type": "atom", "t": 1, "w": -1}]}, "measure[0]"),
        (
            {"beta": 0, "measure": [{"type": "density", "expr": "t", "support": [-1, 1]}]},
            "measure[0]",
        ),
        (
            {
                "beta": 0,
                "symmetric": True,
                "measure": [{"type": "atom", "t": 1, "w": 1}],
            },
            "symmetric",
        ),
        ([], ""),
    ],
)
def test_errors_name_the_field(data, path):
    with pytest.raises(SpecFileError) as info:
        parse_spec(data)
    assert info.value.field_path == path


def test_unreadable_and_malformed_files(tmp_path):
    with pytest.raises(SpecFileError, match="cannot read"):
        load_spec(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text('{"beta": 0,', encoding="utf-8")
    with pytest.raises(SpecFileError, match="invalid JSON at line 1"):
        load_spec(broken)


def test_number_validator():
    assert number("2*pi") == 2 * math.pi
    assert number(3) == 3.0
    for bad in (True, None, "t", "1/0"):
        with pytest.raises(vol.Invalid):
            number(bad)


def test_field_path():
    assert field_path(["measure", 2, "support", 1]) == "measure[2].support[1]"
    assert field_path([]) == ""
