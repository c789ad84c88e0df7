"""
Map spec files.

A map spec is a JSON document::

    {
      "beta": "pi/4",
      "symmetric": false,
      "measure": [
        {"type": "atom", "t": 1, "w": 0.5},
        {"type": "train", "t0": "pi/2", "step": "pi", "count": "inf",
         "weight": "1/(1+t^2)", "decay": 2, "mirrored": true},
        {"type": "density", "expr": "1/((1+t^2)*t)", "support": [1, "+inf"],
         "tail_pos": 3, "moment1": "pi/4"}
      ]
    }

Numbers may be constant expressions. Errors carry the path of the
offending field, for example ``measure[1].weight``.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import voluptuous as vol

from .const import (
    COMPONENT_ATOM,
    COMPONENT_DENSITY,
    COMPONENT_TRAIN,
    CONF_BETA,
    CONF_COUNT,
    CONF_DECAY,
    CONF_EXPR,
    CONF_MEASURE,
    CONF_MIRRORED,
    CONF_MOMENT1,
    CONF_STEP,
    CONF_SUPPORT,
    CONF_SYMMETRIC,
    CONF_T,
    CONF_T0,
    CONF_TAIL_NEG,
    CONF_TAIL_POS,
    CONF_TYPE,
    CONF_W,
    CONF_WEIGHT,
    INFINITE_COUNT,
    NEG_INFINITY,
    POS_INFINITY,
)
from .hstep.exceptions import HStepError, InvalidMeasureError
from .hstep.exprparse import Expr, constant_value, has_variable, parse
from .hstep.herglotz import ParabolicMap
from .hstep.measure import Atom, AtomTrain, Component, DensityComponent, MeasureSpec

_LOGGER = logging.getLogger(__name__)


class SpecFileError(HStepError):
    """Raised when a map spec file cannot be turned into a map."""

    def __init__(self, field_path: str, reason: str) -> None:
        """Initialize the exception."""
        super().__init__(f"{field_path}: {reason}" if field_path else reason)
        self.field_path = field_path
        self.reason = reason


def number(value: Any) -> float:
    """Accept a finite number or a constant expression such as "pi/4"."""
    if isinstance(value, bool):
        raise vol.Invalid("expected a number")
    if isinstance(value, int | float):
        result = float(value)
    elif isinstance(value, str):
        try:
            result = constant_value(value)
        except HStepError as ex:
            raise vol.Invalid(str(ex)) from ex
    else:
        raise vol.Invalid("expected a number or a constant expression")
    if not math.isfinite(result):
        raise vol.Invalid("expected a finite number")
    return result


def expression(value: Any) -> Expr:
    """Accept an expression in t."""
    if not isinstance(value, str):
        raise vol.Invalid("expected an expression string")
    try:
        return parse(value)
    except HStepError as ex:
        raise vol.Invalid(str(ex)) from ex


def constant_expression(value: Any) -> Expr:
    """Accept an expression without t, kept symbolic."""
    if isinstance(value, int | float) and not isinstance(value, bool):
        value = repr(float(value))
    expr = expression(value)
    if has_variable(expr):
        raise vol.Invalid("expected a constant expression")
    return expr


def _bound(sign: float) -> Any:
    names = NEG_INFINITY if sign < 0 else POS_INFINITY
    return vol.Any(vol.All(vol.In(names), lambda _: math.copysign(math.inf, sign)), number)


ATOM_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_TYPE): COMPONENT_ATOM,
        vol.Required(CONF_T): number,
        vol.Required(CONF_W): number,
    }
)

TRAIN_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_TYPE): COMPONENT_TRAIN,
        vol.Required(CONF_T0): number,
        vol.Required(CONF_STEP): number,
        vol.Optional(CONF_COUNT, default=INFINITE_COUNT): vol.Any(
            INFINITE_COUNT, vol.All(int, vol.Range(min=1))
        ),
        vol.Required(CONF_WEIGHT): expression,
        vol.Required(CONF_DECAY): number,
        vol.Optional(CONF_MIRRORED, default=False): bool,
    }
)

DENSITY_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_TYPE): COMPONENT_DENSITY,
        vol.Required(CONF_EXPR): expression,
        vol.Required(CONF_SUPPORT): vol.ExactSequence([_bound(-1.0), _bound(1.0)]),
        vol.Optional(CONF_TAIL_NEG): number,
        vol.Optional(CONF_TAIL_POS): number,
        vol.Optional(CONF_MOMENT1): constant_expression,
    }
)

COMPONENT_SCHEMAS: dict[str, vol.Schema] = {
    COMPONENT_ATOM: ATOM_SCHEMA,
    COMPONENT_TRAIN: TRAIN_SCHEMA,
    COMPONENT_DENSITY: DENSITY_SCHEMA,
}

MAP_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_BETA): number,
        vol.Optional(CONF_MEASURE, default=list): [dict],
        vol.Optional(CONF_SYMMETRIC, default=False): bool,
    }
)


def field_path(path: list[Any]) -> str:
    """Render a voluptuous error path as ``measure[1].weight``."""
    text = ""
    for part in path:
        if isinstance(part, int):
            text += f"[{part}]"
        else:
            text += f".{part}" if text else str(part)
    return text


def _validated(schema: vol.Schema, data: Any, prefix: list[Any]) -> dict[str, Any]:
    try:
        return schema(data)
    except vol.MultipleInvalid as ex:
        error = ex.errors[0]
        raise SpecFileError(field_path(prefix + list(error.path)), error.msg) from ex


def _component(data: dict[str, Any], index: int) -> Component:
    prefix: list[Any] = [CONF_MEASURE, index]
    kind = data.get(CONF_TYPE)
    if kind not in COMPONENT_SCHEMAS:
        raise SpecFileError(
            field_path([*prefix, CONF_TYPE]),
            f"expected one of {', '.join(COMPONENT_SCHEMAS)}",
        )
    record = _validated(COMPONENT_SCHEMAS[kind], data, prefix)
    try:
        match kind:
            case "atom":
                return Atom(record[CONF_T], record[CONF_W])
            case "train":
                count = record[CONF_COUNT]
                return AtomTrain(
                    t0=record[CONF_T0],
                    step=record[CONF_STEP],
                    weight=record[CONF_WEIGHT],
                    decay=record[CONF_DECAY],
                    count=None if count == INFINITE_COUNT else count,
                    mirrored=record[CONF_MIRRORED],
                )
            case _:
                lower, upper = record[CONF_SUPPORT]
                return DensityComponent(
                    rho=record[CONF_EXPR],
                    lower=lower,
                    upper=upper,
                    tail_pos=record.get(CONF_TAIL_POS),
                    tail_neg=record.get(CONF_TAIL_NEG),
                    first_moment=record.get(CONF_MOMENT1),
                )
    except InvalidMeasureError as ex:
        raise SpecFileError(field_path(prefix), str(ex)) from ex


@dataclass(frozen=True, slots=True)
class MapSpecFile:
    """A parsed map spec: beta and the measure."""

    beta: float
    measure: MeasureSpec

    def to_map(self, beta: float | None = None) -> ParabolicMap:
        """Build the map, optionally with beta overridden."""
        return ParabolicMap(self.beta if beta is None else beta, self.measure)

    def as_dict(self) -> dict[str, Any]:
        """Return the JSON form; it parses back to an equal spec."""
        return {
            CONF_BETA: self.beta,
            CONF_SYMMETRIC: self.measure.declared_symmetric,
            CONF_MEASURE: [_dump_component(c) for c in self.measure.components],
        }


def _dump_bound(value: float) -> float | str:
    if value == math.inf:
        return POS_INFINITY[0]
    if value == -math.inf:
        return NEG_INFINITY[0]
    return value


def _dump_component(component: Component) -> dict[str, Any]:
    match component:
        case Atom(t=t, w=w):
            return {CONF_TYPE: COMPONENT_ATOM, CONF_T: t, CONF_W: w}
        case AtomTrain():
            return {
                CONF_TYPE: COMPONENT_TRAIN,
                CONF_T0: component.t0,
                CONF_STEP: component.step,
                CONF_COUNT: INFINITE_COUNT if component.count is None else component.count,
                CONF_WEIGHT: str(component.weight),
                CONF_DECAY: component.decay,
                CONF_MIRRORED: component.mirrored,
            }
        case DensityComponent():
            record: dict[str, Any] = {
                CONF_TYPE: COMPONENT_DENSITY,
                CONF_EXPR: str(component.rho),
                CONF_SUPPORT: [_dump_bound(component.lower), _dump_bound(component.upper)],
            }
            if component.tail_neg is not None:
                record[CONF_TAIL_NEG] = component.tail_neg
            if component.tail_pos is not None:
                record[CONF_TAIL_POS] = component.tail_pos
            if component.first_moment is not None:
                record[CONF_MOMENT1] = str(component.first_moment)
            return record
    msg = f"Unknown component {component!r}"
    raise TypeError(msg)


def parse_spec(data: Any) -> MapSpecFile:
    """Validate a decoded JSON document and build the spec."""
    if not isinstance(data, dict):
        raise SpecFileError("", "expected a JSON object")
    record = _validated(MAP_SCHEMA, data, [])
    components = tuple(
        _component(item, index) for index, item in enumerate(record[CONF_MEASURE])
    )
    try:
        measure = MeasureSpec(components, declared_symmetric=record[CONF_SYMMETRIC])
    except InvalidMeasureError as ex:
        raise SpecFileError(CONF_SYMMETRIC, str(ex)) from ex
    return MapSpecFile(record[CONF_BETA], measure)


def load_spec(path: str | Path) -> MapSpecFile:
    """Read and validate a map spec file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as ex:
        raise SpecFileError("", f"cannot read {path}: {ex.strerror}") from ex
    try:
        data = json.loads(text)
    except json.JSONDecodeError as ex:
        raise SpecFileError("", f"invalid JSON at line {ex.lineno}, column {ex.colno}") from ex
    spec = parse_spec(data)
    _LOGGER.debug("Loaded %s: beta=%s, %d components", path, spec.beta, len(spec.measure.components))
    return spec
