"""
Command line front end.

    parastep classify|orbit|probe|validate|profile <spec.json> [flags]

Results go to stdout as JSON or CSV, logging goes to stderr. Run settings are
resolved from built-in defaults, then the ``run:`` block of the YAML config,
then flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from functools import cache
from pathlib import Path
from typing import TYPE_CHECKING, Any, NoReturn

import colorlog
import numpy as np
import voluptuous as vol
import yaml

from .const import (
    APP_NAME,
    CONF_DEFAULT,
    CONF_EPS_BETA,
    CONF_EVAL_BUDGET,
    CONF_LOGGER,
    CONF_LOGS,
    CONF_N,
    CONF_OUTPUT,
    CONF_PLATEAU_WINDOW,
    CONF_RUN,
    CONF_TOL,
    CONF_Z0,
    CONF_ZERO_THRESHOLD,
    DEFAULT_ABEL_Z,
    DEFAULT_CONFIG_PATH,
    DEFAULT_GRID,
    DEFAULT_N,
    DEFAULT_OUTPUT,
    DEFAULT_Z0,
    ENV_EVAL_BUDGET,
    LOG_FORMAT,
    PROBE_ABEL,
    PROBE_ANGULAR,
    PROBE_KINDS,
    ExitCode,
)
from .hstep import __version__
from .hstep.classify import classify, cross_validate
from .hstep.const import (
    DEFAULT_EPS_BETA,
    DEFAULT_EVAL_BUDGET,
    DEFAULT_ORBIT_TOL,
    DEFAULT_ZERO_THRESHOLD,
    Agreement,
    Verdict,
)
from .hstep.dynamics import (
    CSV_COLUMNS,
    abel_residual,
    angular_probe,
    drift_probe,
    empirical_step,
    orbit,
    pommerenke_b,
)
from .hstep.exceptions import (
    HStepError,
    InvalidMeasureError,
    InvalidTraceError,
    NotHalfLineError,
    NotL1Error,
    OutsideHalfPlaneError,
    QuadratureFailureError,
)
from .hstep.halfplane import HPoint
from .hstep.herglotz import predicted_angular_limit
from .hstep.measure import integrability_profile
from .hstep.quadrature import eval_budget
from .output import open_output, write_csv, write_json
from .spec_file import MapSpecFile, SpecFileError, load_spec, number

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

_LOGGER = logging.getLogger(__name__)

TRANSLATIONS = Path(__file__).parent / "translations" / "en.json"
LOG_LEVELS = ("debug", "info", "warning", "error", "critical")


class UsageError(HStepError):
    """Raised for invalid flags or run settings."""

    def __init__(self, reason: str) -> None:
        """Initialize the exception."""
        super().__init__(reason)
        self.reason = reason


class _ArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting with status 2."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def point(value: Any) -> HPoint:
    """Accept "x,y" or [x, y] with constant expressions for x and y."""
    if isinstance(value, HPoint):
        return value
    if isinstance(value, str):
        value = value.split(",")
    if not isinstance(value, list | tuple) or len(value) != 2:  # noqa: PLR2004
        raise vol.Invalid("expected a point x,y")
    try:
        return HPoint(number(value[0]), number(value[1]))
    except OutsideHalfPlaneError as ex:
        raise vol.Invalid(str(ex)) from ex


def _positive(value: Any) -> float:
    result = number(value)
    if not result > 0:
        raise vol.Invalid("expected a positive number")
    return result


def _non_negative(value: Any) -> float:
    result = number(value)
    if result < 0:
        raise vol.Invalid("expected a non-negative number")
    return result


RUN_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_Z0): point,
        vol.Required(CONF_N): vol.All(int, vol.Range(min=1)),
        vol.Required(CONF_TOL): _positive,
        vol.Required(CONF_EPS_BETA): _non_negative,
        vol.Required(CONF_ZERO_THRESHOLD): _positive,
        vol.Required(CONF_PLATEAU_WINDOW): vol.Any(None, vol.All(int, vol.Range(min=1))),
        vol.Required(CONF_OUTPUT): str,
        vol.Required(CONF_EVAL_BUDGET): vol.All(vol.Coerce(int), vol.Range(min=1)),
    }
)

LOGGER_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_DEFAULT, default="warning"): vol.All(str, vol.Lower, vol.In(LOG_LEVELS)),
        vol.Optional(CONF_LOGS, default=dict): {str: vol.All(str, vol.Lower, vol.In(LOG_LEVELS))},
    }
)

CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_LOGGER, default=dict): LOGGER_SCHEMA,
        vol.Optional(CONF_RUN, default=dict): dict,
    },
    extra=vol.ALLOW_EXTRA,
)


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Fully resolved settings of one run."""

    z0: HPoint
    n: int
    tol: float
    eps_beta: float
    zero_threshold: float
    plateau_window: int | None
    output: str
    eval_budget: int

    def as_dict(self) -> dict[str, Any]:
        """Return the settings as echoed in JSON output."""
        return {
            CONF_Z0: {"x": self.z0.x, "y": self.z0.y},
            CONF_N: self.n,
            CONF_TOL: self.tol,
            CONF_EPS_BETA: self.eps_beta,
            CONF_ZERO_THRESHOLD: self.zero_threshold,
            CONF_PLATEAU_WINDOW: self.plateau_window,
            CONF_OUTPUT: self.output,
            CONF_EVAL_BUDGET: self.eval_budget,
        }


def _invalid(ex: vol.MultipleInvalid, section: str) -> UsageError:
    error = ex.errors[0]
    where = ".".join(str(part) for part in [section, *error.path])
    return UsageError(f"{where}: {error.msg}")


def load_config(path: str | None) -> dict[str, Any]:
    """Read the YAML config, or the default file when present."""
    if path is None:
        if not Path(DEFAULT_CONFIG_PATH).is_file():
            return CONFIG_SCHEMA({})
        path = DEFAULT_CONFIG_PATH
    try:
        with Path(path).open(encoding="utf-8") as stream:
            data = yaml.safe_load(stream) or {}
    except OSError as ex:
        msg = f"cannot read config {path}: {ex.strerror}"
        raise UsageError(msg) from ex
    except yaml.YAMLError as ex:
        msg = f"invalid YAML in {path}: {ex}"
        raise UsageError(msg) from ex
    try:
        return CONFIG_SCHEMA(data)
    except vol.MultipleInvalid as ex:
        raise _invalid(ex, "config") from ex


def resolve_run_config(
    file_settings: dict[str, Any], flags: dict[str, Any], environ: dict[str, str] | None = None
) -> RunConfig:
    """Merge defaults, config file settings, the environment and flags."""
    environ = os.environ if environ is None else environ
    settings: dict[str, Any] = {
        CONF_Z0: list(DEFAULT_Z0),
        CONF_N: DEFAULT_N,
        CONF_TOL: DEFAULT_ORBIT_TOL,
        CONF_EPS_BETA: DEFAULT_EPS_BETA,
        CONF_ZERO_THRESHOLD: DEFAULT_ZERO_THRESHOLD,
        CONF_PLATEAU_WINDOW: None,
        CONF_OUTPUT: DEFAULT_OUTPUT,
        CONF_EVAL_BUDGET: DEFAULT_EVAL_BUDGET,
    }
    settings.update(file_settings)
    if (budget := environ.get(ENV_EVAL_BUDGET)) is not None:
        settings[CONF_EVAL_BUDGET] = budget
    settings.update({key: value for key, value in flags.items() if value is not None})
    try:
        resolved = RUN_SCHEMA(settings)
    except vol.MultipleInvalid as ex:
        raise _invalid(ex, CONF_RUN) from ex
    return RunConfig(**resolved)


def setup_logging(logger_config: dict[str, Any], level: str | None = None) -> None:
    """Send logging to stderr through a colored formatter."""
    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(LOG_FORMAT))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel((level or logger_config[CONF_DEFAULT]).upper())
    for name, module_level in logger_config[CONF_LOGS].items():
        logging.getLogger(name).setLevel(module_level.upper())


@cache
def _catalogue() -> dict[str, str]:
    with TRANSLATIONS.open(encoding="utf-8") as stream:
        return json.load(stream)["error"]


_ERROR_KEYS: tuple[tuple[type[HStepError], str], ...] = (
    (SpecFileError, "spec_file"),
    (UsageError, "usage"),
    (InvalidMeasureError, "invalid_measure"),
    (QuadratureFailureError, "quadrature_failure"),
    (NotL1Error, "not_l1"),
    (NotHalfLineError, "not_half_line"),
    (InvalidTraceError, "invalid_trace"),
)


def error_message(ex: HStepError) -> str:
    """Render an error through the string catalogue."""
    key = next((key for kind, key in _ERROR_KEYS if isinstance(ex, kind)), "generic")
    return _catalogue()[key].format(
        reason=getattr(ex, "reason", str(ex)),
        field=getattr(ex, "field_path", ""),
        message=str(ex),
    )


def _beta(args: argparse.Namespace, spec: MapSpecFile) -> float:
    if args.beta is None:
        return spec.beta
    try:
        return number(args.beta)
    except vol.Invalid as ex:
        msg = f"--beta: {ex.msg}"
        raise UsageError(msg) from ex


def cmd_classify(args: argparse.Namespace, config: RunConfig) -> ExitCode:
    """Print the analytic classification."""
    spec = load_spec(args.spec)
    result = classify(spec.to_map(_beta(args, spec)), config.eps_beta)
    write_json({**result.as_dict(), "config": config.as_dict()})
    return ExitCode.UNDECIDED if result.verdict is Verdict.UNKNOWN else ExitCode.OK


def cmd_orbit(args: argparse.Namespace, config: RunConfig) -> ExitCode:
    """Write the orbit CSV and print its empirical summary."""
    spec = load_spec(args.spec)
    f = spec.to_map(_beta(args, spec))
    trace = orbit(f, config.z0, config.n, config.tol)
    csv_path = args.csv or f"{config.output}_orbit.csv"
    with open_output(csv_path) as stream:
        write_csv(CSV_COLUMNS, trace.rows(), stream)
    verdict = empirical_step(
        trace, config.zero_threshold, config.plateau_window, t_l1=f.profile.t_l1
    )
    summary: dict[str, Any] = {
        "empirical": verdict.as_dict(),
        "length": trace.length,
        "stop_reason": trace.stop_reason.value,
        "schwarz_pick_violations": trace.schwarz_pick_violations(),
        "csv": csv_path,
        "config": config.as_dict(),
    }
    if trace.length >= 100:  # noqa: PLR2004
        estimate = pommerenke_b(trace)
        summary["pommerenke"] = {
            "estimate": estimate.estimate,
            "dispersion": estimate.dispersion,
            "converged": estimate.converged,
        }
    write_json(summary)
    return ExitCode.OK


def _grid(text: str) -> np.ndarray:
    try:
        low, high, count = text.split(",")
        ymin, ymax, points = number(low), number(high), int(count)
    except (ValueError, vol.Invalid) as ex:
        msg = f"--grid expects ymin,ymax,points, got {text!r}"
        raise UsageError(msg) from ex
    if not 0 < ymin < ymax or points < 2:  # noqa: PLR2004
        msg = f"--grid needs 0 < ymin < ymax and at least 2 points, got {text!r}"
        raise UsageError(msg)
    return np.logspace(np.log10(ymin), np.log10(ymax), points)


def cmd_probe(args: argparse.Namespace, config: RunConfig) -> ExitCode:
    """Write angular, drift or Abel residual probe values as CSV."""
    spec = load_spec(args.spec)
    f = spec.to_map(_beta(args, spec))
    if args.kind == PROBE_ABEL:
        try:
            z = point(args.z or list(DEFAULT_ABEL_Z))
        except vol.Invalid as ex:
            msg = f"--z: {ex.msg}"
            raise UsageError(msg) from ex
        residuals = abel_residual(f, z, config.z0, config.n, config.tol)
        header: tuple[str, ...] = ("k", "residual")
        rows: list[tuple[Any, ...]] = [(k, float(r)) for k, r in enumerate(residuals)]
    else:
        ys = _grid(args.grid or ",".join(str(v) for v in DEFAULT_GRID))
        if args.kind == PROBE_ANGULAR:
            _LOGGER.info("Predicted angular limit: %s", predicted_angular_limit(f, config.eps_beta))
            values = angular_probe(f, ys)
        else:
            values = drift_probe(f, ys)
        header = ("y", "re", "im")
        rows = [(float(y), float(v.real), float(v.imag)) for y, v in zip(ys, values, strict=True)]
    with open_output(args.csv) as stream:
        write_csv(header, rows, stream)
    return ExitCode.OK


def cmd_validate(args: argparse.Namespace, config: RunConfig) -> ExitCode:
    """Compare the analytic verdict with an orbit and print the report."""
    spec = load_spec(args.spec)
    report = cross_validate(
        spec.to_map(_beta(args, spec)),
        config.z0,
        config.n,
        tol=config.tol,
        eps_beta=config.eps_beta,
        zero_threshold=config.zero_threshold,
        plateau_window=config.plateau_window,
    )
    write_json({**report.as_dict(), "config": config.as_dict()})
    match report.agree:
        case Agreement.YES:
            return ExitCode.OK
        case Agreement.NO:
            return ExitCode.DISAGREE
    return ExitCode.UNDECIDED


def cmd_profile(args: argparse.Namespace, config: RunConfig) -> ExitCode:
    """Print the integrability profile of the measure."""
    spec = load_spec(args.spec)
    profile = integrability_profile(spec.measure)
    write_json({**profile.as_dict(), "config": config.as_dict()})
    return ExitCode.OK


COMMANDS: dict[str, Callable[[argparse.Namespace, RunConfig], ExitCode]] = {
    "classify": cmd_classify,
    "orbit": cmd_orbit,
    "probe": cmd_probe,
    "validate": cmd_validate,
    "profile": cmd_profile,
}


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one sub-command per operation."""
    common = _ArgumentParser(add_help=False)
    common.add_argument("spec", help="map spec JSON file")
    common.add_argument("--config", help=f"YAML run config (default {DEFAULT_CONFIG_PATH})")
    common.add_argument("--beta", help="override beta; constant expressions allowed")
    common.add_argument("--z0", help="orbit start x,y")
    common.add_argument("--n", type=int, help="orbit length")
    common.add_argument("--tol", help="orbit evaluation tolerance")
    common.add_argument("--eps-beta", dest="eps_beta", help="zero band for beta tilde")
    common.add_argument("--zero-threshold", dest="zero_threshold", help="vanishing step level")
    common.add_argument("--plateau-window", dest="plateau_window", type=int)
    common.add_argument("--output", help="output path prefix")
    common.add_argument("--log-level", dest="log_level", type=str.lower, choices=LOG_LEVELS)

    parser = _ArgumentParser(prog=APP_NAME, description="Hyperbolic step of parabolic maps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    commands.add_parser("classify", parents=[common], help="analytic verdict")
    orbit_parser = commands.add_parser("orbit", parents=[common], help="orbit CSV and summary")
    orbit_parser.add_argument("--csv", help="trace CSV path (default <output>_orbit.csv)")
    probe_parser = commands.add_parser("probe", parents=[common], help="probe CSV")
    probe_parser.add_argument("--kind", choices=PROBE_KINDS, default=PROBE_ANGULAR)
    probe_parser.add_argument("--grid", help="ymin,ymax,points on a log scale")
    probe_parser.add_argument("--z", help="second start point x,y for the abel kind")
    probe_parser.add_argument("--csv", help="CSV path (default stdout)")
    commands.add_parser("validate", parents=[common], help="analytic against empirical")
    commands.add_parser("profile", parents=[common], help="integrability profile")
    return parser


def _flags(args: argparse.Namespace) -> dict[str, Any]:
    return {
        CONF_Z0: args.z0,
        CONF_N: args.n,
        CONF_TOL: args.tol,
        CONF_EPS_BETA: args.eps_beta,
        CONF_ZERO_THRESHOLD: args.zero_threshold,
        CONF_PLATEAU_WINDOW: args.plateau_window,
        CONF_OUTPUT: args.output,
    }


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
        config_file = load_config(args.config)
        setup_logging(config_file[CONF_LOGGER], args.log_level)
        config = resolve_run_config(config_file[CONF_RUN], _flags(args))
        _LOGGER.debug("Resolved run config: %s", config)
        with eval_budget(config.eval_budget):
            return int(COMMANDS[args.command](args, config))
    except HStepError as ex:
        _LOGGER.debug("Command failed", exc_info=True)
        print(error_message(ex), file=sys.stderr)  # noqa: T201
        return int(ExitCode.ERROR)
    except ValueError as ex:
        print(error_message(UsageError(str(ex))), file=sys.stderr)  # noqa: T201
        return int(ExitCode.ERROR)


if __name__ == "__main__":
    sys.exit(main())
