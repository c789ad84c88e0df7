"""Constants for the parastep command line."""

from __future__ import annotations

from enum import IntEnum
from typing import Final

APP_NAME: Final = "parastep"

ENV_EVAL_BUDGET: Final = "PARASTEP_EVAL_BUDGET"
DEFAULT_CONFIG_PATH: Final = "config/parastep.yaml"
DEFAULT_OUTPUT: Final = "parastep"

# Map spec keys
CONF_BETA: Final = "beta"
CONF_MEASURE: Final = "measure"
CONF_SYMMETRIC: Final = "symmetric"
CONF_TYPE: Final = "type"
CONF_T: Final = "t"
CONF_W: Final = "w"
CONF_T0: Final = "t0"
CONF_STEP: Final = "step"
CONF_COUNT: Final = "count"
CONF_WEIGHT: Final = "weight"
CONF_DECAY: Final = "decay"
CONF_MIRRORED: Final = "mirrored"
CONF_EXPR: Final = "expr"
CONF_SUPPORT: Final = "support"
CONF_TAIL_NEG: Final = "tail_neg"
CONF_TAIL_POS: Final = "tail_pos"
CONF_MOMENT1: Final = "moment1"

COMPONENT_ATOM: Final = "atom"
COMPONENT_TRAIN: Final = "train"
COMPONENT_DENSITY: Final = "density"
INFINITE_COUNT: Final = "inf"
NEG_INFINITY: Final = ("-inf", "−inf")
POS_INFINITY: Final = ("+inf", "inf")

# Run configuration keys
CONF_RUN: Final = "run"
CONF_LOGGER: Final = "logger"
CONF_DEFAULT: Final = "default"
CONF_LOGS: Final = "logs"
CONF_Z0: Final = "z0"
CONF_N: Final = "n"
CONF_TOL: Final = "tol"
CONF_EPS_BETA: Final = "eps_beta"
CONF_ZERO_THRESHOLD: Final = "zero_threshold"
CONF_PLATEAU_WINDOW: Final = "plateau_window"
CONF_OUTPUT: Final = "output"
CONF_EVAL_BUDGET: Final = "eval_budget"

DEFAULT_N: Final = 10_000
DEFAULT_Z0: Final = (0.0, 1.0)
DEFAULT_GRID: Final = (10.0, 1e6, 6)
DEFAULT_ABEL_Z: Final = (0.0, 2.0)

PROBE_ANGULAR: Final = "angular"
PROBE_DRIFT: Final = "drift"
PROBE_ABEL: Final = "abel"
PROBE_KINDS: Final = (PROBE_ANGULAR, PROBE_DRIFT, PROBE_ABEL)

LOG_FORMAT: Final = "%(log_color)s%(asctime)s %(levelname)-8s %(name)s: %(message)s"


class ExitCode(IntEnum):
    """Process exit codes."""

    OK = 0
    ERROR = 1
    UNDECIDED = 2
    DISAGREE = 3
