"""
Constants for hyperbolic step computations.

This module defines numerical defaults and enumerations:
- Tolerances and budgets for evaluation and quadrature
- Gauss-Kronrod 7/15 rule tables
- Orbit diagnostic thresholds
- Region, Verdict, Rule, EmpiricalOutcome, Agreement enumerations
"""

from __future__ import annotations

from enum import Enum
from typing import Final

# === Half-plane ===
MIN_IMAG: Final = 1e-300  # points closer to the real axis are rejected
RHO_CEILING: Final = 1.0 - 2.0**-53  # largest float below 1
ATANH_SWITCH: Final = 0.5  # distances from larger rho use the log form

# === Evaluation ===
DEFAULT_EVAL_TOL: Final = 1e-10
DEFAULT_ORBIT_TOL: Final = 1e-8
EVAL_TOL_FLOOR: Final = 1e-12  # per-step tolerance never goes below this
EVAL_RTOL_FLOOR: Final = 1e-13  # relative accuracy asked of large integrals
DEFAULT_EVAL_BUDGET: Final = 1_000_000  # integrand evaluations per integral
MASS_RTOL: Final = 1e-12
MOMENT_RTOL: Final = 1e-10

# === Quadrature rule (QUADPACK qk15) ===
GK15_NODES: Final = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
GK15_KRONROD_WEIGHTS: Final = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
# Gauss weights at GK15_NODES[1], [3], [5] and the center
GK15_GAUSS_WEIGHTS: Final = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)
QUAD_MIN_INTERVALS: Final = 4
TAIL_REACH: Final = 8.0  # slow tails split off this many scales past the last feature
TAIL_MAX_POWER: Final = 8.0

# === Atom trains ===
TRAIN_MIN_TERMS: Final = 1024
TRAIN_MAX_TERMS: Final = 1 << 23
TRAIN_SMOOTH_WIDTH: Final = 8.0  # pole width in index units above which tails integrate through it
TRAIN_POLE_PAD: Final = 64

# === Construction checks ===
SAMPLE_POINTS: Final = 1000
TAIL_SAMPLE_RANGE: Final = (1e3, 1e6)
TRAIN_SAMPLE_RANGE: Final = (1e2, 1e4)
TAIL_SLOPE_TOLERANCE: Final = 0.1
SYMMETRY_RTOL: Final = 1e-9
FIRST_MOMENT_RTOL: Final = 1e-8

# === Invariant abscissa ===
ABSCISSA_LIMIT: Final = 1e300
ABSCISSA_XTOL: Final = 1e-12

# === Orbits ===
OVERFLOW_LIMIT: Final = 1e300
SCHWARZ_PICK_SLACK: Final = 1e-9
DEGENERATE_STEP: Final = 1e-14
DEFAULT_ZERO_THRESHOLD: Final = 1e-3
PLATEAU_REL_DECREASE: Final = 1e-4
Y_DIVERGENCE_SLOPE: Final = 1e-6
POMMERENKE_MIN_LENGTH: Final = 100
POMMERENKE_TAIL_FRACTION: Final = 0.1
POMMERENKE_DISPERSION: Final = 0.1
POMMERENKE_ABS_THRESHOLD: Final = 1e-3
PROGRESS_FRACTION: Final = 0.1

# === Classification ===
DEFAULT_EPS_BETA: Final = 1e-9


class Region(Enum):
    """Part of the real line a moment is taken over."""

    NEG = "neg"
    POS = "pos"
    ALL = "all"


class Verdict(Enum):
    """Analytic hyperbolic step verdict."""

    ZERO_HS = "ZeroHS"
    POSITIVE_HS = "PositiveHS"
    UNKNOWN = "Unknown"


class EmpiricalOutcome(Enum):
    """Hyperbolic step verdict read off an orbit."""

    ZERO_HS = "ZeroHS"
    POSITIVE_HS = "PositiveHS"
    INCONCLUSIVE = "Inconclusive"


class Rule(Enum):
    """Decision rule that produced an analytic verdict."""

    L1_BALANCED_BETA = "L1_BalancedBeta"
    L1_POS_BETA_T2_FINITE = "L1_PosBeta_T2Finite"
    L1_POS_BETA_T2_INFINITE = "L1_PosBeta_T2Infinite"
    L1_NEG_BETA_T2_FINITE = "L1_NegBeta_T2Finite"
    L1_NEG_BETA_T2_INFINITE = "L1_NegBeta_T2Infinite"
    SYMMETRIC_ZERO_BETA = "Symmetric_ZeroBeta"
    SYMMETRIC_NOT_L1 = "Symmetric_NotL1"
    HALF_LINE_PHS = "HalfLine_PHS"
    PERTURBED_HALF_LINE_PHS = "Perturbed_HalfLine_PHS"
    TRANSLATION = "Translation"
    OUTSIDE_THEOREMS = "OutsideTheorems"

    @property
    def is_l1(self) -> bool:
        """Return True for rules of the integrable branch."""
        return self.value.startswith("L1_")


class Agreement(Enum):
    """Outcome of comparing analytic and empirical verdicts."""

    YES = "yes"
    NO = "no"
    NOT_COMPARABLE = "not_comparable"


class Tangential(Enum):
    """Direction the orbit argument trends to."""

    TOWARD_ZERO = "toward_0"
    TOWARD_PI = "toward_pi"


class StopReason(Enum):
    """Why an orbit computation ended."""

    COMPLETED = "completed"
    OVERFLOW = "overflow"
    QUADRATURE_FAILURE = "quadrature_failure"
