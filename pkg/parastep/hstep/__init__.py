"""
Hyperbolic step library.

This package provides the measure model, evaluation of parabolic self-maps
of the upper half-plane in Herglotz form, orbit diagnostics and the
analytic zero/positive hyperbolic step classifier.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .classify import (
    Classification,
    ValidationReport,
    async_cross_validate,
    classify,
    cross_validate,
)
from .const import Agreement, EmpiricalOutcome, Region, Rule, Verdict
from .dynamics import (
    EmpiricalVerdict,
    OrbitTrace,
    PommerenkeEstimate,
    abel_residual,
    angular_probe,
    drift_probe,
    empirical_step,
    orbit,
    pommerenke_b,
)
from .exceptions import HStepError
from .halfplane import ExtendedReal, HPoint, hyperbolic_distance, pseudo_hyperbolic
from .herglotz import (
    EvalResult,
    ParabolicMap,
    evaluate,
    find_invariant_abscissa,
    herglotz_integral,
    image,
    predicted_angular_limit,
    real_trace_eval,
    tilde_beta,
)
from .measure import (
    Atom,
    AtomTrain,
    DensityComponent,
    IntegrabilityProfile,
    MeasureSpec,
    integrability_profile,
    moment,
    reflect,
    total_mass,
)

__all__ = [
    "Agreement",
    "Atom",
    "AtomTrain",
    "Classification",
    "DensityComponent",
    "EmpiricalOutcome",
    "EmpiricalVerdict",
    "EvalResult",
    "ExtendedReal",
    "HPoint",
    "HStepError",
    "IntegrabilityProfile",
    "MeasureSpec",
    "OrbitTrace",
    "ParabolicMap",
    "PommerenkeEstimate",
    "Region",
    "Rule",
    "ValidationReport",
    "Verdict",
    "abel_residual",
    "angular_probe",
    "async_cross_validate",
    "classify",
    "cross_validate",
    "drift_probe",
    "empirical_step",
    "evaluate",
    "find_invariant_abscissa",
    "herglotz_integral",
    "hyperbolic_distance",
    "image",
    "integrability_profile",
    "moment",
    "orbit",
    "pommerenke_b",
    "predicted_angular_limit",
    "pseudo_hyperbolic",
    "real_trace_eval",
    "reflect",
    "tilde_beta",
    "total_mass",
]
