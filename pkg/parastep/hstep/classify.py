"""Analytic hyperbolic step classification and its empirical cross-check."""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass
from typing import Any

from .const import (
    DEFAULT_EPS_BETA,
    DEFAULT_ORBIT_TOL,
    DEFAULT_ZERO_THRESHOLD,
    Agreement,
    EmpiricalOutcome,
    Rule,
    Verdict,
)
from .dynamics import EmpiricalVerdict, empirical_step, orbit
from .halfplane import HPoint
from .herglotz import ParabolicMap, tilde_beta

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class Classification:
    """
    Verdict of the decision procedure and the rule that produced it.

    Attributes
    ----------
    verdict : Verdict
        ZeroHS, PositiveHS, or Unknown when no rule applies.
    rule : Rule
        The deciding rule; OutsideTheorems exactly when the verdict is Unknown.
    beta_tilde : float | None
        beta minus the first moment, present whenever t is integrable.
    reflected : bool
        The verdict was obtained on the map conjugated by z -> -conj(z).
    notes : str
        Human-readable account of the branch taken.

    """

    verdict: Verdict
    rule: Rule
    beta_tilde: float | None = None
    reflected: bool = False
    notes: str = ""

    def __post_init__(self) -> None:
        """Check the verdict and rule agree."""
        if (self.verdict is Verdict.UNKNOWN) != (self.rule is Rule.OUTSIDE_THEOREMS):
            msg = f"Verdict {self.verdict.value} cannot come from rule {self.rule.value}"
            raise ValueError(msg)
        if self.rule.is_l1 and self.beta_tilde is None:
            msg = f"Rule {self.rule.value} needs beta_tilde"
            raise ValueError(msg)

    def as_dict(self) -> dict[str, Any]:
        """Return a JSON-ready mapping."""
        return {
            "verdict": self.verdict.value,
            "rule": self.rule.value,
            "beta_tilde": self.beta_tilde,
            "reflected": self.reflected,
            "notes": self.notes,
        }


@dataclass(frozen=True, slots=True)
class ValidationReport:
    """Analytic and empirical verdicts side by side."""

    analytic: Classification
    empirical: EmpiricalVerdict
    agree: Agreement

    def as_dict(self) -> dict[str, Any]:
        """Return a JSON-ready mapping."""
        return {
            "analytic": self.analytic.as_dict(),
            "empirical": self.empirical.as_dict(),
            "agree": self.agree.value,
        }


def _classify_l1(f: ParabolicMap, eps_beta: float) -> Classification:
    profile = f.profile
    drift = tilde_beta(f)
    if abs(drift) <= eps_beta:
        if profile.moment1_exact:
            return Classification(
                Verdict.ZERO_HS,
                Rule.L1_BALANCED_BETA,
                drift,
                notes="t in L1 and beta equals the first moment",
            )
        return Classification(
            Verdict.UNKNOWN,
            Rule.OUTSIDE_THEOREMS,
            drift,
            notes="numerically ambiguous β̃: first moment known only by quadrature",
        )
    if drift > 0:
        if profile.t2_pos_finite:
            return Classification(
                Verdict.POSITIVE_HS,
                Rule.L1_POS_BETA_T2_FINITE,
                drift,
                notes="β̃ > 0 and t^2 integrable on (0, inf)",
            )
        return Classification(
            Verdict.ZERO_HS,
            Rule.L1_POS_BETA_T2_INFINITE,
            drift,
            notes="β̃ > 0 and t^2 not integrable on (0, inf)",
        )
    if profile.t2_neg_finite:
        return Classification(
            Verdict.POSITIVE_HS,
            Rule.L1_NEG_BETA_T2_FINITE,
            drift,
            notes="β̃ < 0 and t^2 integrable on (-inf, 0)",
        )
    return Classification(
        Verdict.ZERO_HS,
        Rule.L1_NEG_BETA_T2_INFINITE,
        drift,
        notes="β̃ < 0 and t^2 not integrable on (-inf, 0)",
    )


def _half_line_rule(f: ParabolicMap) -> Rule:
    if f.profile.support_upper is not None:
        return Rule.HALF_LINE_PHS
    return Rule.PERTURBED_HALF_LINE_PHS


def classify(f: ParabolicMap, eps_beta: float = DEFAULT_EPS_BETA) -> Classification:
    """
    Decide the hyperbolic step of f from beta and the integrability of mu.

    The checks run in order: zero measure, t integrable, symmetric measure,
    a left tail without first moment against a right tail with second
    moment (directly or after reflection), and Unknown otherwise.
    """
    if eps_beta < 0:
        msg = f"eps_beta must be non-negative, got {eps_beta!r}"
        raise ValueError(msg)
    profile = f.profile
    if f.mu.is_zero:
        result = Classification(
            Verdict.POSITIVE_HS, Rule.TRANSLATION, f.beta, notes="zero measure: translation"
        )
    elif profile.t_l1:
        result = _classify_l1(f, eps_beta)
    elif profile.symmetric:
        rule = Rule.SYMMETRIC_ZERO_BETA if f.beta == 0 else Rule.SYMMETRIC_NOT_L1
        result = Classification(
            Verdict.ZERO_HS, rule, notes="symmetric measure with t not in L1"
        )
    elif not profile.abs_t_neg_finite and profile.t2_pos_finite:
        result = Classification(
            Verdict.POSITIVE_HS,
            _half_line_rule(f),
            notes="|t| not integrable on (-inf, 0), t^2 integrable on (0, inf)",
        )
    elif not profile.abs_t_pos_finite and profile.t2_neg_finite:
        mirror = f.reflected()
        result = Classification(
            Verdict.POSITIVE_HS,
            _half_line_rule(mirror),
            reflected=True,
            notes="|t| not integrable on (0, inf), t^2 integrable on (-inf, 0); reflected",
        )
    else:
        result = Classification(
            Verdict.UNKNOWN, Rule.OUTSIDE_THEOREMS, notes="no decision rule applies"
        )
    _LOGGER.debug("Classified beta=%s as %s by %s", f.beta, result.verdict, result.rule)
    return result


def agreement(analytic: Classification, empirical: EmpiricalVerdict) -> Agreement:
    """Compare analytic and empirical verdicts."""
    if analytic.verdict is Verdict.UNKNOWN or empirical.verdict is EmpiricalOutcome.INCONCLUSIVE:
        return Agreement.NOT_COMPARABLE
    if analytic.verdict.value == empirical.verdict.value:
        return Agreement.YES
    return Agreement.NO


async def async_cross_validate(  # noqa: PLR0913
    f: ParabolicMap,
    z0: HPoint,
    n: int,
    *,
    tol: float = DEFAULT_ORBIT_TOL,
    eps_beta: float = DEFAULT_EPS_BETA,
    zero_threshold: float = DEFAULT_ZERO_THRESHOLD,
    plateau_window: int | None = None,
) -> ValidationReport:
    """Classify f while its orbit runs on a worker thread, then compare."""
    analytic, trace = await asyncio.gather(
        asyncio.to_thread(classify, f, eps_beta),
        asyncio.to_thread(orbit, f, z0, n, tol),
    )
    empirical = empirical_step(trace, zero_threshold, plateau_window, t_l1=f.profile.t_l1)
    report = ValidationReport(analytic, empirical, agreement(analytic, empirical))
    _LOGGER.info(
        "Analytic %s, empirical %s: agree=%s",
        analytic.verdict.value,
        empirical.verdict.value,
        report.agree.value,
    )
    return report


def cross_validate(  # noqa: PLR0913
    f: ParabolicMap,
    z0: HPoint,
    n: int,
    *,
    tol: float = DEFAULT_ORBIT_TOL,
    eps_beta: float = DEFAULT_EPS_BETA,
    zero_threshold: float = DEFAULT_ZERO_THRESHOLD,
    plateau_window: int | None = None,
) -> ValidationReport:
    """Run :func:`async_cross_validate` to completion."""
    return asyncio.run(
        async_cross_validate(
            f,
            z0,
            n,
            tol=tol,
            eps_beta=eps_beta,
            zero_threshold=zero_threshold,
            plateau_window=plateau_window,
        )
    )
