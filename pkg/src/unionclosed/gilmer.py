"""Gilmer's entropy inequality and the two-element counterexample family.

For A, B i.i.d. with law p and q the law of A | B, the conjectured
inequality H(q) + D(q || p) > H(p) is the same as asking that

    gap(p) = sum_x q_x log2(1/p_x) - sum_x p_x log2(1/p_x)

be positive.  The family p = (x, 1/2 - x, 1/2 - x, x) on P([2]) has every
marginal equal to 1/2 and a negative gap for 1/4 < x < 1/2; moving a
little mass off {1, 2} makes the marginals strictly smaller than 1/2
while keeping the gap negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .setdist import (
    SetDistribution,
    cross_entropy,
    entropy,
    kl_divergence,
    make_distribution,
    marginals,
    union_convolve,
)

PAPER_X = 0.3
DEFAULT_EPSILON = 1e-4
PAPER_BOUND = -0.04


class ParamOutOfRange(ValueError):
    pass


def gap_of_arrays(p: np.ndarray, q: np.ndarray) -> float:
    """Cross-entropy of q against p minus entropy of p, on raw vectors."""
    on_q = q > 0
    if np.any(p[on_q] == 0):
        return math.inf
    on_p = p > 0
    logp = np.log2(p[on_p])
    return float(-(q[on_q] * np.log2(p[on_q])).sum() + (p[on_p] * logp).sum())


def gilmer_gap(p: SetDistribution) -> float:
    q = union_convolve(p, p)
    return cross_entropy(q, p) - entropy(p)


def gilmer_lhs(p: SetDistribution) -> float:
    """H(A | B) + D(A | B || A), the left side of the conjectured inequality."""
    q = union_convolve(p, p)
    return entropy(q) + kl_divergence(q, p)


@dataclass(frozen=True, eq=False)
class GapReport:
    distribution: SetDistribution
    union_distribution: SetDistribution
    marginals: tuple[float, ...]
    entropy_p: float
    entropy_q: float
    kl_q_p: float
    gap: float
    hypotheses_strict: bool
    violates_conjecture: bool

    def to_dict(self) -> dict:
        return {
            "distribution": self.distribution.to_dict(),
            "union_distribution": self.union_distribution.to_dict(),
            "marginals": list(self.marginals),
            "entropy_p": self.entropy_p,
            "entropy_q": self.entropy_q,
            "kl_q_p": self.kl_q_p,
            "gap": self.gap,
            "hypotheses_strict": self.hypotheses_strict,
            "violates_conjecture": self.violates_conjecture,
        }


def analyze(p: SetDistribution) -> GapReport:
    q = union_convolve(p, p)
    margs = tuple(float(m) for m in marginals(p))
    h_p = entropy(p)
    strict = all(m < 0.5 for m in margs) and h_p > 0
    gap = cross_entropy(q, p) - h_p
    return GapReport(
        distribution=p,
        union_distribution=q,
        marginals=margs,
        entropy_p=h_p,
        entropy_q=entropy(q),
        kl_q_p=kl_divergence(q, p),
        gap=gap,
        hypotheses_strict=strict,
        violates_conjecture=strict and gap <= 0,
    )


def _check_x(x: float) -> float:
    x = float(x)
    if not 0 < x < 0.5:
        raise ParamOutOfRange(f"x must lie in (0, 1/2), got {x}")
    return x


@dataclass(frozen=True)
class PaperFamilyParam:
    """Parameter of the two-element family, with an optional perturbation."""

    x: float
    epsilon: float = 0.0

    def __post_init__(self):
        _check_x(self.x)
        if self.epsilon < 0:
            raise ParamOutOfRange(f"epsilon must be >= 0, got {self.epsilon}")
        if self.epsilon > 0 and not self.epsilon < self.x / 2:
            raise ParamOutOfRange(
                f"epsilon={self.epsilon} leaves x - 2*epsilon <= 0 for x={self.x}"
            )

    def distribution(self) -> SetDistribution:
        if self.epsilon == 0:
            return paper_distribution(self.x)
        return perturbed_distribution(self.x, self.epsilon)


def paper_distribution(x: float = PAPER_X) -> SetDistribution:
    """(x, 1/2 - x, 1/2 - x, x) on {}, {1}, {2}, {1, 2}."""
    x = _check_x(x)
    return make_distribution(2, [x, 0.5 - x, 0.5 - x, x])


def perturbed_distribution(x: float = PAPER_X, epsilon: float = DEFAULT_EPSILON) -> SetDistribution:
    """Shift 2*epsilon off {1, 2} onto the singletons; marginals become 1/2 - epsilon."""
    x = _check_x(x)
    if not 0 < epsilon < x / 2:
        raise ParamOutOfRange(f"need 0 < epsilon < x/2 = {x / 2}, got {epsilon}")
    single = 0.5 + epsilon - x
    return make_distribution(2, [x, single, single, x - 2 * epsilon])


def gap_closed_form(x: float) -> float:
    x = _check_x(x)
    coef = 0.5 + 2 * x * x - 2 * x
    return coef * math.log2(1 / x) + (-coef) * math.log2(1 / (0.5 - x))


@dataclass(frozen=True)
class ScanPoint:
    x: float
    gap: float


def scan_gap(x_from: float, x_to: float, steps: int) -> list[ScanPoint]:
    """Closed-form gap on an inclusive uniform grid over [x_from, x_to]."""
    if not 0 < x_from < x_to < 0.5:
        raise ParamOutOfRange(f"need 0 < from < to < 1/2, got [{x_from}, {x_to}]")
    if steps < 2:
        raise ParamOutOfRange(f"steps must be >= 2, got {steps}")
    return [ScanPoint(float(x), gap_closed_form(x)) for x in np.linspace(x_from, x_to, steps)]


def sign_changes(points: list[ScanPoint]) -> list[tuple[float, float]]:
    """Brackets (a, b) of grid points across which the gap changes sign.

    Points where the gap is exactly zero are skipped, so a root landing on
    the grid is bracketed by its nonzero neighbours.
    """
    nonzero = [pt for pt in points if pt.gap != 0]
    return [
        (a.x, b.x)
        for a, b in zip(nonzero, nonzero[1:])
        if (a.gap > 0) != (b.gap > 0)
    ]


@dataclass(frozen=True, eq=False)
class PaperVerification:
    x: float
    epsilon: float
    report: GapReport
    perturbed: GapReport
    closed_form: float
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "checks": dict(self.checks),
            "x": self.x,
            "epsilon": self.epsilon,
            "closed_form_gap": self.closed_form,
            "report": self.report.to_dict(),
            "perturbed_report": self.perturbed.to_dict(),
        }


def verify_paper(x: float = PAPER_X, epsilon: float = DEFAULT_EPSILON) -> PaperVerification:
    """Re-derive the x = 0.3 counterexample; failures land in ``checks``."""
    report = analyze(paper_distribution(x))
    expected_q = [x * x, 0.25 - x * x, 0.25 - x * x, 0.5 + x * x]
    closed = gap_closed_form(x)
    perturbed = analyze(perturbed_distribution(x, epsilon))
    checks = {
        "union_distribution": all(
            abs(a - b) <= 1e-12 for a, b in zip(report.union_distribution, expected_q)
        ),
        "marginals_half": all(abs(m - 0.5) <= 1e-15 for m in report.marginals),
        "gap_below_bound": report.gap < PAPER_BOUND,
        "closed_form_agrees": abs(closed - report.gap) <= 1e-9,
        "perturbed_hypotheses_strict": perturbed.hypotheses_strict,
        "perturbed_gap_below_bound": perturbed.gap < PAPER_BOUND,
    }
    return PaperVerification(x, epsilon, report, perturbed, closed, checks)
