"""
forecast/uplift.py
==================

Uplifts and reference class forecasts.
--------------------------------------------------------------------------------

The uplift for an acceptable risk r of overrun is the (1 - r)-quantile of the
reference class, so that at most a fraction r of past outcomes would have
exceeded the uplifted budget. On small classes the interpolated quantile can
fall below an order statistic that more than n * r outcomes exceed; the uplift
is then raised to the smallest order statistic exceeded by at most floor(n * r)
outcomes. Lower acceptable risk never costs less uplift.

A forecast places a candidate's base estimate in the reference class: the
point estimate is uplifted for the chosen risk, the class median gives the
most likely outcome, and the central `coverage` interval of class outcomes is
mapped onto the budget.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from ..refclass.distribution import DomainError, probability_grid, quantile

DEFAULT_COVERAGE = 0.8
RISK_MATCH_TOLERANCE = 1e-12


class UnboundedUpliftError(ValueError):
    """Acceptable risk of zero; no finite uplift covers the sample maximum."""


class EmptyGridError(ValueError):
    pass


def required_uplift(dist, acceptable_risk):
    """Percent uplift keeping the empirical risk of overrun <= acceptable_risk.

    Parameters
    ----------
    dist : EmpiricalDistribution
        Cost overruns of the reference class, in percent.
    acceptable_risk : float
        In (0, 1].

    Returns
    -------
    float
        quantile(dist, 1 - acceptable_risk), or the order statistic
        v[n - 1 - floor(n * acceptable_risk)] when that is larger.
    """
    if not acceptable_risk <= 1.0:  # also catches NaN
        raise DomainError(f"acceptable risk {acceptable_risk} outside (0, 1]")
    if acceptable_risk <= 0.0:
        raise UnboundedUpliftError(
            "zero risk requires unbounded uplift beyond sample maximum"
        )
    v = dist.sorted_values
    floor_index = max(0, v.size - 1 - math.floor(v.size * acceptable_risk))
    return max(quantile(dist, 1.0 - acceptable_risk), float(v[floor_index]))


@dataclass(frozen=True)
class UpliftSchedule:
    """Required uplift as a function of acceptable risk.

    Points are held in order of decreasing risk, so uplifts are non-decreasing.
    """

    points: Tuple[Tuple[float, float], ...]
    source: Optional[str] = None

    @property
    def risks(self):
        return [r for r, _ in self.points]

    @property
    def uplifts(self):
        return [u for _, u in self.points]

    def uplift(self, acceptable_risk):
        """Uplift of the point at `acceptable_risk`."""
        for r, u in self.points:
            if abs(r - acceptable_risk) <= RISK_MATCH_TOLERANCE:
                return u
        raise DomainError(
            f"acceptable risk {acceptable_risk} is not on the schedule "
            f"(risks: {', '.join(f'{r:g}' for r in self.risks)})"
        )

    def monetize(self, base_estimate):
        """Absolute uplift amounts, (risk, base * uplift / 100) per point."""
        return [(r, base_estimate * u / 100.0) for r, u in self.points]

    def to_json(self):
        return {
            "source": self.source,
            "points": [{"risk": r, "uplift": u} for r, u in self.points],
        }


def uplift_schedule(dist, risk_grid, source=None):
    """Required uplift at each risk of `risk_grid`.

    Duplicate risks are merged.

    Returns
    -------
    UpliftSchedule
    """
    risks = sorted({float(r) for r in risk_grid}, reverse=True)
    if not risks:
        raise EmptyGridError("risk grid is empty")
    points = tuple((r, required_uplift(dist, r)) for r in risks)
    return UpliftSchedule(points, source=source or dist.source)


def uplift_curve(dist, step=0.01):
    """Rows (risk, uplift) for risk = step, 2 * step, ..., 1."""
    m = probability_grid(step)
    return [(i / m, required_uplift(dist, i / m)) for i in range(1, m + 1)]


@dataclass(frozen=True)
class ForecastAdjustment:
    base_estimate: float
    acceptable_risk: float
    uplift: float
    adjusted_estimate: float
    coverage: float
    interval: Tuple[float, float]
    median_uplift: float
    median_estimate: float
    reference_class: Optional[str] = None
    n: Optional[int] = None

    def __str__(self):
        return (
            f"base {self.base_estimate:,.1f} -> {self.adjusted_estimate:,.1f} "
            f"(uplift {self.uplift:.2f}% at risk {self.acceptable_risk:g}; "
            f"{self.coverage:.0%} interval {self.interval[0]:,.1f}-"
            f"{self.interval[1]:,.1f})"
        )

    def to_json(self):
        return {
            "reference_class": self.reference_class,
            "n": self.n,
            "base_estimate": self.base_estimate,
            "acceptable_risk": self.acceptable_risk,
            "uplift": self.uplift,
            "adjusted_estimate": self.adjusted_estimate,
            "coverage": self.coverage,
            "interval": list(self.interval),
            "median_uplift": self.median_uplift,
            "median_estimate": self.median_estimate,
        }


def _apply(base_estimate, uplift):
    return base_estimate * (1.0 + uplift / 100.0)


def reference_class_forecast(
    base_estimate, dist, acceptable_risk, coverage=DEFAULT_COVERAGE
):
    """Uplift a base estimate and map the class interval onto it.

    Parameters
    ----------
    base_estimate : float
        Candidate's conventional estimate, > 0.
    dist : EmpiricalDistribution
        Reference-class inaccuracy, in percent.
    acceptable_risk : float
        In (0, 1].
    coverage : float
        Coverage of the central interval, in [0, 1].

    Returns
    -------
    ForecastAdjustment
    """
    if not base_estimate > 0:
        raise DomainError(f"base estimate must be > 0, got {base_estimate}")
    if not 0.0 <= coverage <= 1.0:
        raise DomainError(f"coverage {coverage} outside [0, 1]")
    uplift = required_uplift(dist, acceptable_risk)
    if uplift < 0:
        logging.info(
            "Reference class implies a negative uplift (%.2f%%) at risk %g",
            uplift,
            acceptable_risk,
        )
    tail = (1.0 - coverage) / 2.0
    interval = (
        _apply(base_estimate, quantile(dist, tail)),
        _apply(base_estimate, quantile(dist, 1.0 - tail)),
    )
    median = quantile(dist, 0.5)
    return ForecastAdjustment(
        base_estimate=float(base_estimate),
        acceptable_risk=float(acceptable_risk),
        uplift=uplift,
        adjusted_estimate=_apply(base_estimate, uplift),
        coverage=float(coverage),
        interval=interval,
        median_uplift=median,
        median_estimate=_apply(base_estimate, median),
        reference_class=dist.source,
        n=dist.n,
    )
