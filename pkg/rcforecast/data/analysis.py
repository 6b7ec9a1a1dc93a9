"""
data/analysis.py
================

Descriptive and inferential statistics for inaccuracy observations.
--------------------------------------------------------------------------------

Summaries follow the layout of the cost and traffic tables: count, mean,
sample standard deviation (n - 1 denominator), share of projects with overrun
and share of forecasts wrong by more than a band (default +/- 20 percent).

Three t-tests discriminate between explanations of forecast inaccuracy:

  test_mean_nonzero      one-sample t-test of mean = 0 (is there bias at all?)
  test_group_difference  Welch two-sample t-test (do project types differ?)
  test_time_trend        OLS slope of inaccuracy on decision year (has
                         forecasting improved over time?)

All p-values are two-sided Student-t tail probabilities evaluated through the
regularized incomplete beta function.
"""
import logging
from collections import OrderedDict

import numpy as np
from scipy import special, stats

from .record import overestimate_from_shortfall, Kind

DEFAULT_BAND = 20.0
ALPHA = 0.05


class DegenerateSampleError(ValueError):
    """Too few observations, or zero variance, for the requested test."""


class NoTimeVariationError(ValueError):
    """All observations share one decision year."""


class DatasetSummary:
    """Summary statistics for one group of observations.

    Parameters
    ----------
    group : tuple of str
        Group key, e.g. ("rail",) or ("rail", "europe"). ("all",) when
        ungrouped.
    kind : Kind
    values : array_like
        Observations of the group, in percent.
    band_halfwidth : float
        Half-width of the accuracy band, in percentage points.
    """

    def __init__(self, group, kind, values, band_halfwidth=DEFAULT_BAND):
        values = np.asarray(values, dtype=float)
        self.group = tuple(group)
        self.kind = Kind(kind) if kind is not None else None
        self.n = int(values.size)
        self.mean = float(np.mean(values))
        if self.n > 1:
            self.std_dev = float(np.std(values, ddof=1))
        else:
            logging.warning(
                "Group %s has a single observation; standard deviation reported "
                "as 0",
                self.label,
            )
            self.std_dev = 0.0
        self.band_halfwidth = float(band_halfwidth)
        self.share_with_overrun = float(np.count_nonzero(values > 0)) / self.n
        self.share_below_zero = float(np.count_nonzero(values < 0)) / self.n
        self.share_outside_band = (
            float(np.count_nonzero(np.abs(values) > self.band_halfwidth)) / self.n
        )
        # Only meaningful for traffic; a mean shortfall of 100% has no overestimate
        self.mean_overestimate = None
        if self.kind is Kind.TRAFFIC_INACCURACY and self.mean > -100:
            self.mean_overestimate = overestimate_from_shortfall(self.mean)

    @property
    def label(self):
        return "/".join(self.group)

    def to_json(self):
        return {
            "group": list(self.group),
            "kind": self.kind.value if self.kind else None,
            "n": self.n,
            "mean": self.mean,
            "std_dev": self.std_dev,
            "share_with_overrun": self.share_with_overrun,
            "share_below_zero": self.share_below_zero,
            "share_outside_band": self.share_outside_band,
            "band_halfwidth": self.band_halfwidth,
            "mean_overestimate": self.mean_overestimate,
        }

    def __str__(self):
        return (
            f"{self.label:<28} n={self.n:>4d}  mean={self.mean:7.1f}  "
            f"sd={self.std_dev:6.1f}  overrun={self.share_with_overrun:5.2f}  "
            f"outside +/-{self.band_halfwidth:g}={self.share_outside_band:5.2f}"
        )


class TestResult:
    """Outcome of a two-sided hypothesis test.

    `metadata` holds test-specific extras (degrees of freedom, slope, group
    means).
    """

    __test__ = False  # keep pytest from collecting this class

    def __init__(self, test_name, statistic, p_value, metadata=None):
        self.test_name = test_name
        self.statistic = None if statistic is None else float(statistic)
        self.p_value = float(min(1.0, max(0.0, p_value)))
        self.reject_at_5pct = self.p_value < ALPHA
        self.metadata = dict(metadata or {})

    def to_json(self):
        return {
            "test_name": self.test_name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "reject_at_5pct": self.reject_at_5pct,
            "metadata": {k: self.metadata[k] for k in sorted(self.metadata)},
        }

    def __str__(self):
        verdict = "rejected" if self.reject_at_5pct else "not rejected"
        return (
            f"{self.test_name}: statistic={_format_statistic(self.statistic)} "
            f"p={self.p_value:.4g} (null {verdict} at 5%)"
        )


def _format_statistic(statistic):
    return "n/a" if statistic is None else f"{statistic:.4f}"


def _values(observations):
    """Accept InaccuracyObservations or bare numbers."""
    return np.asarray(
        [getattr(o, "value", o) for o in observations], dtype=float
    )


def t_two_sided_p(t, df):
    """Two-sided tail probability P(|T| >= |t|) for Student's t.

    Uses I_x(df/2, 1/2) with x = df / (df + t^2), the regularized incomplete
    beta function, evaluated by scipy's continued-fraction implementation.
    """
    if np.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return float(special.betainc(0.5 * df, 0.5, x))


# Group key selectors ----------------------------------------------------------

def _type_key(obs):
    return (_enum_value(obs.project_type),)


def _region_key(obs):
    return (_enum_value(obs.region),)


def _type_region_key(obs):
    return (_enum_value(obs.project_type), _enum_value(obs.region))


def _all_key(obs):
    return ("all",)


def _enum_value(e):
    return getattr(e, "value", e) if e is not None else "unknown"


GROUP_KEYS = {
    None: _all_key,
    "all": _all_key,
    "type": _type_key,
    "region": _region_key,
    "type,region": _type_region_key,
}


def group_key(group_by):
    """Resolve a group_by argument to a key function.

    Parameters
    ----------
    group_by : {None, 'all', 'type', 'region', 'type,region'} or callable
    """
    if callable(group_by):
        return group_by
    try:
        return GROUP_KEYS[group_by]
    except KeyError:
        raise ValueError(
            f"unknown grouping '{group_by}'; expected one of "
            "all, type, region, type,region"
        )


def summarize(observations, group_by="type", band_halfwidth=DEFAULT_BAND, groups=None):
    """Summarize observations per group.

    Groups are reported in order of first appearance, or in the order of
    `groups` when given. Requested groups without observations are omitted
    with a warning.

    Parameters
    ----------
    observations : sequence of InaccuracyObservation
    group_by : str or callable
        See `group_key`.
    band_halfwidth : float
    groups : list of tuple, optional
        Explicit group keys to report.

    Returns
    -------
    list of DatasetSummary
    """
    key = group_key(group_by)
    grouped = OrderedDict()
    kinds = {}
    for obs in observations:
        k = key(obs)
        grouped.setdefault(k, []).append(obs.value)
        kinds.setdefault(k, obs.kind)

    order = list(groups) if groups is not None else list(grouped)
    summaries = []
    for k in order:
        k = tuple(k)
        if not grouped.get(k):
            logging.warning("Group %s has no observations; omitted", "/".join(k))
            continue
        summaries.append(
            DatasetSummary(k, kinds[k], grouped[k], band_halfwidth=band_halfwidth)
        )
    return summaries


def test_mean_nonzero(observations):
    """One-sample two-sided t-test of mean inaccuracy = 0.

    Returns
    -------
    TestResult
        statistic = mean / (sd / sqrt(n)), df = n - 1.
    """
    values = _values(observations)
    n = values.size
    if n < 2:
        raise DegenerateSampleError(f"degenerate sample: n = {n} (need >= 2)")
    sd = np.std(values, ddof=1)
    if sd == 0:
        raise DegenerateSampleError("degenerate sample: zero variance")
    mean = np.mean(values)
    t = mean / (sd / np.sqrt(n))
    df = n - 1
    return TestResult(
        "mean_nonzero",
        t,
        t_two_sided_p(t, df),
        metadata={"df": float(df), "n": int(n), "mean": float(mean), "sd": float(sd)},
    )


def test_group_difference(group_a, group_b):
    """Welch two-sample two-sided t-test of equal means.

    Degrees of freedom follow the Welch-Satterthwaite approximation.
    """
    a = _values(group_a)
    b = _values(group_b)
    if a.size < 2 or b.size < 2:
        raise DegenerateSampleError(
            f"degenerate group: sizes {a.size} and {b.size} (need >= 2 each)"
        )
    va = np.var(a, ddof=1) / a.size
    vb = np.var(b, ddof=1) / b.size
    if va + vb == 0:
        raise DegenerateSampleError("degenerate groups: both have zero variance")
    diff = np.mean(a) - np.mean(b)
    t = diff / np.sqrt(va + vb)
    df = (va + vb) ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1))
    return TestResult(
        "group_difference",
        t,
        t_two_sided_p(t, df),
        metadata={
            "df": float(df),
            "mean_a": float(np.mean(a)),
            "mean_b": float(np.mean(b)),
            "n_a": int(a.size),
            "n_b": int(b.size),
        },
    )


def test_time_trend(observations):
    """Regress inaccuracy on decision year and t-test the slope.

    Parameters
    ----------
    observations : sequence of InaccuracyObservation
        Each must carry `decision_year`.

    Returns
    -------
    TestResult
        statistic = slope / stderr(slope), df = n - 2; metadata["slope"] is
        the slope in percentage points per year. When the points lie exactly
        on a line the statistic is None and metadata["exact_fit"] is True;
        p is 0 for a nonzero slope and 1 for a flat line.
    """
    years = np.asarray([o.decision_year for o in observations], dtype=float)
    values = _values(observations)
    if np.any(np.isnan(years)):
        raise ValueError("every observation needs a decision_year for a trend test")
    if np.unique(years).size < 2:
        raise NoTimeVariationError("no time variation: all observations share one year")
    if values.size < 3:
        raise DegenerateSampleError(
            f"degenerate sample: n = {values.size} (need >= 3 for a slope test)"
        )
    fit = stats.linregress(years, values)
    df = values.size - 2
    exact_fit = bool(fit.stderr == 0)
    if exact_fit:
        t = None
        p = 1.0 if fit.slope == 0 else 0.0
    else:
        t = fit.slope / fit.stderr
        p = t_two_sided_p(t, df)
    return TestResult(
        "time_trend",
        t,
        p,
        metadata={
            "df": float(df),
            "exact_fit": exact_fit,
            "slope": float(fit.slope),
            "intercept": float(fit.intercept),
            "slope_stderr": float(fit.stderr),
        },
    )


def robust_outliers(observations, threshold=3.0):
    """Observations whose robust z-score exceeds `threshold` in magnitude.

    z = (value - median) / MAD, with the MAD scaled for consistency with the
    normal standard deviation. Nothing is flagged when the MAD is zero.

    Returns
    -------
    list of (InaccuracyObservation, float)
        Flagged observations with their z-scores, in input order.
    """
    observations = list(observations)
    values = _values(observations)
    if values.size == 0:
        return []
    mad = stats.median_abs_deviation(values, scale="normal")
    if mad == 0:
        logging.info("MAD is zero; no observations flagged as outliers")
        return []
    z = (values - np.median(values)) / mad
    return [(o, float(zi)) for o, zi in zip(observations, z) if abs(zi) > threshold]


def exclude_outliers(observations, threshold=3.0):
    """Split observations into (kept, excluded) by `robust_outliers`."""
    observations = list(observations)
    flagged = robust_outliers(observations, threshold)
    excluded_ids = {id(o) for o, _ in flagged}
    kept = [o for o in observations if id(o) not in excluded_ids]
    for o, z in flagged:
        logging.warning(
            "Excluding outlier %s (%s = %.1f%%, robust z = %.2f)",
            o.project_id,
            _enum_value(o.kind),
            o.value,
            z,
        )
    return kept, [o for o, _ in flagged]


# The test_* names are statistical tests, not pytest cases
for _fn in (test_mean_nonzero, test_group_difference, test_time_trend):
    _fn.__test__ = False
