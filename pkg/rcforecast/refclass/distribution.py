"""
refclass/distribution.py
========================

Empirical distribution of a reference class.
--------------------------------------------------------------------------------

Quantiles are linear interpolations of order statistics: with sorted values
v[0] .. v[n-1] and h = (n - 1) * q, the q-quantile is

    v[floor(h)] + (h - floor(h)) * (v[floor(h) + 1] - v[floor(h)])

so quantile(0) is the sample minimum and quantile(1) the sample maximum. The
distribution never extrapolates beyond the observed range: tail risk outside
the historical record is out of model.
"""
import logging
import math

import numpy as np

from ..utils import STREAM_BOOTSTRAP, DEFAULT_SEED, rng_for

# Interpolation positions this close to an integer are read as that order
# statistic, so 20 * 0.9 and similar products hit the sample value exactly.
SNAP_TOLERANCE = 1e-10
MIN_BOOTSTRAP_N = 5
MIN_REPLICATES = 100


class DomainError(ValueError):
    """A probability or parameter lies outside its admissible range."""


class BootstrapError(ValueError):
    """The bootstrap cannot be run on this sample."""


class EmpiricalDistribution:
    """Sorted inaccuracy observations, in percent.

    Ties are kept, so repeated outcomes carry their full weight in the ECDF.
    The sorted array is read-only.

    Parameters
    ----------
    values : array_like
        At least two finite values.
    source : str, optional
        Identifier of the reference class the values came from.
    """

    def __init__(self, values, source=None):
        arr = np.sort(np.asarray(values, dtype=float).ravel())
        if arr.size < 2:
            raise DomainError(
                f"an empirical distribution needs at least 2 values, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise DomainError("empirical distribution values must be finite")
        arr.setflags(write=False)
        self._values = arr
        self.source = source

    @property
    def sorted_values(self):
        return self._values

    @property
    def n(self):
        return int(self._values.size)

    @property
    def minimum(self):
        return float(self._values[0])

    @property
    def maximum(self):
        return float(self._values[-1])

    @property
    def mean(self):
        return float(np.mean(self._values))

    @property
    def median(self):
        return quantile(self, 0.5)

    def ecdf(self, x):
        return ecdf(self, x)

    def quantile(self, q):
        return quantile(self, q)

    def shifted(self, c):
        """Distribution with `c` added to every value."""
        return EmpiricalDistribution(self._values + c, source=self.source)

    def __len__(self):
        return self.n

    def __repr__(self):
        return (
            f"EmpiricalDistribution(n={self.n}, min={self.minimum:g}, "
            f"max={self.maximum:g}, source={self.source!r})"
        )


def ecdf(dist, x):
    """Fraction of values <= x."""
    return int(np.searchsorted(dist.sorted_values, x, side="right")) / dist.n


def _check_probability(q, name="q"):
    if not 0.0 <= q <= 1.0:  # also catches NaN
        raise DomainError(f"{name} = {q} outside [0, 1]")


def _position(n, q):
    """(lower index, fraction) of the interpolation position for q."""
    h = (n - 1) * q
    nearest = round(h)
    if abs(h - nearest) <= SNAP_TOLERANCE:
        return int(nearest), 0.0
    lo = int(math.floor(h))
    return lo, h - lo


def quantile(dist, q):
    """q-quantile by linear interpolation of order statistics.

    Parameters
    ----------
    dist : EmpiricalDistribution
    q : float
        Probability in [0, 1].

    Returns
    -------
    float

    Raises
    ------
    DomainError
        q outside [0, 1].
    """
    _check_probability(q)
    v = dist.sorted_values
    lo, frac = _position(v.size, q)
    if frac == 0.0:
        return float(v[lo])
    return float(v[lo] + frac * (v[lo + 1] - v[lo]))


def _column_quantile(sorted_rows, q):
    """Quantile q of each row of an array whose rows are sorted."""
    lo, frac = _position(sorted_rows.shape[1], q)
    if frac == 0.0:
        return sorted_rows[:, lo]
    return sorted_rows[:, lo] + frac * (sorted_rows[:, lo + 1] - sorted_rows[:, lo])


def bootstrap_ci(
    dist,
    statistic="mean",
    level=0.95,
    replicates=2000,
    seed=DEFAULT_SEED,
    q=0.5,
):
    """Percentile bootstrap confidence interval.

    Parameters
    ----------
    dist : EmpiricalDistribution
    statistic : {'mean', 'quantile'}
        Statistic to bootstrap; 'quantile' uses probability `q`.
    level : float
        Coverage of the interval, in (0, 1).
    replicates : int
        Number of resamples, >= 100.
    seed : int

    Returns
    -------
    tuple of float
        (lo, hi)
    """
    if dist.n < MIN_BOOTSTRAP_N:
        raise BootstrapError(
            f"too few observations to bootstrap: n = {dist.n} "
            f"(need >= {MIN_BOOTSTRAP_N})"
        )
    if replicates < MIN_REPLICATES:
        raise BootstrapError(
            f"replicates = {replicates}; need >= {MIN_REPLICATES}"
        )
    if not 0.0 < level < 1.0:
        raise DomainError(f"level = {level} outside (0, 1)")

    rng = rng_for(seed, STREAM_BOOTSTRAP)
    v = dist.sorted_values
    samples = v[rng.integers(0, v.size, size=(int(replicates), v.size))]
    if statistic == "mean":
        stats = samples.mean(axis=1)
    elif statistic == "quantile":
        _check_probability(q)
        stats = _column_quantile(np.sort(samples, axis=1), q)
    else:
        raise ValueError(f"unknown bootstrap statistic '{statistic}'")

    replicate_dist = EmpiricalDistribution(stats)
    tail = (1.0 - level) / 2.0
    lo = quantile(replicate_dist, tail)
    hi = quantile(replicate_dist, 1.0 - tail)
    logging.debug(
        "Bootstrap %s (%d replicates, level %g): [%g, %g]",
        statistic,
        replicates,
        level,
        lo,
        hi,
    )
    return lo, hi


def histogram(dist, bin_width, origin=0.0):
    """Counts in bins aligned on origin + k * bin_width.

    The last bin is closed on the right, so the maximum is always counted.

    Returns
    -------
    list of (bin_lo, bin_hi, count)
    """
    if not bin_width > 0:
        raise DomainError(f"bin width must be > 0, got {bin_width}")
    kmin = math.floor((dist.minimum - origin) / bin_width)
    kmax = math.ceil((dist.maximum - origin) / bin_width)
    if kmax <= kmin:
        kmax = kmin + 1
    edges = origin + bin_width * np.arange(kmin, kmax + 1, dtype=float)
    counts, edges = np.histogram(dist.sorted_values, bins=edges)
    return [
        (float(edges[i]), float(edges[i + 1]), int(c)) for i, c in enumerate(counts)
    ]


def probability_grid(step):
    m = round(1.0 / step)
    if m < 1 or abs(m * step - 1.0) > 1e-9:
        raise DomainError(f"step {step} must divide 1 evenly")
    return m


def quantile_curve(dist, step=0.01):
    """Rows (q, quantile(q)) for q = 0, step, ..., 1."""
    m = probability_grid(step)
    return [(i / m, quantile(dist, i / m)) for i in range(m + 1)]
