"""
viability/appraisal.py
======================

Ex-post evaluation and Monte Carlo due diligence of cost-benefit appraisals.
--------------------------------------------------------------------------------

An appraisal states a construction cost, paid at t = 0, and a constant annual
benefit for years 1 .. horizon. Realization applies a cost overrun (percent of
the forecast cost) and a benefit multiplier. Traffic inaccuracy i is taken as
benefit inaccuracy, so the multiplier is 1 + i / 100.

    realized BCR = forecast BCR * (1 + i / 100) / (1 + o / 100)

Only construction cost is modelled; financing and operating cost overruns are
outside the cash-flow model, as is traffic ramp-up after opening.

Monte Carlo draws are generated in fixed-size blocks, each from its own random
stream keyed by (seed, block index). The report is therefore bit-identical for
a given (inputs, seed, samples) whatever the number of workers.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..refclass.distribution import EmpiricalDistribution
from ..threads import ordered_map
from ..utils import DEFAULT_SEED, STREAM_DRAWS, block_sizes, check_seed, rng_for
from .cashflow import annuity_factor, irr, npv

MC_BLOCK = 1024
MIN_SAMPLES = 100
REPORT_QUANTILES = (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95)


class ModelError(ValueError):
    """The realization model cannot generate valid outcomes."""


class Dependence(str, enum.Enum):
    INDEPENDENT = "independent"
    PAIRED = "paired"


@dataclass(frozen=True)
class AppraisalInput:
    """Forecast appraisal of a project.

    Parameters
    ----------
    forecast_cost : float
        Construction cost at t = 0, > 0.
    forecast_annual_benefit : float
        Benefit per year, > 0.
    horizon_years : int
        Years of benefit, >= 1.
    discount_rate : float
        Per year, > -1.
    """

    forecast_cost: float
    forecast_annual_benefit: float
    horizon_years: int
    discount_rate: float

    def __post_init__(self):
        object.__setattr__(self, "forecast_cost", float(self.forecast_cost))
        object.__setattr__(
            self, "forecast_annual_benefit", float(self.forecast_annual_benefit)
        )
        object.__setattr__(self, "discount_rate", float(self.discount_rate))
        if not self.forecast_cost > 0:
            raise ValueError(f"forecast_cost must be > 0, got {self.forecast_cost}")
        if not self.forecast_annual_benefit > 0:
            raise ValueError(
                "forecast_annual_benefit must be > 0, got "
                f"{self.forecast_annual_benefit}"
            )
        if int(self.horizon_years) != self.horizon_years or self.horizon_years < 1:
            raise ValueError(
                f"horizon_years must be an integer >= 1, got {self.horizon_years}"
            )
        object.__setattr__(self, "horizon_years", int(self.horizon_years))
        if not self.discount_rate > -1:
            raise ValueError(f"discount_rate must be > -1, got {self.discount_rate}")

    @property
    def annuity(self):
        return annuity_factor(self.discount_rate, self.horizon_years)

    @property
    def forecast_bcr(self):
        return self.forecast_annual_benefit * self.annuity / self.forecast_cost

    @property
    def forecast_npv(self):
        return self.forecast_annual_benefit * self.annuity - self.forecast_cost

    def cashflows(self, cost, annual_benefit):
        """(-cost, benefit, ..., benefit) over the horizon."""
        return [-float(cost)] + [float(annual_benefit)] * self.horizon_years


Marginal = Union[EmpiricalDistribution, float]


@dataclass(frozen=True, eq=False)
class RealizationModel:
    """How realized outcomes deviate from the appraisal.

    Parameters
    ----------
    cost_overrun : EmpiricalDistribution or float
        Cost overruns in percent, or a constant overrun.
    benefit : EmpiricalDistribution or float
        Traffic inaccuracies in percent (multiplier 1 + i / 100), or a
        constant benefit multiplier.
    dependence : {'independent', 'paired'}
        Independent draws from each marginal, or resampling of matched
        (overrun, traffic inaccuracy) pairs.
    pairs : tuple of (float, float), optional
        Matched pairs for 'paired'.
    """

    cost_overrun: Optional[Marginal] = 0.0
    benefit: Optional[Marginal] = 1.0
    dependence: Dependence = Dependence.INDEPENDENT
    pairs: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "dependence", Dependence(self.dependence))
        if self.dependence is Dependence.PAIRED:
            if not self.pairs:
                raise ModelError("paired mode needs matched observation pairs")
            pairs = tuple((float(o), float(i)) for o, i in self.pairs)
            object.__setattr__(self, "pairs", pairs)
            arr = np.asarray(pairs)
            self._check_support(arr[:, 0], 1.0 + arr[:, 1] / 100.0)
            return
        for name in ("cost_overrun", "benefit"):
            value = getattr(self, name)
            if value is None:
                raise ModelError(f"empty distribution for {name}")
            if isinstance(value, (list, tuple, np.ndarray)):
                if len(value) == 0:
                    raise ModelError(f"empty distribution for {name}")
                object.__setattr__(self, name, EmpiricalDistribution(value))
        self._check_support(self._support(self.cost_overrun), self._factor_support())

    @classmethod
    def constant(cls, cost_overrun, benefit_factor):
        return cls(cost_overrun=float(cost_overrun), benefit=float(benefit_factor))

    @classmethod
    def from_pairs(cls, pairs):
        """Paired model from (overrun, inaccuracy) or (id, overrun, inaccuracy)."""
        return cls(
            cost_overrun=None,
            benefit=None,
            dependence=Dependence.PAIRED,
            pairs=tuple(tuple(p[-2:]) for p in pairs),
        )

    @staticmethod
    def _support(marginal):
        if isinstance(marginal, EmpiricalDistribution):
            return marginal.sorted_values
        return np.asarray([float(marginal)])

    def _factor_support(self):
        if isinstance(self.benefit, EmpiricalDistribution):
            return 1.0 + self.benefit.sorted_values / 100.0
        return np.asarray([float(self.benefit)])

    @staticmethod
    def _check_support(overruns, factors):
        if np.any(overruns <= -100):
            raise ModelError("cost overruns must be > -100%")
        if np.any(factors <= 0):
            raise ModelError("benefit multiplier must be > 0 at every support point")

    @staticmethod
    def _sample(marginal, size, rng):
        if isinstance(marginal, EmpiricalDistribution):
            v = marginal.sorted_values
            return v[rng.integers(0, v.size, size=size)]
        return np.full(size, float(marginal))

    def draw(self, size, rng):
        """Draw `size` (overrun, benefit multiplier) outcomes from `rng`."""
        if self.dependence is Dependence.PAIRED:
            arr = np.asarray(self.pairs)
            idx = rng.integers(0, arr.shape[0], size=size)
            return arr[idx, 0], 1.0 + arr[idx, 1] / 100.0
        overrun = self._sample(self.cost_overrun, size, rng)
        if isinstance(self.benefit, EmpiricalDistribution):
            factor = 1.0 + self._sample(self.benefit, size, rng) / 100.0
        else:
            factor = np.full(size, float(self.benefit))
        return overrun, factor


@dataclass(frozen=True, eq=False)
class ViabilityReport:
    samples: int
    seed: Optional[int]
    forecast_bcr: float
    forecast_npv: float
    bcr_quantiles: Dict[float, float] = field(default_factory=dict)
    npv_quantiles: Dict[float, float] = field(default_factory=dict)
    mean_bcr: float = float("nan")
    p_nonviable: float = float("nan")
    p_npv_negative: float = float("nan")
    irr_estimate: Optional[float] = None
    mean_cost_overrun: float = float("nan")
    mean_benefit_factor: float = float("nan")
    dependence: Optional[str] = None

    @property
    def median_bcr(self):
        return self.bcr_quantiles.get(0.5)

    def to_json(self):
        return {
            "samples": self.samples,
            "seed": self.seed,
            "dependence": self.dependence,
            "forecast_bcr": self.forecast_bcr,
            "forecast_npv": self.forecast_npv,
            "bcr_quantiles": {f"{q:g}": v for q, v in self.bcr_quantiles.items()},
            "npv_quantiles": {f"{q:g}": v for q, v in self.npv_quantiles.items()},
            "mean_bcr": self.mean_bcr,
            "p_nonviable": self.p_nonviable,
            "p_npv_negative": self.p_npv_negative,
            "irr_estimate": self.irr_estimate,
            "mean_cost_overrun": self.mean_cost_overrun,
            "mean_benefit_factor": self.mean_benefit_factor,
        }

    def __str__(self):
        irr_text = "undefined" if self.irr_estimate is None else f"{self.irr_estimate:.2%}"
        return (
            f"{self.samples} samples: forecast BCR {self.forecast_bcr:.3f}, median "
            f"realized BCR {self.median_bcr:.3f}, P(BCR < 1) = "
            f"{self.p_nonviable:.3f}, IRR {irr_text}"
        )


def _realize(appraisal, overrun, factor):
    """Realized cost, annual benefit, BCR and NPV for arrays of outcomes."""
    cost = appraisal.forecast_cost * (1.0 + overrun / 100.0)
    benefit = appraisal.forecast_annual_benefit * factor
    pv = benefit * appraisal.annuity
    return cost, benefit, pv / cost, pv - cost


def _mean(values):
    """Sample mean; a constant sample returns its value unchanged."""
    if np.all(values == values[0]):
        return float(values[0])
    return float(np.mean(values))


def _report(appraisal, overrun, factor, seed, dependence=None):
    cost, benefit, bcr, npv_ = _realize(appraisal, overrun, factor)
    rate = appraisal.discount_rate
    median_flows = appraisal.cashflows(np.median(cost), np.median(benefit))
    irr_estimate = irr(median_flows)
    if irr_estimate is None:
        logging.info(
            "IRR undefined for median outcome (NPV at 0: %g)", npv(0.0, median_flows)
        )
    n = bcr.size
    return ViabilityReport(
        samples=int(n),
        seed=seed,
        forecast_bcr=appraisal.forecast_bcr,
        forecast_npv=appraisal.forecast_npv,
        bcr_quantiles={q: float(np.quantile(bcr, q)) for q in REPORT_QUANTILES},
        npv_quantiles={q: float(np.quantile(npv_, q)) for q in REPORT_QUANTILES},
        mean_bcr=_mean(bcr),
        p_nonviable=int(np.count_nonzero(bcr < 1.0)) / n,
        p_npv_negative=int(np.count_nonzero(npv_ < 0.0)) / n,
        irr_estimate=irr_estimate,
        mean_cost_overrun=_mean(overrun),
        mean_benefit_factor=_mean(factor),
        dependence=dependence,
    )


def ex_post_evaluate(appraisal, realized_cost_overrun, realized_benefit_factor):
    """Evaluate an appraisal against one realized outcome.

    Parameters
    ----------
    appraisal : AppraisalInput
    realized_cost_overrun : float
        Percent of the forecast cost.
    realized_benefit_factor : float
        Realized over forecast benefit, > 0.

    Returns
    -------
    ViabilityReport
        One sample, no seed.
    """
    model = RealizationModel.constant(realized_cost_overrun, realized_benefit_factor)
    overrun, factor = model.draw(1, None)
    return _report(appraisal, overrun, factor, seed=None)


def monte_carlo_viability(
    appraisal, model, samples=10000, seed=DEFAULT_SEED, workers=1
):
    """Distribution of realized BCR and NPV under a realization model.

    Parameters
    ----------
    appraisal : AppraisalInput
    model : RealizationModel
    samples : int
        >= 100.
    seed : int
        In [0, 2**64).
    workers : int
        Threads used for drawing; the report does not depend on it.

    Returns
    -------
    ViabilityReport
    """
    if samples < MIN_SAMPLES:
        raise ModelError(f"samples = {samples}; need >= {MIN_SAMPLES}")
    seed = check_seed(seed)

    def run_block(task):
        index, size = task
        return model.draw(size, rng_for(seed, STREAM_DRAWS, index))

    blocks = ordered_map(run_block, enumerate(block_sizes(samples, MC_BLOCK)), workers)
    overrun = np.concatenate([b[0] for b in blocks])
    factor = np.concatenate([b[1] for b in blocks])
    logging.info("Drew %d outcomes in %d blocks", overrun.size, len(blocks))
    return _report(
        appraisal, overrun, factor, seed=seed, dependence=model.dependence.value
    )


def bcr_deflator(cost_overrun, traffic_inaccuracy):
    """Factor by which realized BCR differs from the forecast BCR.

    (1 + i / 100) / (1 + o / 100); mean rail inaccuracies give about 0.34.
    """
    if cost_overrun <= -100:
        raise ModelError("cost overrun must be > -100%")
    return (1.0 + traffic_inaccuracy / 100.0) / (1.0 + cost_overrun / 100.0)
