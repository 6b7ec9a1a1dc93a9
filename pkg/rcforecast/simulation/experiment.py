"""
simulation/experiment.py
========================

Repeated funding competitions under biased appraisals.
--------------------------------------------------------------------------------

Each trial draws a pool of rail, road and bridge/tunnel projects. True BCRs
come from one lognormal distribution for all types, independent of the biases
(the "other things being equal" assumption). The overrun on the stated budget
and the benefit bias are drawn per type from normal distributions whose means
default to 44.7% (rail), 20.4% (road) and 33.8% (bridges and tunnels) and to
benefit overestimates of 105.6% (rail), -8.7% (road) and 0 (bridges and
tunnels). Each drawn overrun o becomes the understatement u = 100 o / (100 + o),
so the mean realized overrun of a large pool equals the configured mean.

The reference-class policy learns one uplift schedule and one mean benefit
overestimate per type from a seeded historical sample of the same generator.
Trial i draws from the stream (seed, 0, i) and the history from (seed, 1), so
results do not depend on the number of workers.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..data.record import ProjectType
from ..forecast.uplift import uplift_schedule
from ..refclass.distribution import EmpiricalDistribution, bootstrap_ci
from ..threads import ordered_map
from ..utils import (
    DEFAULT_SEED,
    STREAM_DRAWS,
    STREAM_HISTORY,
    check_seed,
    rng_for,
)
from .promoter import (
    ConfigurationError,
    PromoterProject,
    Rule,
    SelectionPolicy,
    rule_for,
    select,
)

MIN_TRIALS = 100
# Clipping bounds keep stated cost and benefit positive
OVERRUN_BOUNDS = (-50.0, 900.0)
BENEFIT_BIAS_FLOOR = -90.0


def _understatement_for(overrun):
    """Understatement that produces `overrun` percent on the stated budget."""
    return 100.0 * (1.0 - 1.0 / (1.0 + overrun / 100.0))


DEFAULT_TYPE_WEIGHTS = {"rail": 1.0, "road": 1.0, "bridge_tunnel": 1.0}
DEFAULT_OVERRUN = {"rail": 44.7, "road": 20.4, "bridge_tunnel": 33.8}
DEFAULT_BENEFIT_BIAS = {"rail": 105.6, "road": -8.7, "bridge_tunnel": 0.0}


class SimulationOptions:
    """Generator, policy and reporting settings for run_experiment.

    Loaded from JSON configuration files by file.read.read_options; every
    keyword below is a valid key.
    """

    def __init__(
        self,
        pool_size: int = 100,
        budget_slots: int = 20,
        trials: int = 1000,
        seed: int = DEFAULT_SEED,
        policies=("naive", "rcf", "true"),
        type_weights=None,
        overrun_mean=None,
        overrun_sd: float = 15.0,
        benefit_bias_mean=None,
        benefit_bias_sd: float = 20.0,
        true_bcr_median: float = 1.2,
        true_bcr_sigma: float = 0.35,
        cost_median: float = 500.0,
        cost_sigma: float = 0.6,
        risk: float = 0.5,
        history_size: int = 200,
        private_capital_max: float = 0.6,
        bootstrap_replicates: int = 2000,
        confidence_level: float = 0.99,
        workers: int = 1,
    ):
        self.pool_size = pool_size
        self.budget_slots = budget_slots
        self.trials = trials
        self.seed = seed
        self.policies = list(policies)
        self.type_weights = dict(type_weights or DEFAULT_TYPE_WEIGHTS)
        self.overrun_mean = dict(overrun_mean or DEFAULT_OVERRUN)
        self.overrun_sd = overrun_sd
        self.benefit_bias_mean = dict(benefit_bias_mean or DEFAULT_BENEFIT_BIAS)
        self.benefit_bias_sd = benefit_bias_sd
        self.true_bcr_median = true_bcr_median
        self.true_bcr_sigma = true_bcr_sigma
        self.cost_median = cost_median
        self.cost_sigma = cost_sigma
        self.risk = risk
        self.history_size = history_size
        self.private_capital_max = private_capital_max
        self.bootstrap_replicates = bootstrap_replicates
        self.confidence_level = confidence_level
        self.workers = workers

    @classmethod
    def without_bias(cls, **kwargs):
        """Options with every understatement and benefit bias fixed at zero."""
        opts = cls(**kwargs)
        opts.overrun_mean = {t: 0.0 for t in opts.type_weights}
        opts.benefit_bias_mean = {t: 0.0 for t in opts.type_weights}
        opts.overrun_sd = 0.0
        opts.benefit_bias_sd = 0.0
        return opts

    def active_types(self):
        """Project types with positive weight, in configuration order."""
        return [ProjectType(t) for t, w in self.type_weights.items() if w > 0]

    def validate(self):
        def fail(msg):
            raise ConfigurationError(msg)

        if self.trials < MIN_TRIALS:
            fail(f"trials = {self.trials}; need >= {MIN_TRIALS}")
        if self.pool_size < 1:
            fail(f"pool_size must be >= 1, got {self.pool_size}")
        if self.budget_slots < 1:
            fail(f"budget_slots must be >= 1, got {self.budget_slots}")
        if not self.policies:
            fail("no policies selected")
        for name in self.policies:
            rule_for(name)
        try:
            check_seed(self.seed)
            types = [ProjectType(t) for t in self.type_weights]
        except ValueError as e:
            fail(str(e))
        if any(w < 0 for w in self.type_weights.values()) or not any(
            w > 0 for w in self.type_weights.values()
        ):
            fail("type weights must be >= 0 with a positive total")
        for t in types:
            if self.type_weights[t.value] <= 0:
                continue
            for name in ("overrun_mean", "benefit_bias_mean"):
                if t.value not in getattr(self, name):
                    fail(f"{name} has no value for project type '{t.value}'")
        if self.overrun_sd < 0 or self.benefit_bias_sd < 0:
            fail("bias standard deviations must be >= 0")
        if not self.true_bcr_median > 0 or self.true_bcr_sigma < 0:
            fail("true BCR distribution needs median > 0 and sigma >= 0")
        if not self.cost_median > 0 or self.cost_sigma < 0:
            fail("cost distribution needs median > 0 and sigma >= 0")
        if not 0 < self.risk <= 1:
            fail(f"risk {self.risk} outside (0, 1]")
        if self.history_size < 2:
            fail(f"history_size must be >= 2, got {self.history_size}")
        if not 0 <= self.private_capital_max <= 1:
            fail("private_capital_max outside [0, 1]")
        if not 0 < self.confidence_level < 1:
            fail(f"confidence_level {self.confidence_level} outside (0, 1)")
        if self.bootstrap_replicates < 100:
            fail("bootstrap_replicates must be >= 100")

    def __str__(self):
        return_str = ""
        for attr in vars(self):
            return_str += "{}: {}\n".format(attr, getattr(self, attr))
        return return_str


def _draw_biases(options, type_index, types, rng):
    """Overrun and benefit bias for projects of types[type_index]."""
    o_mean = np.array([options.overrun_mean[t.value] for t in types])
    b_mean = np.array([options.benefit_bias_mean[t.value] for t in types])
    overrun = np.clip(
        rng.normal(o_mean[type_index], options.overrun_sd), *OVERRUN_BOUNDS
    )
    benefit_bias = np.maximum(
        rng.normal(b_mean[type_index], options.benefit_bias_sd), BENEFIT_BIAS_FLOOR
    )
    return overrun, benefit_bias


def generate_pool(options, rng):
    """Draw one pool of PromoterProjects."""
    types = options.active_types()
    weights = np.array([options.type_weights[t.value] for t in types], dtype=float)
    n = options.pool_size
    type_index = rng.choice(len(types), size=n, p=weights / weights.sum())
    overrun, benefit_bias = _draw_biases(options, type_index, types, rng)
    understatement = _understatement_for(overrun)
    bcr = options.true_bcr_median * np.exp(
        options.true_bcr_sigma * rng.standard_normal(n)
    )
    cost = options.cost_median * np.exp(options.cost_sigma * rng.standard_normal(n))
    share = rng.uniform(0.0, options.private_capital_max, size=n)
    width = len(str(n))
    return [
        PromoterProject(
            id=f"P{j + 1:0{width}d}",
            true_cost=float(cost[j]),
            true_benefit=float(cost[j] * bcr[j]),
            understatement=float(understatement[j]),
            benefit_bias=float(benefit_bias[j]),
            project_type=types[type_index[j]],
            private_capital_share=float(share[j]),
        )
        for j in range(n)
    ]


def historical_classes(options, seed):
    """Per-type uplift schedules and mean benefit overestimates.

    Built from `history_size` simulated past projects of each active type.
    """
    rng = rng_for(seed, STREAM_HISTORY)
    types = options.active_types()
    schedules, overestimates = {}, {}
    for i, t in enumerate(types):
        overrun, benefit_bias = _draw_biases(
            options, np.full(options.history_size, i), types, rng
        )
        dist = EmpiricalDistribution(overrun, source=f"simulated {t.value} history")
        schedules[t] = uplift_schedule(dist, [options.risk])
        overestimates[t] = float(np.mean(benefit_bias))
        logging.info(
            "Simulated %s history: uplift %.1f%% at risk %g, benefit "
            "overestimate %.1f%%",
            t.value,
            schedules[t].uplift(options.risk),
            options.risk,
            overestimates[t],
        )
    return schedules, overestimates


@dataclass(frozen=True)
class PolicySummary:
    policy: str
    rule: Rule
    mean_funded_bcr: float
    ci: Tuple[float, float]
    mean_regret: float
    mean_overrun_funded: float
    risk_capital_share: float

    def to_json(self):
        return {
            "policy": self.policy,
            "rule": self.rule.value,
            "mean_funded_bcr": self.mean_funded_bcr,
            "ci": list(self.ci),
            "mean_regret": self.mean_regret,
            "mean_overrun_funded": self.mean_overrun_funded,
            "risk_capital_share": self.risk_capital_share,
        }


@dataclass(frozen=True)
class ExperimentSummary:
    trials: int
    pool_size: int
    budget_slots: int
    seed: int
    confidence_level: float
    policies: List[PolicySummary]
    naive_rcf_gap: Optional[float] = None
    naive_rcf_gap_ci: Optional[Tuple[float, float]] = None
    share_naive_below_rcf: Optional[float] = None
    ordering_share: Optional[float] = None
    bias_funding_covariance: Optional[float] = None

    def policy(self, name):
        for p in self.policies:
            if p.policy == name or p.rule.value == name:
                return p
        raise KeyError(name)

    def to_json(self):
        return {
            "trials": self.trials,
            "pool_size": self.pool_size,
            "budget_slots": self.budget_slots,
            "seed": self.seed,
            "confidence_level": self.confidence_level,
            "policies": [p.to_json() for p in self.policies],
            "naive_rcf_gap": self.naive_rcf_gap,
            "naive_rcf_gap_ci": None
            if self.naive_rcf_gap_ci is None
            else list(self.naive_rcf_gap_ci),
            "share_naive_below_rcf": self.share_naive_below_rcf,
            "ordering_share": self.ordering_share,
            "bias_funding_covariance": self.bias_funding_covariance,
        }


def run_experiment(options):
    """Run `options.trials` seeded funding competitions.

    Parameters
    ----------
    options : SimulationOptions

    Returns
    -------
    ExperimentSummary
        Per policy: mean realized BCR of funded projects with a bootstrap
        interval, mean regret, mean overrun on stated budgets, share of funded
        projects meeting the risk-capital rule. When both naive and rcf run:
        the per-trial gap rcf - naive with its interval and the share of
        trials where naive selection does worse. Under naive: the covariance
        between a project's appraisal bias and being funded.
    """
    options.validate()
    seed = check_seed(options.seed)
    names = list(dict.fromkeys(options.policies))
    schedules, overestimates = {}, {}
    if any(rule_for(n) is Rule.RCF for n in names):
        schedules, overestimates = historical_classes(options, seed)
    policies = [
        SelectionPolicy(
            rule=rule_for(n),
            budget_slots=options.budget_slots,
            uplift_schedules=schedules,
            benefit_overestimates=overestimates,
            risk=options.risk,
        )
        for n in names
    ]

    def run_trial(trial):
        pool = generate_pool(options, rng_for(seed, STREAM_DRAWS, trial))
        results = [select(pool, policy) for policy in policies]
        bias = np.log([p.stated_benefit / p.stated_cost / p.true_bcr for p in pool])
        funded_naive = None
        for name, result in zip(names, results):
            if rule_for(name) is Rule.NAIVE:
                ids = set(result.funded)
                funded_naive = np.array([p.id in ids for p in pool], dtype=float)
        return results, bias, funded_naive

    outcomes = ordered_map(run_trial, range(options.trials), options.workers)
    logging.info("Completed %d trials", len(outcomes))

    def interval(values):
        return bootstrap_ci(
            EmpiricalDistribution(values),
            statistic="mean",
            level=options.confidence_level,
            replicates=options.bootstrap_replicates,
            seed=seed,
        )

    means = {}
    summaries = []
    for i, name in enumerate(names):
        results = [o[0][i] for o in outcomes]
        funded_bcr = np.array([r.mean_realized_bcr_funded for r in results])
        means[rule_for(name)] = funded_bcr
        compliant = sum(r.risk_capital_compliant for r in results)
        funded = sum(len(r.funded) for r in results)
        summaries.append(
            PolicySummary(
                policy=name,
                rule=rule_for(name),
                mean_funded_bcr=float(np.mean(funded_bcr)),
                ci=interval(funded_bcr),
                mean_regret=float(np.mean([r.regret for r in results])),
                mean_overrun_funded=float(
                    np.mean([r.mean_overrun_funded for r in results])
                ),
                risk_capital_share=compliant / funded,
            )
        )

    extra = {}
    if Rule.NAIVE in means and Rule.RCF in means:
        gap = means[Rule.RCF] - means[Rule.NAIVE]
        extra["naive_rcf_gap"] = float(np.mean(gap))
        extra["naive_rcf_gap_ci"] = interval(gap)
        extra["share_naive_below_rcf"] = float(np.mean(gap > 0))
        if Rule.TRUE in means:
            extra["ordering_share"] = float(
                np.mean(
                    (means[Rule.TRUE] >= means[Rule.RCF])
                    & (means[Rule.RCF] >= means[Rule.NAIVE])
                )
            )
    if Rule.NAIVE in means:
        bias = np.concatenate([o[1] for o in outcomes])
        funded_naive = np.concatenate([o[2] for o in outcomes])
        extra["bias_funding_covariance"] = float(np.cov(bias, funded_naive)[0, 1])

    return ExperimentSummary(
        trials=options.trials,
        pool_size=options.pool_size,
        budget_slots=options.budget_slots,
        seed=seed,
        confidence_level=options.confidence_level,
        policies=summaries,
        **extra,
    )
