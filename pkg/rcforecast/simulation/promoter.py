"""
simulation/promoter.py
======================

Promoter appraisals and funding selection.
--------------------------------------------------------------------------------

Promoters understate costs and overstate benefits. A project's stated cost is

    stated_cost = true_cost * (1 - understatement / 100)

so the overrun measured against the stated budget is

    100 * (true_cost / stated_cost - 1) = understatement / (1 - understatement / 100)

in percent; an understatement of 30.9 shows up as an overrun of 44.7. Stated
benefit is true_benefit * (1 + benefit_bias / 100), and benefit_bias is
exactly the percentage by which the benefit forecast exceeds the outcome.

A funder ranks projects by an appraisal value and funds the top k. Ranking on
stated BCR rewards the largest biases; the reference-class policy corrects
each stated appraisal with the uplift and benefit debiasing of the project's
own type before ranking.
"""
import enum
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..data.record import ProjectType
from ..forecast.uplift import UpliftSchedule

RISK_CAPITAL_SHARE = 1.0 / 3.0


class ConfigurationError(ValueError):
    """A simulator or command configuration is incomplete or inconsistent."""


class Rule(str, enum.Enum):
    NAIVE = "naive_stated_bcr"
    RCF = "rcf_adjusted_bcr"
    TRUE = "true_bcr"


# Short names used on the command line and in configuration files
RULE_NAMES = {"naive": Rule.NAIVE, "rcf": Rule.RCF, "true": Rule.TRUE}


def rule_for(name):
    if name in RULE_NAMES:
        return RULE_NAMES[name]
    try:
        return Rule(name)
    except ValueError:
        raise ConfigurationError(
            f"unknown policy '{name}'; expected one of {', '.join(RULE_NAMES)}"
        )


@dataclass(frozen=True)
class PromoterProject:
    id: str
    true_cost: float
    true_benefit: float
    understatement: float = 0.0
    benefit_bias: float = 0.0
    project_type: ProjectType = ProjectType.OTHER
    private_capital_share: float = 0.0

    def __post_init__(self):
        if not self.true_cost > 0 or not self.true_benefit > 0:
            raise ValueError(f"project {self.id}: true cost and benefit must be > 0")
        if not self.understatement < 100:
            raise ValueError(
                f"project {self.id}: understatement {self.understatement} leaves "
                "no positive stated cost"
            )
        if not self.benefit_bias > -100:
            raise ValueError(
                f"project {self.id}: benefit bias {self.benefit_bias} leaves no "
                "positive stated benefit"
            )
        if not 0.0 <= self.private_capital_share <= 1.0:
            raise ValueError(
                f"project {self.id}: private capital share outside [0, 1]"
            )
        object.__setattr__(self, "project_type", ProjectType(self.project_type))

    @property
    def stated_cost(self):
        return self.true_cost * (1.0 - self.understatement / 100.0)

    @property
    def stated_benefit(self):
        return self.true_benefit * (1.0 + self.benefit_bias / 100.0)

    @property
    def true_bcr(self):
        return self.true_benefit / self.true_cost

    @property
    def realized_overrun(self):
        """Overrun on the stated budget, in percent."""
        return 100.0 * (self.true_cost / self.stated_cost - 1.0)

    @property
    def meets_risk_capital_rule(self):
        return self.private_capital_share >= RISK_CAPITAL_SHARE


def stated_appraisal(project):
    """Stated BCR: stated benefit over stated cost."""
    return project.stated_benefit / project.stated_cost


@dataclass(frozen=True)
class SelectionPolicy:
    """Ranking rule and budget.

    For the reference-class rule, `uplift_schedules` and
    `benefit_overestimates` map a project type to its schedule and to the mean
    benefit overestimate (percent) of its class. A single UpliftSchedule
    applies to every type. Types without an overestimate are not debiased.
    """

    rule: Rule = Rule.NAIVE
    budget_slots: int = 1
    uplift_schedules: Optional[object] = None
    benefit_overestimates: Dict[ProjectType, float] = field(default_factory=dict)
    risk: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "rule", rule_for(self.rule))
        if self.budget_slots < 1:
            raise ConfigurationError(
                f"budget_slots must be >= 1, got {self.budget_slots}"
            )

    def schedule_for(self, project_type):
        schedules = self.uplift_schedules
        if isinstance(schedules, UpliftSchedule):
            return schedules
        if schedules and project_type in schedules:
            return schedules[project_type]
        raise ConfigurationError(
            f"no uplift schedule for project type '{project_type.value}'"
        )

    def appraise(self, project):
        if self.rule is Rule.TRUE:
            return project.true_bcr
        if self.rule is Rule.NAIVE:
            return stated_appraisal(project)
        uplift = self.schedule_for(project.project_type).uplift(self.risk)
        overestimate = self.benefit_overestimates.get(project.project_type, 0.0)
        debiased_benefit = project.stated_benefit / (1.0 + overestimate / 100.0)
        return debiased_benefit / (project.stated_cost * (1.0 + uplift / 100.0))


@dataclass(frozen=True)
class SelectionResult:
    rule: Rule
    funded: Tuple[str, ...]
    mean_realized_bcr_funded: float
    mean_realized_bcr_unfunded: Optional[float]
    regret: float
    mean_overrun_funded: float
    risk_capital_compliant: int


def _rank(pool, key):
    scores = [key(p) for p in pool]
    return sorted(range(len(pool)), key=lambda i: (-scores[i], pool[i].id))


def _mean_bcr(projects):
    if not projects:
        return None
    # id order, so equal sets give bit-identical means
    ordered = sorted(projects, key=lambda p: p.id)
    return float(np.mean([p.true_bcr for p in ordered]))


def select(pool, policy):
    """Fund the top `policy.budget_slots` projects by the policy's appraisal.

    Ties are broken by ascending id. Realized BCRs use true values; regret is
    the mean realized BCR of the true-BCR selection minus that of this one.

    Returns
    -------
    SelectionResult
    """
    pool = list(pool)
    if not pool:
        raise ValueError("cannot select from an empty pool")
    k = min(policy.budget_slots, len(pool))
    order = _rank(pool, policy.appraise)
    funded = [pool[i] for i in order[:k]]
    unfunded = [pool[i] for i in order[k:]]
    best = [pool[i] for i in _rank(pool, lambda p: p.true_bcr)[:k]]
    mean_funded = _mean_bcr(funded)
    regret = _mean_bcr(best) - mean_funded
    return SelectionResult(
        rule=policy.rule,
        funded=tuple(p.id for p in funded),
        mean_realized_bcr_funded=mean_funded,
        mean_realized_bcr_unfunded=_mean_bcr(unfunded),
        regret=regret,
        mean_overrun_funded=float(np.mean([p.realized_overrun for p in funded])),
        risk_capital_compliant=sum(p.meets_risk_capital_rule for p in funded),
    )
