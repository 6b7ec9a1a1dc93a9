"""
simulation
==========

Funding competitions between projects with biased appraisals.
--------------------------------------------------------------------------------

PromoterProject: True cost and benefit plus the promoter's cost understatement
and benefit bias.

SelectionPolicy: Ranking rule (stated BCR, reference-class adjusted BCR, true
BCR) and number of budget slots.

SimulationOptions / run_experiment: Seeded repeated competitions and their
per-policy summary.
"""
from . import experiment, promoter
from .experiment import (
    ExperimentSummary,
    PolicySummary,
    SimulationOptions,
    generate_pool,
    historical_classes,
    run_experiment,
)
from .promoter import (
    ConfigurationError,
    PromoterProject,
    Rule,
    SelectionPolicy,
    SelectionResult,
    select,
    stated_appraisal,
)
