"""
viability
=========

Ex-post evaluation and Monte Carlo due diligence of project appraisals.
--------------------------------------------------------------------------------

AppraisalInput: Forecast cost, annual benefit, horizon and discount rate.

RealizationModel: Distributions (or constants) of cost overrun and benefit
inaccuracy, drawn independently or as matched pairs.

ViabilityReport: Realized BCR and NPV quantiles, probability of non-viability,
IRR of the median outcome.
"""
from . import appraisal, cashflow
from .appraisal import (
    AppraisalInput,
    Dependence,
    ModelError,
    RealizationModel,
    ViabilityReport,
    bcr_deflator,
    ex_post_evaluate,
    monte_carlo_viability,
)
from .cashflow import IRRInputError, annuity_factor, irr, npv
