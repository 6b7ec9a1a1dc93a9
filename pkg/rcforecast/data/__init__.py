"""
data
====

Project records and the statistics computed from them.
--------------------------------------------------------------------------------

The main data objects are:

ProjectRecord: One historical or candidate project (estimated and actual cost,
estimated and actual traffic, type, region, years).

InaccuracyObservation: Cost overrun or traffic inaccuracy of one project, in
percent.

DatasetSummary: Count, mean, standard deviation and shares for a group of
observations.

TestResult: Statistic and two-sided p-value of a t-test.
"""
from . import analysis, record
from .analysis import (
    DatasetSummary,
    DegenerateSampleError,
    NoTimeVariationError,
    TestResult,
    exclude_outliers,
    robust_outliers,
    summarize,
    test_group_difference,
    test_mean_nonzero,
    test_time_trend,
)
from .record import (
    InaccuracyObservation,
    Kind,
    MissingOutturnError,
    MissingTrafficError,
    ProjectRecord,
    ProjectType,
    RecordInvariantError,
    Region,
    TotalShortfallError,
    cost_overrun,
    observations,
    overestimate_from_shortfall,
    overrun_from_overestimate,
    paired_observations,
    traffic_inaccuracy,
)
