"""
refclass
========

Reference classes and their empirical distributions.
--------------------------------------------------------------------------------

ClassFilter: Types, regions and years that make past projects comparable.

ReferenceClass: Observations passing a filter, with their provenance.

EmpiricalDistribution: Sorted observations with ECDF, quantiles, bootstrap
intervals, histograms and quantile curves.
"""
from . import builder, distribution
from .builder import (
    ClassFilter,
    ClassTooSmallError,
    ReferenceClass,
    build_reference_class,
    reference_class_from_values,
)
from .distribution import (
    BootstrapError,
    DomainError,
    EmpiricalDistribution,
    bootstrap_ci,
    ecdf,
    histogram,
    quantile,
    quantile_curve,
)
