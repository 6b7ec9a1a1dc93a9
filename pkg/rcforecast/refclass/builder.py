"""
refclass/builder.py
===================

Reference classes of comparable past projects.
--------------------------------------------------------------------------------

A reference class is the set of inaccuracy observations of past projects that
pass a ClassFilter: project types, regions and a decision-year range. Empty
type or region sets match everything. Only projects with the actuals needed for
the requested kind contribute, so candidate projects without an outturn never
enter a class.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Optional, Tuple

import numpy as np

from ..data.record import (
    InaccuracyObservation,
    Kind,
    ProjectType,
    Region,
    observations,
)
from ..utils import enum_value
from .distribution import EmpiricalDistribution

DEFAULT_MIN_SIZE = 10
WARN_SIZE = 30


class ClassTooSmallError(ValueError):
    """Fewer matching observations than the filter's minimum class size."""

    def __init__(self, count, min_size):
        super().__init__(
            f"class too small: {count} matching observations (need >= {min_size})"
        )
        self.count = count
        self.min_size = min_size


@dataclass(frozen=True)
class ClassFilter:
    """Selection criteria for a reference class."""

    project_types: FrozenSet[ProjectType] = field(default_factory=frozenset)
    regions: FrozenSet[Region] = field(default_factory=frozenset)
    year_range: Optional[Tuple[int, int]] = None
    min_size: int = DEFAULT_MIN_SIZE

    def __post_init__(self):
        object.__setattr__(
            self, "project_types", frozenset(ProjectType(t) for t in self.project_types)
        )
        object.__setattr__(self, "regions", frozenset(Region(r) for r in self.regions))
        if self.min_size < 2:
            raise ValueError(f"min_size must be >= 2, got {self.min_size}")
        if self.year_range is not None:
            lo, hi = self.year_range
            if lo > hi:
                raise ValueError(f"year range {lo}-{hi} is reversed")
            object.__setattr__(self, "year_range", (int(lo), int(hi)))

    def matches(self, item):
        """True if a ProjectRecord or InaccuracyObservation passes the filter."""
        if self.project_types and item.project_type not in self.project_types:
            return False
        if self.regions and item.region not in self.regions:
            return False
        if self.year_range is not None:
            year = item.decision_year
            if year is None or not self.year_range[0] <= year <= self.year_range[1]:
                return False
        return True

    def describe(self):
        """Compact label, e.g. 'rail|europe,north_america|1950-2000'."""
        types = ",".join(sorted(enum_value(t) for t in self.project_types)) or "*"
        regions = ",".join(sorted(enum_value(r) for r in self.regions)) or "*"
        years = "*" if self.year_range is None else "{}-{}".format(*self.year_range)
        return f"{types}|{regions}|{years}"


@dataclass(frozen=True)
class ReferenceClass:
    filter: ClassFilter
    kind: Kind
    observations: Tuple[InaccuracyObservation, ...]
    provenance: Optional[str] = None

    @property
    def n(self):
        return len(self.observations)

    @property
    def values(self):
        return np.asarray([o.value for o in self.observations], dtype=float)

    @property
    def identifier(self):
        source = self.provenance or "unknown"
        return f"{source}:{enum_value(self.kind)}:{self.filter.describe()}"

    @cached_property
    def distribution(self):
        return EmpiricalDistribution(self.values, source=self.identifier)

    def to_json(self):
        dist = self.distribution
        return {
            "identifier": self.identifier,
            "provenance": self.provenance,
            "kind": self.kind.value,
            "filter": self.filter.describe(),
            "n": self.n,
            "mean": dist.mean,
            "median": dist.median,
            "minimum": dist.minimum,
            "maximum": dist.maximum,
        }

    def split_by_region(self):
        """Per-region (region, n, mean) of the class, in order of appearance."""
        groups = {}
        for o in self.observations:
            groups.setdefault(enum_value(o.region) or "unknown", []).append(o.value)
        return [(r, len(v), float(np.mean(v))) for r, v in groups.items()]


def _check_size(count, min_size):
    if count < min_size:
        raise ClassTooSmallError(count, min_size)
    if count < WARN_SIZE:
        logging.warning(
            "Reference class has only %d observations; fewer than %d may not be "
            "statistically meaningful",
            count,
            WARN_SIZE,
        )


def build_reference_class(dataset, class_filter, kind, provenance=None):
    """Select the observations of `kind` whose projects pass `class_filter`.

    Parameters
    ----------
    dataset : sequence of ProjectRecord or InaccuracyObservation
        Observations are accepted so a class can be rebuilt from its own
        members.
    class_filter : ClassFilter
    kind : Kind or str
    provenance : str, optional
        Source identifier; defaults to `dataset.provenance` when present.

    Returns
    -------
    ReferenceClass

    Raises
    ------
    ClassTooSmallError
        Fewer than class_filter.min_size matches.
    """
    kind = Kind(kind)
    if provenance is None:
        provenance = getattr(dataset, "provenance", None)
    matching = [item for item in dataset if class_filter.matches(item)]
    records = [i for i in matching if not isinstance(i, InaccuracyObservation)]
    obs = [i for i in matching if isinstance(i, InaccuracyObservation) and i.kind is kind]
    obs.extend(observations(records, kind))
    _check_size(len(obs), class_filter.min_size)
    logging.info(
        "Reference class %s: %d observations", class_filter.describe(), len(obs)
    )
    return ReferenceClass(class_filter, kind, tuple(obs), provenance)


def reference_class_from_values(
    pairs, kind=Kind.COST_OVERRUN, provenance=None, min_size=2
):
    """Reference class from exported (project_id, value) pairs.

    The exported class was already selected, so the filter is unrestricted.
    """
    kind = Kind(kind)
    obs = tuple(
        InaccuracyObservation(project_id=str(pid), kind=kind, value=float(v))
        for pid, v in pairs
    )
    _check_size(len(obs), min_size)
    return ReferenceClass(ClassFilter(min_size=min_size), kind, obs, provenance)
