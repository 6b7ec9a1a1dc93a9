"""
data/record.py
==============

Project records and the inaccuracy measures computed from them.
--------------------------------------------------------------------------------

Costs are construction costs in constant prices, measured from the decision to
build. The tool performs no deflation: supplying constant-price figures is the
user's obligation. Traffic is passengers (rail) or vehicles (road) per year,
first full year of operation against the forecast made at the decision year.

Cost overrun: actual minus estimated cost, in percent of the estimate.
Traffic inaccuracy: actual minus forecast traffic, in percent of the forecast.
"""
import enum
from dataclasses import dataclass
from typing import Optional


class ProjectType(str, enum.Enum):
    RAIL = "rail"
    ROAD = "road"
    BRIDGE_TUNNEL = "bridge_tunnel"
    ICT = "ict"
    OTHER = "other"


class Region(str, enum.Enum):
    EUROPE = "europe"
    NORTH_AMERICA = "north_america"
    EMERGING = "emerging"
    OTHER = "other"


class Kind(str, enum.Enum):
    COST_OVERRUN = "cost_overrun"
    TRAFFIC_INACCURACY = "traffic_inaccuracy"


class MissingOutturnError(ValueError):
    """Cost overrun requested for a project without an actual cost."""


class MissingTrafficError(ValueError):
    """Traffic inaccuracy requested without both traffic figures."""


class TotalShortfallError(ValueError):
    """Shortfall of 100% or more; the equivalent overestimate is unbounded."""


class RecordInvariantError(ValueError):
    """A ProjectRecord field combination breaks a record invariant."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class ProjectRecord:
    """One historical or candidate project.

    Optional fields are None when absent. Records without `actual_cost` can be
    forecast but never enter a reference class of cost overruns.
    """

    id: str
    name: str
    project_type: ProjectType
    region: Region
    decision_year: int
    estimated_cost: float
    completion_year: Optional[int] = None
    actual_cost: Optional[float] = None
    estimated_traffic: Optional[float] = None
    actual_traffic: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "project_type", ProjectType(self.project_type))
        object.__setattr__(self, "region", Region(self.region))
        if not self.estimated_cost > 0:
            raise RecordInvariantError(
                "nonpositive estimate: estimated_cost must be > 0",
                field="estimated_cost",
            )
        if self.actual_cost is not None and not self.actual_cost > 0:
            raise RecordInvariantError(
                "nonpositive outturn: actual_cost must be > 0", field="actual_cost"
            )
        if (
            self.completion_year is not None
            and self.completion_year < self.decision_year
        ):
            raise RecordInvariantError(
                "completion_year must not precede decision_year",
                field="completion_year",
            )
        if self.estimated_traffic is not None and not self.estimated_traffic > 0:
            raise RecordInvariantError(
                "nonpositive traffic forecast: estimated_traffic must be > 0",
                field="estimated_traffic",
            )
        if self.actual_traffic is not None and self.actual_traffic < 0:
            raise RecordInvariantError(
                "negative traffic: actual_traffic must be >= 0",
                field="actual_traffic",
            )

    @property
    def has_outturn(self):
        return self.actual_cost is not None

    @property
    def has_traffic(self):
        return self.estimated_traffic is not None and self.actual_traffic is not None


@dataclass(frozen=True)
class InaccuracyObservation:
    """Inaccuracy of one project's forecast, in percent (44.7 means +44.7%)."""

    project_id: str
    kind: Kind
    value: float
    decision_year: Optional[int] = None
    project_type: Optional[ProjectType] = None
    region: Optional[Region] = None


def cost_overrun(record):
    """Cost overrun of `record` in percent of its estimate.

    Parameters
    ----------
    record : ProjectRecord

    Returns
    -------
    float
        100 * (actual - estimated) / estimated

    Raises
    ------
    MissingOutturnError
        The record has no actual cost.
    """
    if record.actual_cost is None:
        raise MissingOutturnError(f"missing outturn for project {record.id}")
    return 100.0 * (record.actual_cost - record.estimated_cost) / record.estimated_cost


def traffic_inaccuracy(record):
    """Traffic inaccuracy of `record` in percent of the forecast."""
    if not record.has_traffic:
        raise MissingTrafficError(f"missing traffic for project {record.id}")
    return (
        100.0
        * (record.actual_traffic - record.estimated_traffic)
        / record.estimated_traffic
    )


def overestimate_from_shortfall(inaccuracy):
    """Convert "actual below forecast" into "forecast above actual".

    A rail inaccuracy of -51.4% (actual traffic 51.4% below the forecast) is
    the same as a forecast 105.8% above actual traffic.

    Parameters
    ----------
    inaccuracy : float
        Traffic inaccuracy in percent, > -100.

    Returns
    -------
    float
        Overestimate in percent, 100 * (-i / (1 + i)) with i = inaccuracy / 100.
    """
    if inaccuracy <= -100:
        raise TotalShortfallError(
            f"total shortfall ({inaccuracy}%): overestimate is unbounded"
        )
    i = inaccuracy / 100.0
    return 100.0 * (-i / (1.0 + i))


def overrun_from_overestimate(overestimate):
    """Inverse of `overestimate_from_shortfall` on (-100, inf) percent."""
    if overestimate <= -100:
        raise TotalShortfallError(
            f"overestimate of {overestimate}% has no finite inaccuracy"
        )
    o = overestimate / 100.0
    return 100.0 * (-o / (1.0 + o))


MEASURES = {
    Kind.COST_OVERRUN: cost_overrun,
    Kind.TRAFFIC_INACCURACY: traffic_inaccuracy,
}


def _has_measure(record, kind):
    if kind is Kind.COST_OVERRUN:
        return record.has_outturn
    return record.has_traffic


def observations(records, kind):
    """Inaccuracy observations of the given kind, in record order.

    Records lacking the actuals that `kind` needs are skipped.

    Parameters
    ----------
    records : iterable of ProjectRecord
    kind : Kind or str

    Returns
    -------
    list of InaccuracyObservation
    """
    kind = Kind(kind)
    measure = MEASURES[kind]
    return [
        InaccuracyObservation(
            project_id=r.id,
            kind=kind,
            value=measure(r),
            decision_year=r.decision_year,
            project_type=r.project_type,
            region=r.region,
        )
        for r in records
        if _has_measure(r, kind)
    ]


def paired_observations(records):
    """Matched (project_id, cost overrun, traffic inaccuracy) triples.

    Only records carrying both outturn cost and both traffic figures are used.
    """
    return [
        (r.id, cost_overrun(r), traffic_inaccuracy(r))
        for r in records
        if r.has_outturn and r.has_traffic
    ]
