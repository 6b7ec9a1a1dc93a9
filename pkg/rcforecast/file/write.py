"""
file/write.py
=============

Report output for rcforecast.
--------------------------------------------------------------------------------

Every command can write its report in two forms:

csv   One table per command through the csv module. Floats are written with
      their shortest round-trip representation, so every value parses back
      to the number the library computed.

text  One JSON document per run with the fixed top-level keys `command`,
      `rcforecast_version` and `report`. Report objects are converted by
      their `to_json` methods through serializers registered with jsons.
      Keys are sorted and no timestamp is written, so identical runs give
      identical bytes.

Field names of both forms are listed in docs/report_format.md.
"""
import csv
import json

import jsons

from .. import __version__
from ..data.analysis import DatasetSummary, TestResult
from ..forecast.uplift import ForecastAdjustment, UpliftSchedule
from ..refclass.builder import ReferenceClass
from ..simulation.experiment import ExperimentSummary, PolicySummary
from ..viability.appraisal import ViabilityReport

SUMMARY_FIELDS = (
    "group",
    "kind",
    "n",
    "mean",
    "std_dev",
    "share_with_overrun",
    "share_below_zero",
    "share_outside_band",
    "band_halfwidth",
    "mean_overestimate",
)
TEST_FIELDS = (
    "kind",
    "group",
    "test_name",
    "statistic",
    "p_value",
    "reject_at_5pct",
    "df",
)
FORECAST_FIELDS = (
    "reference_class",
    "n",
    "base_estimate",
    "acceptable_risk",
    "uplift",
    "adjusted_estimate",
    "coverage",
    "interval_lo",
    "interval_hi",
    "median_uplift",
    "median_estimate",
)
POLICY_FIELDS = (
    "policy",
    "rule",
    "mean_funded_bcr",
    "ci_lo",
    "ci_hi",
    "mean_regret",
    "mean_overrun_funded",
    "risk_capital_share",
)


def report_serializer(obj, cls=None, **kwargs):
    """
    Handle serialization of report objects via .to_json() method.
    """
    return obj.to_json()


for _cls in (
    DatasetSummary,
    TestResult,
    ReferenceClass,
    UpliftSchedule,
    ForecastAdjustment,
    ViabilityReport,
    PolicySummary,
    ExperimentSummary,
):
    jsons.set_serializer(report_serializer, _cls)


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def write_csv(stream, header, rows):
    """Write a header line and rows; None is written as an empty field."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def report_document(command, report):
    return jsons.dump(
        {"command": command, "rcforecast_version": __version__, "report": report}
    )


def write_report(stream, command, report):
    """Write the structured-text document of one command run.

    Parameters
    ----------
    stream : text file-like
    command : str
        Subcommand name.
    report : object
        Report objects, lists and dicts of them, or plain values.
    """
    stream.write(json.dumps(report_document(command, report), indent=2, sort_keys=True))
    stream.write("\n")


# CSV tables -------------------------------------------------------------------

def summary_rows(summaries):
    return [
        (
            s.label,
            s.kind.value if s.kind else None,
            s.n,
            s.mean,
            s.std_dev,
            s.share_with_overrun,
            s.share_below_zero,
            s.share_outside_band,
            s.band_halfwidth,
            s.mean_overestimate,
        )
        for s in summaries
    ]


def result_rows(results):
    """Rows of (kind, group label, TestResult) triples."""
    return [
        (
            kind.value,
            label,
            r.test_name,
            r.statistic,
            r.p_value,
            r.reject_at_5pct,
            r.metadata.get("df"),
        )
        for kind, label, r in results
    ]


def forecast_row(adjustment):
    a = adjustment
    return (
        a.reference_class,
        a.n,
        a.base_estimate,
        a.acceptable_risk,
        a.uplift,
        a.adjusted_estimate,
        a.coverage,
        a.interval[0],
        a.interval[1],
        a.median_uplift,
        a.median_estimate,
    )


def uplift_rows(schedule, base_estimate=None):
    """(risk, uplift[, amount]) per schedule point."""
    if base_estimate is None:
        return [(r, u) for r, u in schedule.points]
    amounts = dict(schedule.monetize(base_estimate))
    return [(r, u, amounts[r]) for r, u in schedule.points]


def field_rows(mapping, prefix=""):
    """Flatten a to_json mapping into (field, value) rows, nested keys dotted."""
    rows = []
    for key in sorted(mapping):
        value = mapping[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(field_rows(value, prefix=f"{name}."))
        elif isinstance(value, (list, tuple)):
            rows.extend((f"{name}.{i}", v) for i, v in enumerate(value))
        else:
            rows.append((name, value))
    return rows


def policy_rows(summary):
    """One row per policy, then an rcf_minus_naive row when both ran."""
    rows = [
        (
            p.policy,
            p.rule.value,
            p.mean_funded_bcr,
            p.ci[0],
            p.ci[1],
            p.mean_regret,
            p.mean_overrun_funded,
            p.risk_capital_share,
        )
        for p in summary.policies
    ]
    if summary.naive_rcf_gap is not None:
        lo, hi = summary.naive_rcf_gap_ci
        rows.append(
            ("rcf_minus_naive", "gap", summary.naive_rcf_gap, lo, hi, None, None, None)
        )
    return rows
