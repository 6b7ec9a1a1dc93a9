"""
cli.py
======

Command-line entry point.
--------------------------------------------------------------------------------

    rcforecast [--format csv|text] [--seed S] [-v] <command> ...

Commands:

  ingest        validate a dataset and count its records
  stats         summary statistics and t-tests of inaccuracy
  class         build, export and describe a reference class
  uplift        required uplift at one or more acceptable risks
  forecast      reference class forecast of a base estimate
  duediligence  ex-post or Monte Carlo evaluation of an appraisal
  simulate      funding competitions under biased appraisals

Reports go to standard output, diagnostics to standard error. Exit status is
0 on success, 1 on a usage error and 2 when inputs cannot be read or are
invalid.
"""
import argparse
import logging
import os
import sys
from collections import Counter, OrderedDict

from .data.analysis import (
    DEFAULT_BAND,
    DegenerateSampleError,
    NoTimeVariationError,
    exclude_outliers,
    group_key,
    summarize,
    test_group_difference,
    test_mean_nonzero,
    test_time_trend,
)
from .data.record import Kind, observations, paired_observations
from .file import write
from .file.read import (
    CLASS_FIELDS,
    Dataset,
    read_appraisal,
    read_dataset,
    read_options,
    read_reference_class,
)
from .forecast.uplift import (
    DEFAULT_COVERAGE,
    reference_class_forecast,
    uplift_curve,
    uplift_schedule,
)
from .refclass.builder import ClassFilter, build_reference_class
from .refclass.distribution import bootstrap_ci, histogram, quantile_curve
from .simulation.experiment import SimulationOptions, run_experiment
from .simulation.promoter import ConfigurationError
from .utils import DEFAULT_SEED, check_seed, fixture_path
from .viability.appraisal import (
    RealizationModel,
    ex_post_evaluate,
    monte_carlo_viability,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

BUNDLED_DATASETS = ("cost_overruns.csv", "traffic_inaccuracy.csv")
KINDS = [k.value for k in Kind]
LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_flags(suppress):
    """Global flags, accepted before or after the command name."""
    common = argparse.ArgumentParser(add_help=False)

    def default(value):
        return argparse.SUPPRESS if suppress else value

    common.add_argument(
        "--format",
        choices=("csv", "text"),
        default=default("csv"),
        help="csv tables or one structured-text (JSON) document (default csv)",
    )
    common.add_argument(
        "--seed",
        type=int,
        default=default(None),
        help=f"random seed in [0, 2**64) (default {DEFAULT_SEED})",
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=default(0),
        help="-v for progress messages, -vv for debugging output",
    )
    return common


def _class_filter_flags(parser):
    parser.add_argument(
        "--type", dest="types", action="append", default=[],
        help="project type to include (repeatable; default all)",
    )
    parser.add_argument(
        "--region", dest="regions", action="append", default=[],
        help="region to include (repeatable; default all)",
    )
    parser.add_argument(
        "--years", nargs=2, type=int, metavar=("FIRST", "LAST"),
        help="decision-year range, inclusive",
    )
    parser.add_argument("--min-size", type=int, default=10)


def build_parser():
    parser = CommandParser(
        prog="rcforecast",
        description="Reference class forecasting for infrastructure projects.",
        parents=[_common_flags(suppress=False)],
    )
    common = _common_flags(suppress=True)
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    p = commands.add_parser("ingest", parents=[common], help="validate a dataset")
    p.add_argument("dataset", nargs="+")
    p.add_argument("--exclude-outliers", action="store_true")
    p.add_argument("--threshold", type=float, default=3.0)

    p = commands.add_parser("stats", parents=[common], help="summary statistics")
    p.add_argument(
        "dataset", nargs="*", help="dataset CSV files (default: bundled fixtures)"
    )
    p.add_argument("--kind", choices=KINDS, help="default: every kind present")
    p.add_argument(
        "--group-by", default="type", choices=("all", "type", "region", "type,region")
    )
    p.add_argument("--band", type=float, default=DEFAULT_BAND)
    p.add_argument("--exclude-outliers", action="store_true")
    p.add_argument("--threshold", type=float, default=3.0)
    p.add_argument("--test", choices=("mean", "difference", "trend"))
    p.add_argument(
        "--groups", nargs=2, metavar=("A", "B"),
        help="group labels compared by --test difference, e.g. rail road",
    )

    p = commands.add_parser("class", parents=[common], help="build a reference class")
    p.add_argument("dataset")
    p.add_argument("--kind", choices=KINDS, default=Kind.COST_OVERRUN.value)
    _class_filter_flags(p)
    p.add_argument("--export", metavar="FILE", help="write project_id,value CSV")
    view = p.add_mutually_exclusive_group()
    view.add_argument("--curve", action="store_true", help="q,quantile_value rows")
    view.add_argument("--histogram", action="store_true", help="bin_lo,bin_hi,count")
    view.add_argument("--bootstrap", choices=("mean", "quantile"))
    view.add_argument("--split-by", choices=("region",))
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--bin-width", type=float, default=10.0)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--replicates", type=int, default=2000)
    p.add_argument("--q", type=float, default=0.5)

    p = commands.add_parser("uplift", parents=[common], help="required uplifts")
    p.add_argument("--class", dest="class_file", required=True, metavar="FILE")
    p.add_argument("--risk", type=float, action="append", dest="risks")
    p.add_argument("--base", type=float, help="monetize uplifts for this estimate")
    p.add_argument("--curve", action="store_true", help="risk,uplift rows")
    p.add_argument("--step", type=float, default=0.01)

    p = commands.add_parser("forecast", parents=[common], help="uplift an estimate")
    p.add_argument("--class", dest="class_file", required=True, metavar="FILE")
    p.add_argument("--base", type=float, required=True)
    p.add_argument("--risk", type=float, default=0.5)
    p.add_argument("--coverage", type=float, default=DEFAULT_COVERAGE)

    p = commands.add_parser(
        "duediligence", parents=[common], help="stress-test an appraisal"
    )
    p.add_argument("--appraisal", required=True, metavar="FILE")
    p.add_argument("--cost-class", metavar="FILE")
    p.add_argument("--benefit-class", metavar="FILE")
    p.add_argument(
        "--paired", metavar="FILE", help="dataset of projects with cost and traffic"
    )
    p.add_argument(
        "--ex-post", nargs=2, type=float, metavar=("OVERRUN", "BENEFIT_FACTOR"),
        help="evaluate one realized outcome instead of sampling",
    )
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--workers", type=int, default=1)

    p = commands.add_parser("simulate", parents=[common], help="funding simulation")
    p.add_argument("--config", metavar="FILE", help="JSON simulation options")
    p.add_argument("--pool", type=int)
    p.add_argument("--budget", type=int, help="projects funded per trial")
    p.add_argument("--trials", type=int)
    p.add_argument("--policy", help="comma-separated: naive,rcf,true")
    p.add_argument(
        "--zero-bias", action="store_true", help="control run without any bias"
    )
    p.add_argument("--workers", type=int)
    return parser


# Helpers ----------------------------------------------------------------------

def _seed(config):
    return check_seed(DEFAULT_SEED if config.seed is None else config.seed)


def _load_datasets(paths):
    if len(paths) == 1:
        return read_dataset(paths[0])
    combined = Dataset(provenance="+".join(os.path.basename(p) for p in paths))
    for path in paths:
        combined.extend(read_dataset(path))
    return combined


def _kinds(records, kind):
    if kind is not None:
        return [Kind(kind)]
    return [k for k in Kind if observations(records, k)]


def _screen(obs, group_by, threshold):
    """Drop robust outliers within each group; return (kept, excluded)."""
    key = group_key(group_by)
    grouped = OrderedDict()
    for o in obs:
        grouped.setdefault(key(o), []).append(o)
    dropped = set()
    excluded = []
    for members in grouped.values():
        _, out = exclude_outliers(members, threshold)
        dropped.update(id(o) for o in out)
        excluded.extend(out)
    return [o for o in obs if id(o) not in dropped], excluded


def _emit(config, out, report, header, rows):
    if config.format == "text":
        write.write_report(out, config.command, report)
    else:
        write.write_csv(out, header, rows)


# Commands ---------------------------------------------------------------------

def _ingest(config, out):
    records = _load_datasets(config.dataset)
    report = {
        "provenance": records.provenance,
        "records": len(records),
        "with_outturn": sum(r.has_outturn for r in records),
        "with_traffic": sum(r.has_traffic for r in records),
        "by_type": dict(Counter(r.project_type.value for r in records)),
        "by_region": dict(Counter(r.region.value for r in records)),
    }
    if config.exclude_outliers:
        report["outliers"] = {
            kind.value: [
                o.project_id
                for o in _screen(observations(records, kind), "type", config.threshold)[1]
            ]
            for kind in _kinds(records, None)
        }
    _emit(config, out, report, ("field", "value"), write.field_rows(report))


def _stats(config, out):
    paths = config.dataset or [fixture_path(name) for name in BUNDLED_DATASETS]
    records = _load_datasets(paths)
    if config.test == "difference" and not config.groups:
        raise ConfigurationError("--test difference needs --groups A B")

    summaries, tests, excluded = [], [], []
    for kind in _kinds(records, config.kind):
        obs = observations(records, kind)
        if config.exclude_outliers:
            obs, out_k = _screen(obs, config.group_by, config.threshold)
            excluded.extend(o.project_id for o in out_k)
        kind_summaries = summarize(obs, group_by=config.group_by, band_halfwidth=config.band)
        summaries.extend(kind_summaries)
        if config.test:
            tests.extend(_run_tests(config, kind, obs, kind_summaries))

    report = {"summaries": summaries}
    if config.exclude_outliers:
        report["excluded"] = excluded
    if config.test:
        report["tests"] = [
            {"kind": kind.value, "group": label, "result": result}
            for kind, label, result in tests
        ]
        _emit(config, out, report, write.TEST_FIELDS, write.result_rows(tests))
    else:
        _emit(config, out, report, write.SUMMARY_FIELDS, write.summary_rows(summaries))


def _run_tests(config, kind, obs, summaries):
    key = group_key(config.group_by)
    members = OrderedDict()
    for o in obs:
        members.setdefault("/".join(key(o)), []).append(o)
    if config.test == "difference":
        a, b = config.groups
        missing = [g for g in (a, b) if g not in members]
        if missing:
            raise ConfigurationError(
                f"no {kind.value} observations for group(s) {', '.join(missing)}"
            )
        return [(kind, f"{a} vs {b}", test_group_difference(members[a], members[b]))]
    run = test_mean_nonzero if config.test == "mean" else test_time_trend
    results = []
    for s in summaries:
        try:
            results.append((kind, s.label, run(members[s.label])))
        except (DegenerateSampleError, NoTimeVariationError) as e:
            logging.warning(
                "Skipped %s test for %s %s: %s", config.test, kind.value, s.label, e
            )
    return results


def _class(config, out):
    records = read_dataset(config.dataset)
    years = tuple(config.years) if config.years else None
    class_filter = ClassFilter(
        project_types=config.types,
        regions=config.regions,
        year_range=years,
        min_size=config.min_size,
    )
    ref = build_reference_class(records, class_filter, config.kind)
    members = [(o.project_id, o.value) for o in ref.observations]
    if config.export:
        with open(config.export, "w", encoding="utf-8", newline="") as fh:
            write.write_csv(fh, CLASS_FIELDS, members)
        logging.info("Exported %d class members to %s", ref.n, config.export)

    dist = ref.distribution
    report = {"reference_class": ref}
    if config.curve:
        rows = quantile_curve(dist, config.step)
        header = ("q", "quantile_value")
        report["curve"] = rows
    elif config.histogram:
        rows = histogram(dist, config.bin_width)
        header = ("bin_lo", "bin_hi", "count")
        report["histogram"] = rows
    elif config.bootstrap:
        lo, hi = bootstrap_ci(
            dist,
            statistic=config.bootstrap,
            level=config.level,
            replicates=config.replicates,
            seed=_seed(config),
            q=config.q,
        )
        statistic = dist.mean if config.bootstrap == "mean" else dist.quantile(config.q)
        rows = [(config.bootstrap, statistic, config.level, lo, hi)]
        header = ("statistic", "estimate", "level", "lo", "hi")
        report["bootstrap"] = dict(zip(header, rows[0]))
    elif config.split_by:
        rows = ref.split_by_region()
        header = ("region", "n", "mean")
        report["regions"] = [dict(zip(header, r)) for r in rows]
    else:
        rows = members
        header = CLASS_FIELDS
        report["members"] = [dict(zip(header, m)) for m in members]
    _emit(config, out, report, header, rows)


def _uplift(config, out):
    ref = read_reference_class(config.class_file)
    dist = ref.distribution
    if config.curve:
        rows = uplift_curve(dist, config.step)
        report = {"reference_class": ref, "curve": rows}
        _emit(config, out, report, ("risk", "uplift"), rows)
        return
    schedule = uplift_schedule(dist, config.risks or [0.5], source=ref.identifier)
    report = {"reference_class": ref, "schedule": schedule}
    header = ("risk", "uplift")
    if config.base is not None:
        header += ("amount",)
        report["base_estimate"] = config.base
        report["amounts"] = [
            {"risk": r, "amount": a} for r, a in schedule.monetize(config.base)
        ]
    _emit(config, out, report, header, write.uplift_rows(schedule, config.base))


def _forecast(config, out):
    ref = read_reference_class(config.class_file)
    adjustment = reference_class_forecast(
        config.base, ref.distribution, config.risk, coverage=config.coverage
    )
    _emit(
        config,
        out,
        adjustment,
        write.FORECAST_FIELDS,
        [write.forecast_row(adjustment)],
    )


def _realization_model(config):
    if config.paired:
        records = read_dataset(config.paired)
        pairs = paired_observations(records)
        if not pairs:
            raise ConfigurationError(
                f"{config.paired}: no project has both cost and traffic outturns"
            )
        return RealizationModel.from_pairs(pairs)
    if not config.cost_class and not config.benefit_class:
        raise ConfigurationError(
            "duediligence needs --paired, --cost-class and/or --benefit-class, "
            "or --ex-post"
        )
    cost = 0.0
    benefit = 1.0
    if config.cost_class:
        cost = read_reference_class(config.cost_class).distribution
    if config.benefit_class:
        benefit = read_reference_class(
            config.benefit_class, kind=Kind.TRAFFIC_INACCURACY
        ).distribution
    return RealizationModel(cost_overrun=cost, benefit=benefit)


def _duediligence(config, out):
    appraisal = read_appraisal(config.appraisal)
    if config.ex_post:
        report = ex_post_evaluate(appraisal, *config.ex_post)
    else:
        report = monte_carlo_viability(
            appraisal,
            _realization_model(config),
            samples=config.samples,
            seed=_seed(config),
            workers=config.workers,
        )
    logging.info("%s", report)
    _emit(config, out, report, ("field", "value"), write.field_rows(report.to_json()))


def _simulate(config, out):
    options = read_options(config.config) if config.config else SimulationOptions()
    if config.zero_bias:
        options = SimulationOptions.without_bias(**vars(options))
    overrides = {
        "pool_size": config.pool,
        "budget_slots": config.budget,
        "trials": config.trials,
        "seed": config.seed,
        "workers": config.workers,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(options, name, value)
    if config.policy:
        options.policies = [p.strip() for p in config.policy.split(",") if p.strip()]
    logging.debug("Simulation options:\n%s", options)
    summary = run_experiment(options)
    _emit(config, out, summary, write.POLICY_FIELDS, write.policy_rows(summary))


COMMANDS = {
    "ingest": _ingest,
    "stats": _stats,
    "class": _class,
    "uplift": _uplift,
    "forecast": _forecast,
    "duediligence": _duediligence,
    "simulate": _simulate,
}


def dispatch(config, out=None):
    """Run the command described by a parsed command line.

    Parameters
    ----------
    config : argparse.Namespace
        As returned by build_parser().parse_args().
    out : text file-like, optional
        Report stream; standard output by default.

    Returns
    -------
    int
        Exit status.
    """
    out = out if out is not None else sys.stdout
    handler = COMMANDS.get(config.command)
    if handler is None:
        build_parser().print_usage(sys.stderr)
        sys.stderr.write(f"rcforecast: error: unknown command '{config.command}'\n")
        return EXIT_USAGE
    try:
        handler(config, out)
    except (ValueError, OSError) as e:
        logging.debug("Command %s failed", config.command, exc_info=True)
        sys.stderr.write(f"rcforecast {config.command}: error: {e}\n")
        return EXIT_DATA
    return EXIT_OK


def main(argv=None):
    try:
        config = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(
        stream=sys.stderr,
        format="%(levelname)s:%(message)s",
        level=LOG_LEVELS[min(config.verbose, len(LOG_LEVELS) - 1)],
    )
    return dispatch(config)


if __name__ == "__main__":
    sys.exit(main())
