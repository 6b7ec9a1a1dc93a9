import numpy as np
import pytest
from scipy import stats

from rcforecast.data import analysis
from rcforecast.data.analysis import (
    DegenerateSampleError,
    NoTimeVariationError,
    exclude_outliers,
    robust_outliers,
    summarize,
)
from rcforecast.data.record import (
    InaccuracyObservation,
    Kind,
    MissingOutturnError,
    MissingTrafficError,
    RecordInvariantError,
    TotalShortfallError,
    cost_overrun,
    observations,
    overestimate_from_shortfall,
    overrun_from_overestimate,
    paired_observations,
    traffic_inaccuracy,
)
from rcforecast.file.read import read_dataset


def obs(values, years=None, kind=Kind.COST_OVERRUN):
    years = years or [None] * len(values)
    return [
        InaccuracyObservation(project_id=f'P{i}', kind=kind, value=float(v), decision_year=y)
        for i, (v, y) in enumerate(zip(values, years))
    ]


def by_label(summaries):
    return {s.label: s for s in summaries}


def test_cost_overrun(make_record):
    assert cost_overrun(make_record(estimated_cost=100, actual_cost=144.7)) == pytest.approx(44.7)
    assert cost_overrun(make_record(estimated_cost=200, actual_cost=150)) == -25.0
    with pytest.raises(MissingOutturnError):
        cost_overrun(make_record())


def test_traffic_inaccuracy(make_record):
    record = make_record(estimated_traffic=10000, actual_traffic=4860)
    assert traffic_inaccuracy(record) == pytest.approx(-51.4)
    with pytest.raises(MissingTrafficError):
        traffic_inaccuracy(make_record())


def test_record_invariants(make_record):
    with pytest.raises(RecordInvariantError) as excinfo:
        make_record(estimated_cost=0)
    assert excinfo.value.field == 'estimated_cost'
    with pytest.raises(RecordInvariantError):
        make_record(decision_year=2000, completion_year=1999)
    with pytest.raises(ValueError):
        make_record(project_type='canal')
    # zero actual traffic is a valid outcome
    assert traffic_inaccuracy(make_record(estimated_traffic=100, actual_traffic=0)) == -100.0


def test_overestimate_from_shortfall():
    assert 105.1 <= overestimate_from_shortfall(-51.4) <= 106.1
    assert overestimate_from_shortfall(0.0) == 0.0
    assert overestimate_from_shortfall(-50.0) == pytest.approx(100.0)
    assert overestimate_from_shortfall(9.5) == pytest.approx(-8.676, abs=1e-3)
    with pytest.raises(TotalShortfallError):
        overestimate_from_shortfall(-100.0)


def test_overestimate_inverse():
    rng = np.random.default_rng(7)
    for x in rng.uniform(-99.0, 500.0, size=10000):
        assert abs(overrun_from_overestimate(overestimate_from_shortfall(x)) - x) < 1e-9
    with pytest.raises(TotalShortfallError):
        overrun_from_overestimate(-100.0)


def test_observations_skip_missing_actuals(make_record):
    records = [
        make_record(id='A', actual_cost=120.0),
        make_record(id='B'),
        make_record(id='C', actual_cost=90.0, estimated_traffic=100, actual_traffic=50),
    ]
    costs = observations(records, 'cost_overrun')
    assert [o.project_id for o in costs] == ['A', 'C']
    assert costs[0].value == pytest.approx(20.0)
    traffic = observations(records, Kind.TRAFFIC_INACCURACY)
    assert [(o.project_id, o.value) for o in traffic] == [('C', -50.0)]
    assert paired_observations(records) == [('C', pytest.approx(-10.0), -50.0)]


def test_cost_summaries_reproduce_published_table(cost_dataset):
    summaries = by_label(summarize(observations(cost_dataset, Kind.COST_OVERRUN)))
    assert list(summaries) == ['rail', 'bridge_tunnel', 'road']
    for label, n, mean, sd in [
        ('rail', 58, 44.7, 38.4),
        ('bridge_tunnel', 33, 33.8, 62.4),
        ('road', 167, 20.4, 29.9),
    ]:
        s = summaries[label]
        assert s.n == n
        assert round(s.mean, 1) == mean
        assert round(s.std_dev, 1) == sd
    assert summaries['rail'].mean_overestimate is None


def test_traffic_summaries_reproduce_published_table(traffic_dataset):
    summaries = by_label(summarize(observations(traffic_dataset, Kind.TRAFFIC_INACCURACY)))
    rail = summaries['rail']
    assert (rail.n, round(rail.mean, 1), round(rail.std_dev, 1)) == (25, -51.4, 28.1)
    assert rail.share_outside_band == pytest.approx(0.84)
    # nine in ten rail projects overestimate traffic
    assert rail.share_below_zero == pytest.approx(0.92)
    assert 105.1 <= rail.mean_overestimate <= 106.1
    road = summaries['road']
    assert (road.n, round(road.mean, 1), round(road.std_dev, 1)) == (183, 9.5, 44.3)
    assert round(road.mean_overestimate, 1) == -8.7
    # half of road forecasts are off by more than 20%
    assert road.share_outside_band == pytest.approx(91 / 183)
    assert round(road.share_outside_band, 1) == 0.5


def test_nine_in_ten_projects_have_cost_overrun(cost_dataset):
    (pooled,) = summarize(observations(cost_dataset, Kind.COST_OVERRUN), group_by='all')
    assert pooled.n == 258
    assert pooled.share_with_overrun == pytest.approx(227 / 258)
    assert round(pooled.share_with_overrun, 1) == 0.9


def test_regional_rail_summaries(cost_dataset):
    summaries = by_label(
        summarize(observations(cost_dataset, Kind.COST_OVERRUN), group_by='type,region')
    )
    assert summaries['rail/emerging'].n == 17
    assert round(summaries['rail/emerging'].mean, 1) == 64.6
    assert round(summaries['rail/north_america'].mean, 1) == 40.8
    assert round(summaries['rail/europe'].mean, 1) == 34.2


def test_summary_single_observation_and_missing_group(caplog):
    summaries = summarize(obs([12.0]), group_by='all', groups=[('all',), ('none',)])
    assert len(summaries) == 1
    assert summaries[0].std_dev == 0.0
    assert 'single observation' in caplog.text
    assert 'no observations' in caplog.text


def test_summary_shares():
    s = summarize(obs([-30, -5, 0, 10, 25]), group_by=None)[0]
    assert s.share_with_overrun == pytest.approx(0.4)
    assert s.share_below_zero == pytest.approx(0.4)
    assert s.share_outside_band == pytest.approx(0.4)
    s = summarize(obs([-30, -5, 0, 10, 25]), group_by=None, band_halfwidth=50)[0]
    assert s.share_outside_band == 0.0
    with pytest.raises(ValueError):
        summarize(obs([1, 2]), group_by='country')


def test_mean_nonzero_matches_scipy():
    values = [44.0, 12.5, -3.0, 80.1, 27.3, 5.5, 61.0]
    result = analysis.test_mean_nonzero(obs(values))
    reference = stats.ttest_1samp(values, 0.0)
    assert result.statistic == pytest.approx(reference.statistic, rel=1e-12)
    assert result.p_value == pytest.approx(reference.pvalue, rel=1e-9)
    assert result.metadata['df'] == 6


def test_mean_nonzero_degenerate():
    with pytest.raises(DegenerateSampleError):
        analysis.test_mean_nonzero(obs([5.0]))
    with pytest.raises(DegenerateSampleError):
        analysis.test_mean_nonzero(obs([5.0, 5.0, 5.0]))


def test_rail_cost_bias_is_significant(cost_dataset):
    rail = [o for o in observations(cost_dataset, Kind.COST_OVERRUN) if o.project_type.value == 'rail']
    result = analysis.test_mean_nonzero(rail)
    assert result.reject_at_5pct
    assert result.p_value < 1e-6


def test_group_difference_matches_welch():
    a = [44.0, 12.5, -3.0, 80.1, 27.3, 5.5, 61.0]
    b = [20.0, 18.2, 3.3, 25.0, 9.9]
    result = analysis.test_group_difference(obs(a), obs(b))
    reference = stats.ttest_ind(a, b, equal_var=False)
    assert result.statistic == pytest.approx(reference.statistic, rel=1e-12)
    assert result.p_value == pytest.approx(reference.pvalue, rel=1e-9)
    assert result.metadata['n_a'] == 7
    with pytest.raises(DegenerateSampleError):
        analysis.test_group_difference(obs([1.0]), obs(b))


def test_rail_and_road_overruns_differ(cost_dataset):
    costs = observations(cost_dataset, Kind.COST_OVERRUN)
    rail = [o for o in costs if o.project_type.value == 'rail']
    road = [o for o in costs if o.project_type.value == 'road']
    result = analysis.test_group_difference(rail, road)
    assert result.statistic > 0
    assert result.reject_at_5pct


def test_time_trend_closed_form():
    # fitted 1 and 11, residuals +/-1: slope 10, stderr sqrt(2), df 2
    result = analysis.test_time_trend(obs([0, 2, 10, 12], years=[2000, 2000, 2001, 2001]))
    t = 10.0 / np.sqrt(2.0)
    assert result.statistic == pytest.approx(t)
    assert result.metadata['slope'] == pytest.approx(10.0)
    assert result.metadata['df'] == 2
    assert result.p_value == pytest.approx(1.0 - t / np.sqrt(t * t + 2.0), rel=1e-9)


def test_time_trend_exact_fit():
    result = analysis.test_time_trend(obs([0, 1, 2], years=[2000, 2001, 2002]))
    assert result.statistic is None
    assert result.metadata['exact_fit'] is True
    assert result.metadata['slope'] == pytest.approx(1.0)
    assert result.p_value == 0.0
    assert result.reject_at_5pct
    assert 'statistic=n/a' in str(result)
    flat = analysis.test_time_trend(obs([5, 5, 5], years=[2000, 2001, 2002]))
    assert flat.statistic is None
    assert flat.p_value == 1.0


def test_time_trend_matches_linregress(cost_dataset):
    costs = observations(cost_dataset, Kind.COST_OVERRUN)
    result = analysis.test_time_trend(costs)
    fit = stats.linregress([o.decision_year for o in costs], [o.value for o in costs])
    assert result.metadata['slope'] == pytest.approx(fit.slope)
    assert result.p_value == pytest.approx(fit.pvalue, rel=1e-6)


def test_time_trend_errors():
    with pytest.raises(NoTimeVariationError):
        analysis.test_time_trend(obs([1, 2, 3], years=[1990, 1990, 1990]))
    with pytest.raises(DegenerateSampleError):
        analysis.test_time_trend(obs([1, 2], years=[1990, 1991]))
    with pytest.raises(ValueError):
        analysis.test_time_trend(obs([1, 2, 3]))


def test_time_trend_null_rejection_rate():
    rng = np.random.default_rng(20091101)
    rejections = 0
    for _ in range(1000):
        years = rng.integers(1960, 2000, size=30)
        values = rng.normal(20.0, 30.0, size=30)
        if analysis.test_time_trend(obs(values, years=list(years))).reject_at_5pct:
            rejections += 1
    assert rejections / 1000 <= 0.07


def test_robust_outliers(caplog):
    values = [10, 12, 11, 9, 13, 10, 11, 250]
    flagged = robust_outliers(obs(values))
    assert [o.project_id for o, _ in flagged] == ['P7']
    kept, excluded = exclude_outliers(obs(values))
    assert len(kept) == 7
    assert [o.value for o in excluded] == [250.0]
    assert 'Excluding outlier P7' in caplog.text
    assert robust_outliers(obs([5, 5, 5, 5, 40])) == []


def test_test_functions_not_collected():
    assert analysis.test_mean_nonzero.__test__ is False
    assert analysis.TestResult.__test__ is False


def test_inaccuracy_is_scale_invariant(make_record):
    rng = np.random.default_rng(11)
    for _ in range(200):
        est, act, fc, seen = (float(x) for x in rng.uniform(1.0, 1000.0, size=4))
        c = float(rng.uniform(0.01, 1000.0))
        base = make_record(
            estimated_cost=est, actual_cost=act, estimated_traffic=fc, actual_traffic=seen
        )
        scaled = make_record(
            estimated_cost=c * est,
            actual_cost=c * act,
            estimated_traffic=c * fc,
            actual_traffic=c * seen,
        )
        assert cost_overrun(scaled) == pytest.approx(cost_overrun(base), rel=1e-12, abs=1e-10)
        assert traffic_inaccuracy(scaled) == pytest.approx(
            traffic_inaccuracy(base), rel=1e-12, abs=1e-10
        )


def test_pooled_mean_is_count_weighted(cost_dataset):
    costs = observations(cost_dataset, Kind.COST_OVERRUN)
    by_type = summarize(costs)
    (pooled,) = summarize(costs, group_by='all')
    assert pooled.n == sum(s.n for s in by_type)
    assert pooled.mean == pytest.approx(sum(s.n * s.mean for s in by_type) / pooled.n, rel=1e-12)


def test_shares_ignore_order():
    rng = np.random.default_rng(12)
    values = rng.normal(10.0, 30.0, size=60).round(1)
    (ref,) = summarize(obs(values), group_by='all')
    for _ in range(20):
        (s,) = summarize(obs(rng.permutation(values)), group_by='all')
        assert s.n == ref.n
        assert s.share_with_overrun == ref.share_with_overrun
        assert s.share_below_zero == ref.share_below_zero
        assert s.share_outside_band == ref.share_outside_band


def test_duplicated_sample_is_no_less_significant():
    rng = np.random.default_rng(13)
    for _ in range(200):
        values = rng.normal(rng.uniform(-5.0, 5.0), 20.0, size=int(rng.integers(2, 30)))
        once = analysis.test_mean_nonzero(values)
        twice = analysis.test_mean_nonzero(np.concatenate([values, values]))
        assert twice.p_value <= once.p_value


def test_balanced_sample_has_zero_statistic():
    result = analysis.test_mean_nonzero(obs([-5, 5, -5, 5]))
    assert result.statistic == 0.0
    assert result.p_value == 1.0
    assert not result.reject_at_5pct
