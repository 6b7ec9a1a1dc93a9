import io
import json

import pytest

from conftest import DATASET_HEADER, write_csv_file
from rcforecast.data import analysis
from rcforecast.data.analysis import summarize
from rcforecast.data.record import InaccuracyObservation, Kind, ProjectType, Region, observations
from rcforecast.file import write
from rcforecast.file.read import (
    DatasetError,
    parse_dataset,
    read_appraisal,
    read_dataset,
    read_options,
    read_reference_class,
)
from rcforecast.simulation.promoter import ConfigurationError
from rcforecast.viability.appraisal import AppraisalInput


def parse(text):
    return parse_dataset(io.StringIO(DATASET_HEADER + text), provenance='inline')


def test_read_cost_fixture(cost_dataset):
    assert len(cost_dataset) == 258
    assert cost_dataset.provenance == 'cost_overruns.csv'
    first = cost_dataset[0]
    assert first.id == 'C001'
    assert first.project_type is ProjectType.RAIL
    assert first.region is Region.EMERGING
    assert first.estimated_cost == 100.0
    assert first.actual_cost == 127.59
    assert first.estimated_traffic is None
    assert all(r.has_outturn for r in cost_dataset)


def test_read_traffic_fixture(traffic_dataset):
    assert len(traffic_dataset) == 208
    assert all(r.has_traffic and not r.has_outturn for r in traffic_dataset)


def test_parse_optional_fields():
    records = parse('A1,Candidate,rail,europe,2005,,350,,,\n')
    assert records[0].actual_cost is None
    assert records[0].completion_year is None
    assert observations(records, Kind.COST_OVERRUN) == []


def test_parse_skips_empty_rows():
    records = parse('A1,One,road,other,1990,1994,100,120,,\n,,,,,,,,,\nA2,Two,road,other,1991,1995,100,90,,\n')
    assert [r.id for r in records] == ['A1', 'A2']


@pytest.mark.parametrize(
    'row, field',
    [
        ('A1,Bad,tram,europe,1990,1994,100,120,,\n', 'project_type'),
        ('A1,Bad,rail,mars,1990,1994,100,120,,\n', 'region'),
        ('A1,Bad,rail,europe,1990,1994,-5,120,,\n', 'estimated_cost'),
        ('A1,Bad,rail,europe,1990,1994,100,0,,\n', 'actual_cost'),
        ('A1,Bad,rail,europe,1990,1985,100,120,,\n', 'completion_year'),
        ('A1,Bad,rail,europe,1990,1994,abc,120,,\n', 'estimated_cost'),
        ('A1,Bad,rail,europe,,1994,100,120,,\n', 'decision_year'),
        ('A1,Bad,rail,europe,1990,1994,100,120,1000,\n', 'actual_traffic'),
        ('A1,Bad,rail,europe,1990,1994,100,120,0,50\n', 'estimated_traffic'),
        (',Bad,rail,europe,1990,1994,100,120,,\n', 'id'),
    ],
)
def test_parse_errors_name_row_and_field(row, field):
    good = 'A0,Good,road,europe,1980,1984,100,110,,\n'
    with pytest.raises(DatasetError) as excinfo:
        parse(good + row)
    assert excinfo.value.row == 2
    assert excinfo.value.field == field
    assert excinfo.value.line == 3
    assert 'row 2' in str(excinfo.value)


def test_parse_duplicate_id():
    with pytest.raises(DatasetError) as excinfo:
        parse('A1,One,road,other,1990,1994,100,120,,\nA1,Two,road,other,1991,1995,100,90,,\n')
    assert 'duplicate id' in str(excinfo.value)
    assert excinfo.value.row == 2


def test_parse_bad_header():
    with pytest.raises(DatasetError) as excinfo:
        parse_dataset(io.StringIO('id,name,kind\nA1,x,rail\n'))
    assert excinfo.value.row == 0
    assert 'missing columns' in str(excinfo.value)
    with pytest.raises(DatasetError):
        parse_dataset(io.StringIO(''))


def test_read_reference_class(rail_anchor_path):
    ref = read_reference_class(rail_anchor_path)
    assert ref.n == 21
    assert ref.provenance == 'rail_uplift_anchor_class.csv'
    assert ref.identifier.startswith('rail_uplift_anchor_class.csv:cost_overrun')
    assert ref.distribution.minimum == -10
    assert ref.distribution.maximum == 120


def test_read_reference_class_errors(tmp_path):
    bad_header = write_csv_file(tmp_path / 'bad.csv', 'id,overrun\nA,1\n')
    with pytest.raises(DatasetError):
        read_reference_class(bad_header)
    bad_value = write_csv_file(tmp_path / 'bad2.csv', 'project_id,value\nA,1\nB,x\n')
    with pytest.raises(DatasetError) as excinfo:
        read_reference_class(bad_value)
    assert excinfo.value.row == 2
    with pytest.raises(OSError):
        read_reference_class(str(tmp_path / 'missing.csv'))


def test_read_appraisal(appraisal_path):
    appraisal = read_appraisal(appraisal_path)
    assert isinstance(appraisal, AppraisalInput)
    assert appraisal.forecast_cost == 4000.0
    assert appraisal.horizon_years == 30


@pytest.mark.parametrize(
    'content',
    [
        '{"forecast_cost": 100, "forecast_annual_benefit": 10, "horizon_years": 5}',
        '{"forecast_cost": 100, "forecast_annual_benefit": 10, "horizon_years": 5, '
        '"discount_rate": 0.03, "currency": "GBP"}',
        '[1, 2, 3]',
        '{"forecast_cost": ',
    ],
)
def test_read_appraisal_rejects(tmp_path, content):
    path = write_csv_file(tmp_path / 'appraisal.json', content)
    with pytest.raises(ConfigurationError):
        read_appraisal(path)


def test_read_options(simulation_config_path, tmp_path):
    options = read_options(simulation_config_path)
    assert options.pool_size == 20
    assert options.policies == ['naive', 'rcf', 'true']
    assert options.confidence_level == 0.99
    # keys absent from the file keep their defaults
    assert options.history_size == 200

    path = write_csv_file(tmp_path / 'sim.json', '{"pool_size": 10, "pool": 3}')
    with pytest.raises(ConfigurationError) as excinfo:
        read_options(path)
    assert 'pool' in str(excinfo.value)


def test_write_report_is_sorted_json(cost_dataset):
    summaries = summarize(observations(cost_dataset, Kind.COST_OVERRUN))
    first = io.StringIO()
    second = io.StringIO()
    write.write_report(first, 'stats', {'summaries': summaries})
    write.write_report(second, 'stats', {'summaries': summaries})
    assert first.getvalue() == second.getvalue()
    document = json.loads(first.getvalue())
    assert set(document) == {'command', 'rcforecast_version', 'report'}
    rail = document['report']['summaries'][0]
    assert rail['group'] == ['rail']
    assert rail['n'] == 58
    assert rail['mean'] == summaries[0].mean


def _reject_constant(name):
    raise ValueError(f'non-standard JSON constant {name}')


def test_exact_trend_report_is_strict_json():
    exact = [
        InaccuracyObservation(
            project_id=f'P{i}', kind=Kind.COST_OVERRUN, value=float(i), decision_year=2000 + i
        )
        for i in range(3)
    ]
    stream = io.StringIO()
    write.write_report(stream, 'stats', {'tests': [analysis.test_time_trend(exact)]})
    document = json.loads(stream.getvalue(), parse_constant=_reject_constant)
    (trend,) = document['report']['tests']
    assert trend['statistic'] is None
    assert trend['metadata']['exact_fit'] is True
    assert trend['p_value'] == 0.0
    rows = write.result_rows([(Kind.COST_OVERRUN, 'all', analysis.test_time_trend(exact))])
    assert rows[0][3] is None


def test_write_csv_round_trips_floats():
    stream = io.StringIO()
    values = [0.1 + 0.2, 1 / 3, 2720.0, -51.4]
    write.write_csv(stream, ('name', 'value'), [('v', v) for v in values] + [('none', None)])
    lines = stream.getvalue().splitlines()
    assert lines[0] == 'name,value'
    assert [float(line.split(',')[1]) for line in lines[1:5]] == values
    assert lines[5] == 'none,'
