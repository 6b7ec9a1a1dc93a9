import os

import numpy as np
import pytest

from rcforecast import fixtures
from rcforecast.data.analysis import summarize
from rcforecast.data.record import Kind, observations
from rcforecast.file.read import read_dataset


@pytest.mark.parametrize('shape', ['exponential', 'logistic', 'uniform'])
def test_calibrated_sample(shape):
    values = np.array(fixtures.calibrated_sample(40, 12.5, 30.0, shape=shape))
    assert values.size == 40
    assert np.mean(values) == pytest.approx(12.5, abs=0.01)
    assert np.std(values, ddof=1) == pytest.approx(30.0, abs=0.01)
    assert np.all(np.diff(values) >= 0)
    with pytest.raises(ValueError):
        fixtures.calibrated_sample(10, 0.0, 1.0, shape='normal')


def test_within_group_sd_reproduces_pooled_sd():
    sd = fixtures.within_group_sd(fixtures.RAIL_COST_REGIONS, fixtures.RAIL_COST_SD)
    values = np.concatenate(
        [fixtures.calibrated_sample(n, m, sd) for _, n, m in fixtures.RAIL_COST_REGIONS]
    )
    assert values.size == 58
    assert np.std(values, ddof=1) == pytest.approx(38.4, abs=0.01)


def test_write_fixtures(tmp_path):
    paths = fixtures.write_fixtures(str(tmp_path / 'generated'))
    assert [os.path.basename(p) for p in paths] == list(fixtures.FILES)
    costs, traffic, paired = (read_dataset(p) for p in paths)
    assert (len(costs), len(traffic), len(paired)) == (258, 208, 12)
    by_group = {
        s.label: s for s in summarize(observations(costs, Kind.COST_OVERRUN), group_by='type,region')
    }
    assert round(by_group['rail/emerging'].mean, 1) == 64.6
    rail = summarize(observations(traffic, Kind.TRAFFIC_INACCURACY))[0]
    assert (rail.label, round(rail.mean, 1), round(rail.std_dev, 1)) == ('rail', -51.4, 28.1)
    assert all(r.has_outturn and r.has_traffic for r in paired)


def test_generated_fixtures_match_bundled(tmp_path, cost_dataset):
    (path, _, _) = fixtures.write_fixtures(str(tmp_path))
    generated = read_dataset(path)
    assert [r.id for r in generated] == [r.id for r in cost_dataset]
    for new, bundled in zip(
        observations(generated, Kind.COST_OVERRUN), observations(cost_dataset, Kind.COST_OVERRUN)
    ):
        assert new.value == pytest.approx(bundled.value, abs=0.011)


def test_blocked_sample_keeps_fixed_blocks():
    values = np.array(fixtures.blocked_sample(25, -51.4, 28.1, fixtures.RAIL_TRAFFIC_BLOCKS))
    assert values.size == 25
    assert np.mean(values) == pytest.approx(-51.4, abs=0.01)
    assert np.std(values, ddof=1) == pytest.approx(28.1, abs=0.01)
    assert np.all(np.diff(values) >= 0)
    assert values[-4:].tolist() == [-11.25, -3.75, 3.75, 11.25]
    assert np.count_nonzero(values < 0) == 23


@pytest.mark.parametrize(
    'blocks',
    [
        ((24, 0.0, 1.0),),
        ((4, 0.0, 500.0),),
    ],
)
def test_blocked_sample_infeasible(blocks):
    with pytest.raises(ValueError):
        fixtures.blocked_sample(25, -51.4, 28.1, blocks)


def test_generated_traffic_matches_bundled(tmp_path, traffic_dataset):
    (_, path, _) = fixtures.write_fixtures(str(tmp_path))
    generated = observations(read_dataset(path), Kind.TRAFFIC_INACCURACY)
    bundled = observations(traffic_dataset, Kind.TRAFFIC_INACCURACY)
    assert [o.project_id for o in generated] == [o.project_id for o in bundled]
    for new, old in zip(generated, bundled):
        assert new.value == pytest.approx(old.value, abs=0.011)
