import sys, os

code_path = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.join(code_path, '..'))
sys.path.insert(0, code_path)

import pytest

from rcforecast.data.record import Kind, ProjectRecord
from rcforecast.file.read import read_dataset, read_reference_class
from rcforecast.utils import DEFAULT_FIXTURE_DIR

FIXTURES = DEFAULT_FIXTURE_DIR
CONFIG_DIR = os.path.join(code_path, '..', 'test_data', 'config')


def fixture_file(name):
    return os.path.join(FIXTURES, name)


@pytest.fixture
def cost_path():
    return fixture_file('cost_overruns.csv')


@pytest.fixture
def traffic_path():
    return fixture_file('traffic_inaccuracy.csv')


@pytest.fixture
def paired_path():
    return fixture_file('paired_urban_rail.csv')


@pytest.fixture
def rail_anchor_path():
    """Class with median 40 and 0.9-quantile 68."""
    return fixture_file('rail_uplift_anchor_class.csv')


@pytest.fixture
def tram_anchor_path():
    """Class with 0.5-quantile 11.5625 and 0.8-quantile 25."""
    return fixture_file('tram_anchor_class.csv')


@pytest.fixture
def appraisal_path():
    return os.path.join(CONFIG_DIR, 'appraisal.json')


@pytest.fixture
def simulation_config_path():
    return os.path.join(CONFIG_DIR, 'simulation.json')


@pytest.fixture
def cost_dataset(cost_path):
    return read_dataset(cost_path)


@pytest.fixture
def traffic_dataset(traffic_path):
    return read_dataset(traffic_path)


@pytest.fixture
def rail_anchor(rail_anchor_path):
    return read_reference_class(rail_anchor_path).distribution


@pytest.fixture
def tram_anchor(tram_anchor_path):
    return read_reference_class(tram_anchor_path).distribution


@pytest.fixture
def make_record():
    """
    Factory for ProjectRecords; keyword arguments override the defaults.
    """

    def _make(**kwargs):
        fields = dict(
            id='X1',
            name='Test project',
            project_type='rail',
            region='europe',
            decision_year=1990,
            estimated_cost=100.0,
        )
        fields.update(kwargs)
        return ProjectRecord(**fields)

    return _make


def write_csv_file(path, text):
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write(text)
    return str(path)


DATASET_HEADER = (
    'id,name,project_type,region,decision_year,completion_year,'
    'estimated_cost,actual_cost,estimated_traffic,actual_traffic\n'
)
