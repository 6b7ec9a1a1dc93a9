"""
fixtures.py
===========

Generator of the bundled synthetic datasets.
--------------------------------------------------------------------------------

Only group aggregates of the historical cost and traffic data are published, so
the bundled files are synthetic. Each group is a deterministic sample with a
chosen shape, standardized and rescaled to the published count, mean and
standard deviation, and rounded to 0.01 percentage points. Groups with a
published share (road cost overruns, rail and road traffic) are built from
evenly spaced blocks instead, one of them solved for. Estimated costs and
traffic cycle through fixed grids; actuals are derived from the sample value.

The files are never the historical raw data. test_data/fixtures/MANIFEST.md
lists the aggregates each file is calibrated to.
"""
import csv
import logging
import math
import os

import numpy as np

from .file.read import DATASET_FIELDS

COST_GRID = (100, 200, 250, 400, 500, 1000, 1250, 2000)
TRAFFIC_GRID = (10000, 25000, 40000, 80000, 120000)
LABELS = {"rail": "Rail", "road": "Road", "bridge_tunnel": "Bridge/tunnel"}

# (region, n, mean) of the regional rail groups; pooled SD 38.4 over 58
RAIL_COST_REGIONS = (
    ("emerging", 17, 64.6),
    ("north_america", 14, 40.8),
    ("europe", 27, 34.2),
)
RAIL_COST_SD = 38.4
BRIDGE_COST = (33, 33.8, 62.4)
BRIDGE_REGIONS = ("europe", "north_america", "other")
ROAD_COST = (167, 20.4, 29.9)
# (count, centre, width) blocks; the remaining values are solved for
ROAD_COST_BLOCKS = ((17, -8.0, 14.0), (130, 14.0, 24.0))
ROAD_REGIONS = ("europe", "north_america", "europe", "other", "emerging")
RAIL_TRAFFIC = (25, -51.4, 28.1)
RAIL_TRAFFIC_BLOCKS = ((4, 0.0, 30.0),)
RAIL_TRAFFIC_REGIONS = ("europe", "north_america")
ROAD_TRAFFIC = (183, 9.5, 44.3)
ROAD_TRAFFIC_BLOCKS = ((92, 0.0, 36.0), (45, -40.0, 40.0))
ROAD_TRAFFIC_REGIONS = ("europe", "north_america", "other")
PAIRED_COST = (12, 40.3, 38.4)
PAIRED_TRAFFIC = (12, -47.8, 28.1)

FILES = ("cost_overruns.csv", "traffic_inaccuracy.csv", "paired_urban_rail.csv")


def calibrated_sample(n, mean, sd, shape="exponential"):
    """n values with sample mean `mean` and SD `sd` (ddof=1), rounded to 0.01.

    shape is one of 'exponential', 'logistic' or 'uniform'; the base values
    are the shape's quantiles at (i - 0.5) / n.
    """
    u = (np.arange(1, n + 1) - 0.5) / n
    if shape == "exponential":
        base = -np.log(1.0 - u)
    elif shape == "logistic":
        base = np.log(u / (1.0 - u))
    elif shape == "uniform":
        base = u
    else:
        raise ValueError(f"unknown shape '{shape}'")
    z = (base - base.mean()) / base.std(ddof=1)
    return [float(f"{v:.2f}") for v in mean + sd * z]


def _even_grid(count):
    return (np.arange(1, count + 1) - 0.5) / count - 0.5


def blocked_sample(n, mean, sd, blocks):
    """n values with sample mean `mean` and SD `sd` (ddof=1), rounded to 0.01.

    blocks lists fixed (count, centre, width) groups of evenly spaced values.
    The remaining values form one more evenly spaced group whose centre and
    width are solved from mean and sd, so a group can also carry a published
    share (below zero, inside a band) that no single shape reproduces.
    """
    fixed = np.concatenate([c + w * _even_grid(k) for k, c, w in blocks])
    free = n - fixed.size
    if free < 2:
        raise ValueError(f"blocks leave {free} values to solve for")
    centre = (n * mean - fixed.sum()) / free
    grid = _even_grid(free)
    spread = (
        (n - 1) * sd ** 2
        - np.sum((fixed - mean) ** 2)
        - free * (centre - mean) ** 2
    )
    if spread < 0:
        raise ValueError(f"blocks already exceed SD {sd}")
    width = math.sqrt(spread / np.sum(grid ** 2))
    values = np.sort(np.concatenate([fixed, centre + width * grid]))
    return [float(f"{v:.2f}") for v in values]


def within_group_sd(groups, pooled_sd):
    """Common within-group SD giving `pooled_sd` over the union of groups."""
    total = sum(n for _, n, _ in groups)
    grand = sum(n * m for _, n, m in groups) / total
    between = sum(n * (m - grand) ** 2 for _, n, m in groups)
    return math.sqrt(((total - 1) * pooled_sd ** 2 - between) / (total - len(groups)))


def _amount(value):
    return f"{value:.4f}"


def cost_row(prefix, i, project_type, region, overrun):
    estimate = COST_GRID[i % 8]
    decided = 1927 + (i * 37) % 70
    return (
        f"{prefix}{i + 1:03d}",
        f"{LABELS[project_type]} project {i + 1}",
        project_type,
        region,
        decided,
        decided + 3 + i % 6,
        _amount(estimate),
        _amount(estimate * (1 + overrun / 100)),
        "",
        "",
    )


def traffic_row(prefix, i, project_type, region, inaccuracy):
    traffic = TRAFFIC_GRID[i % 5]
    decided = 1969 + (i * 13) % 30
    return (
        f"{prefix}{i + 1:03d}",
        f"{LABELS[project_type]} project {i + 1}",
        project_type,
        region,
        decided,
        decided + 3 + i % 6,
        _amount(COST_GRID[i % 8]),
        "",
        _amount(traffic),
        _amount(traffic * (1 + inaccuracy / 100)),
    )


def cost_rows():
    rows = []
    sd = within_group_sd(RAIL_COST_REGIONS, RAIL_COST_SD)
    for region, n, mean in RAIL_COST_REGIONS:
        for v in calibrated_sample(n, mean, sd):
            rows.append(cost_row("C", len(rows), "rail", region, v))
    for k, v in enumerate(calibrated_sample(*BRIDGE_COST)):
        region = BRIDGE_REGIONS[k % len(BRIDGE_REGIONS)]
        rows.append(cost_row("C", len(rows), "bridge_tunnel", region, v))
    for k, v in enumerate(blocked_sample(*ROAD_COST, ROAD_COST_BLOCKS)):
        region = ROAD_REGIONS[k % len(ROAD_REGIONS)]
        rows.append(cost_row("C", len(rows), "road", region, v))
    return rows


def traffic_rows():
    rows = []
    for k, v in enumerate(blocked_sample(*RAIL_TRAFFIC, RAIL_TRAFFIC_BLOCKS)):
        region = RAIL_TRAFFIC_REGIONS[k % len(RAIL_TRAFFIC_REGIONS)]
        rows.append(traffic_row("T", len(rows), "rail", region, v))
    for k, v in enumerate(blocked_sample(*ROAD_TRAFFIC, ROAD_TRAFFIC_BLOCKS)):
        region = ROAD_TRAFFIC_REGIONS[k % len(ROAD_TRAFFIC_REGIONS)]
        rows.append(traffic_row("T", len(rows), "road", region, v))
    return rows


def paired_rows():
    overruns = calibrated_sample(*PAIRED_COST)
    inaccuracies = calibrated_sample(*PAIRED_TRAFFIC, shape="uniform")
    rows = []
    for i, (o, t) in enumerate(zip(overruns, inaccuracies)):
        estimate = COST_GRID[i % 8]
        traffic = TRAFFIC_GRID[i % 5]
        decided = 1975 + (i * 7) % 25
        rows.append(
            (
                f"P{i + 1:02d}",
                f"Urban rail project {i + 1}",
                "rail",
                "europe" if i % 2 == 0 else "north_america",
                decided,
                decided + 4 + i % 5,
                _amount(estimate),
                _amount(estimate * (1 + o / 100)),
                _amount(traffic),
                _amount(traffic * (1 + t / 100)),
            )
        )
    return rows


def write_fixtures(directory):
    """Write the three bundled datasets into `directory`; return their paths."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, rows in zip(FILES, (cost_rows(), traffic_rows(), paired_rows())):
        path = os.path.join(directory, name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(DATASET_FIELDS)
            writer.writerows(rows)
        logging.info("Wrote %d rows to %s", len(rows), path)
        paths.append(path)
    return paths
