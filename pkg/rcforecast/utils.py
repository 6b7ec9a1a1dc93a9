"""
utils.py
========

rcforecast utility functions
--------------------------------------------------------------------------------

Seeded random streams, the bundled fixture directory, and small helpers shared
by the readers and the command line.
"""
import os

import numpy as np

# 1 November 2009, used whenever a command is run without --seed
DEFAULT_SEED = 20091101
MAX_SEED = 2 ** 64

FIXTURE_ENV = "RCFORECAST_FIXTURES"
_REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_FIXTURE_DIR = os.path.join(_REPO_ROOT, "test_data", "fixtures")

# Sub-stream keys; each consumer of randomness draws from its own branch
STREAM_DRAWS = 0
STREAM_HISTORY = 1
STREAM_BOOTSTRAP = 2


def check_seed(seed):
    """Return `seed` as int, or raise ValueError if outside [0, 2**64)."""
    try:
        value = int(seed)
    except (TypeError, ValueError):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if value != seed and not isinstance(seed, str):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if not 0 <= value < MAX_SEED:
        raise ValueError(f"seed {value} outside [0, 2**64)")
    return value


def rng_for(seed, *key):
    """Independent Generator for the sub-stream `key` of `seed`.

    Streams are addressed by (seed, key) alone, so the values a block or trial
    receives do not depend on which worker runs it or in what order.

    Parameters
    ----------
    seed : int
    *key : int
        Spawn key, e.g. (STREAM_DRAWS, trial_index).

    Returns
    -------
    numpy.random.Generator
    """
    return np.random.default_rng(
        np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    )


def fixture_dir():
    """Directory of bundled fixtures, overridable by $RCFORECAST_FIXTURES."""
    return os.environ.get(FIXTURE_ENV) or DEFAULT_FIXTURE_DIR


def fixture_path(name):
    return os.path.join(fixture_dir(), name)


def enum_value(e):
    """Plain string of an enum member (or the object itself)."""
    return getattr(e, "value", e)


def block_sizes(total, block):
    """Split `total` items into consecutive blocks of at most `block`."""
    full, rest = divmod(int(total), int(block))
    sizes = [int(block)] * full
    if rest:
        sizes.append(rest)
    return sizes
