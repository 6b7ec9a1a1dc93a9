"""
Regenerate the bundled synthetic datasets in this directory.

    python test_data/fixtures/generate_fixtures.py [output_dir]
"""
import logging
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", ".."))

from rcforecast.fixtures import write_fixtures  # noqa: E402

if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(levelname)s:%(message)s")
    here = os.path.dirname(os.path.abspath(__file__))
    write_fixtures(sys.argv[1] if len(sys.argv) > 1 else here)
