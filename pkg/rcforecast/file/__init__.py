"""
file
====

Read datasets, reference classes and configuration; write reports.
"""

from . import read, write
from .read import (
    Dataset,
    DatasetError,
    parse_dataset,
    read_appraisal,
    read_dataset,
    read_options,
    read_reference_class,
)
from .write import write_csv, write_report
