"""
file/read.py
============

Readers for project datasets, reference classes and configuration files.
--------------------------------------------------------------------------------

Datasets are UTF-8 CSV with the header

    id,name,project_type,region,decision_year,completion_year,
    estimated_cost,actual_cost,estimated_traffic,actual_traffic

An empty field means "absent". Costs must be in constant prices; no deflation
or currency conversion is applied.

Reference classes are CSV with the header `project_id,value`. Appraisal and
simulation configuration files are JSON objects.
"""
import csv
import json
import logging
import math
import os

import jsons
from jsons.exceptions import JsonsError

from ..data.record import (
    Kind,
    ProjectRecord,
    ProjectType,
    RecordInvariantError,
    Region,
)
from ..refclass.builder import reference_class_from_values
from ..simulation.promoter import ConfigurationError
from ..simulation.experiment import SimulationOptions
from ..viability.appraisal import AppraisalInput

DATASET_FIELDS = (
    "id",
    "name",
    "project_type",
    "region",
    "decision_year",
    "completion_year",
    "estimated_cost",
    "actual_cost",
    "estimated_traffic",
    "actual_traffic",
)
CLASS_FIELDS = ("project_id", "value")


class DatasetError(ValueError):
    """A dataset row cannot be turned into a valid ProjectRecord.

    Attributes
    ----------
    row : int
        1-based data row (the header is row 0).
    field : str or None
    line : int
        Line number in the file.
    """

    def __init__(self, message, row=None, field=None, line=None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(prefix + message)
        self.message = message
        self.row = row
        self.field = field
        self.line = line


class Dataset(list):
    """Records in file order, with the name of the file they came from."""

    def __init__(self, records=(), provenance=None):
        super().__init__(records)
        self.provenance = provenance


def _text(row, name):
    value = row.get(name)
    return value.strip() if value is not None else ""


def _number(row, name, cast=float, required=False):
    text = _text(row, name)
    if not text:
        if required:
            raise DatasetError("required value missing", field=name)
        return None
    try:
        value = cast(text)
    except ValueError:
        raise DatasetError(f"'{text}' is not a valid {cast.__name__}", field=name)
    if cast is float and not math.isfinite(value):
        raise DatasetError(f"'{text}' is not a finite number", field=name)
    return value


def _enum(row, name, enum_cls):
    text = _text(row, name)
    try:
        return enum_cls(text)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise DatasetError(f"'{text}' is not one of {allowed}", field=name)


def _record(row):
    if None in row:
        raise DatasetError("more values than header columns")
    project_id = _text(row, "id")
    if not project_id:
        raise DatasetError("required value missing", field="id")
    estimated_traffic = _number(row, "estimated_traffic")
    actual_traffic = _number(row, "actual_traffic")
    if (estimated_traffic is None) != (actual_traffic is None):
        raise DatasetError(
            "traffic fields must be both present or both absent",
            field="estimated_traffic" if estimated_traffic is None else "actual_traffic",
        )
    try:
        return ProjectRecord(
            id=project_id,
            name=_text(row, "name"),
            project_type=_enum(row, "project_type", ProjectType),
            region=_enum(row, "region", Region),
            decision_year=_number(row, "decision_year", int, required=True),
            completion_year=_number(row, "completion_year", int),
            estimated_cost=_number(row, "estimated_cost", required=True),
            actual_cost=_number(row, "actual_cost"),
            estimated_traffic=estimated_traffic,
            actual_traffic=actual_traffic,
        )
    except RecordInvariantError as e:
        raise DatasetError(str(e), field=e.field)


def parse_dataset(stream, provenance=None):
    """Parse a dataset CSV stream into validated ProjectRecords.

    Parameters
    ----------
    stream : text file-like
        Open with newline="" for correct CSV quoting.
    provenance : str, optional
        Identifier recorded on the returned Dataset.

    Returns
    -------
    Dataset
        List of ProjectRecord in row order.

    Raises
    ------
    DatasetError
        Missing or unknown header columns, malformed rows, duplicate ids, or
        records breaking an invariant. The error names the row and field.
    """
    reader = csv.DictReader(stream)
    header = reader.fieldnames
    if header is None:
        raise DatasetError("empty file: header row required", row=0)
    header = [h.strip() for h in header]
    missing = [f for f in DATASET_FIELDS if f not in header]
    unknown = [f for f in header if f not in DATASET_FIELDS]
    if missing or unknown:
        parts = []
        if missing:
            parts.append(f"missing columns {', '.join(missing)}")
        if unknown:
            parts.append(f"unknown columns {', '.join(unknown)}")
        raise DatasetError("bad header: " + "; ".join(parts), row=0, line=1)
    reader.fieldnames = header

    records = Dataset(provenance=provenance)
    seen = {}
    for i, row in enumerate(reader, 1):
        try:
            if not any(_text(row, f) for f in DATASET_FIELDS if f in row):
                continue
            record = _record(row)
            if record.id in seen:
                raise DatasetError(
                    f"duplicate id '{record.id}' (first seen in row {seen[record.id]})",
                    field="id",
                )
        except DatasetError as e:
            logging.exception("Error loading dataset at line %d", reader.line_num)
            logging.info("LINE: %s", row)
            raise DatasetError(
                e.message,
                row=i,
                field=e.field,
                line=reader.line_num,
            ) from e
        seen[record.id] = i
        records.append(record)
    logging.info("Read %d project records", len(records))
    return records


def read_dataset(path):
    """Read a dataset CSV file; its file name becomes the provenance."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_dataset(fh, provenance=os.path.basename(path))


def read_reference_class(path, kind=Kind.COST_OVERRUN, min_size=2):
    """Read an exported reference class (`project_id,value` CSV).

    Returns
    -------
    ReferenceClass
        Provenance is the file name.
    """
    pairs = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [
            h.strip() for h in reader.fieldnames
        ] != list(CLASS_FIELDS):
            raise DatasetError(
                f"{path}: header must be {','.join(CLASS_FIELDS)}", row=0, line=1
            )
        reader.fieldnames = list(CLASS_FIELDS)
        for i, row in enumerate(reader, 1):
            try:
                if None in row:
                    raise DatasetError("more values than header columns")
                value = _number(row, "value", required=True)
                pairs.append((_text(row, "project_id"), value))
            except DatasetError as e:
                logging.exception(
                    "Error loading reference class at line %d", reader.line_num
                )
                raise DatasetError(
                    f"{path}: {e.message}", row=i, field=e.field, line=reader.line_num
                ) from e
    return reference_class_from_values(
        pairs, kind=kind, provenance=os.path.basename(path), min_size=min_size
    )


def _load_json_object(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{path}: not valid JSON ({e})")
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: expected a JSON object")
    return data


def _deserialize(path, data, cls, allowed):
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigurationError(f"{path}: unknown keys {', '.join(unknown)}")
    try:
        return jsons.load(data, cls, strict=True)
    except (JsonsError, TypeError) as e:
        raise ConfigurationError(f"{path}: {e}")


def read_appraisal(path):
    """Read an appraisal JSON object into an AppraisalInput.

    Keys: forecast_cost, forecast_annual_benefit, horizon_years,
    discount_rate.
    """
    data = _load_json_object(path)
    missing = [k for k in AppraisalInput.__dataclass_fields__ if k not in data]
    if missing:
        raise ConfigurationError(f"{path}: missing keys {', '.join(missing)}")
    return _deserialize(path, data, AppraisalInput, AppraisalInput.__dataclass_fields__)


def read_options(path):
    """Read simulation options from a JSON object; absent keys keep defaults."""
    data = _load_json_object(path)
    options = _deserialize(path, data, SimulationOptions, vars(SimulationOptions()))
    logging.debug("Simulation options from %s:\n%s", path, options)
    return options
