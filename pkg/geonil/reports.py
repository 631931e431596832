"""Write reports as JSON lines and depth tables as CSV."""

import csv
import pathlib
from typing import IO, Iterable, List, Optional, Union

from geonil.constants import DEPTH_TABLE_HEADER
from geonil.models import CandidateRecord, DepthTableRecord, VerificationReport

Serializable = Union[VerificationReport, CandidateRecord, DepthTableRecord]


def _cell(value) -> str:
    return "" if value is None else str(value)


def depth_table_row(record: DepthTableRecord) -> List[str]:
    """Return one CSV row for a depth table."""

    field = record.field
    return [
        str(field.p),
        str(field.m),
        str(field.p**field.m),
        str(record.points),
        _cell(record.depth_min),
        _cell(record.depth_max),
        _cell(record.depth_mean),
        str(record.nonterminating),
        record.hist_text,
    ]


def write_depth_tables(records: Iterable[DepthTableRecord], stream: IO[str]):
    """Write depth tables as CSV with a header row."""

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(DEPTH_TABLE_HEADER)
    for record in records:
        writer.writerow(depth_table_row(record))


def write_json_lines(items: Iterable[Serializable], stream: IO[str], timing: bool = True):
    """Write one compact JSON object per line."""

    for item in items:
        if isinstance(item, VerificationReport):
            stream.write(item.to_json(timing=timing))
        else:
            stream.write(item.to_json())
        stream.write("\n")


def parse_json_lines(text: str) -> List[VerificationReport]:
    """Read reports back from JSON lines, validating each one."""

    return [VerificationReport.parse_raw(line) for line in text.splitlines() if line.strip()]


def write_output(
    path: Optional[pathlib.Path],
    items: Iterable[Serializable] = (),
    tables: Iterable[DepthTableRecord] = (),
    csv_format: bool = False,
    timing: bool = True,
):
    """Write reports (or, in CSV format, their depth tables) to a file, if one was named."""

    if path is None:
        return
    with path.open("w", newline="") as stream:
        if csv_format:
            write_depth_tables(tables, stream)
        else:
            write_json_lines(items, stream, timing)
