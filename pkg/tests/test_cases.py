"""Test the depth tables of known systems."""

import pathlib

import pytest
import yaml

from geonil import cli, reports
from geonil.config import RunConfig
from geonil.fields import field_for
from geonil.models import DepthTableRecord
from geonil.orbits import depth_profile

# Get the path to the "cases" directory that lives next to this module
CASE_BASE = pathlib.Path(__file__).parent / "cases"


@pytest.mark.parametrize("case_name", sorted(path.name for path in CASE_BASE.iterdir()))
def test_named_case(case_name, tmp_path):
    """Ensure that the named test case's system yields the expected depth table.

    Each case has inputs/run.yaml holding the field options and either an example name or a
    neighboring inputs/system.yaml.
    """

    test_base = CASE_BASE / case_name
    options = yaml.safe_load((test_base / "inputs" / "run.yaml").read_text())
    system_path = test_base / "inputs" / "system.yaml"
    if system_path.exists():
        options["system"] = system_path

    config = RunConfig(command="depth-table", **options)
    instance = cli._instance(config)
    records = []
    for m in range(1, config.m_max + 1):
        spec = field_for(config.p, m)
        table = depth_profile(instance.map, instance.variety, spec, instance.target(spec))
        records.append(DepthTableRecord.from_table(table))

    output_path = tmp_path / "depth_table.csv"
    reports.write_output(output_path, records, records, csv_format=True)

    expected_output = (test_base / "outputs" / "depth_table.csv").read_text()
    assert output_path.read_text() == expected_output
