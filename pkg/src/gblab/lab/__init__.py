"""Scenario files, experiment runners, reports and the command-line entry point."""

from .experiments import RUNNERS, partitions, run_scenario
from .report import Quantity, Report, Table, emit_report, load_report, report_json, table_csv
from .scenario import (EXPERIMENTS, ScenarioConfig, ValidationError, default_lines,
                       load_scenario, parse_scenario)

__all__ = [
    "EXPERIMENTS", "Quantity", "RUNNERS", "Report", "ScenarioConfig", "Table", "ValidationError",
    "default_lines", "emit_report", "load_report", "load_scenario", "parse_scenario",
    "partitions", "report_json", "run_scenario", "table_csv",
]
