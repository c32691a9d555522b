"""Repository implementations (YAML scenarios, CSV/JSON reports)."""

from .csv_report_writer import CsvReportWriter
from .yaml_scenario_repository import YamlScenarioRepository

__all__ = ["CsvReportWriter", "YamlScenarioRepository"]
