"""run command implementation.

シナリオを一括実行し、spectra.csv / verdicts.csv / report.json を書き出すコマンドです。
"""

import argparse
import logging
from pathlib import Path
from typing import Any

from leafspec.application.usecases.run_scenario_usecase import RunScenarioUseCase
from leafspec.infrastructure.repositories.csv_report_writer import CsvReportWriter
from leafspec.infrastructure.repositories.yaml_scenario_repository import YamlScenarioRepository
from leafspec.presentation.commands.common import add_common_arguments
from leafspec.presentation.config_loader import load_runtime_settings

logger = logging.getLogger(__name__)


def add_arguments(subparsers: Any) -> None:
    """Add run subcommand and its arguments.

    Args:
        subparsers: Subparsers action to add the command to.
    """
    parser = subparsers.add_parser("run", help="Run every job in a scenario")
    add_common_arguments(parser)
    parser.add_argument("--out", "-o", required=True, help="Output directory")
    parser.add_argument(
        "--jobs",
        "-j",
        type=int,
        help="Number of worker threads (default: $LEAFSPEC_JOBS or min(4, CPUs))",
    )


def run(args: argparse.Namespace) -> int:
    """Execute run command.

    Returns:
        Exit status (0: success, 1: failed jobs, 2: theorem inconsistency)
    """
    settings = load_runtime_settings(args.jobs)
    logger.info("Workers: %d", settings.jobs)

    usecase = RunScenarioUseCase(
        scenario_repo=YamlScenarioRepository(),
        report_writer=CsvReportWriter(),
        max_workers=settings.jobs,
    )
    result = usecase.execute(Path(args.scenario), Path(args.out))

    logger.info("=" * 70)
    logger.info("Run completed")
    logger.info("  Spectra: %d", len(result.report.spectra))
    logger.info("  Verdicts: %d", len(result.report.verdicts))
    for path in result.written:
        logger.info("  Wrote: %s", path)
    if result.report.failures:
        logger.error("  Failed jobs: %d", len(result.report.failures))
        for failure in result.report.failures:
            logger.error("    %s", failure)
    if result.report.inconsistent_pairs:
        logger.error("  Theorem inconsistencies: %s", ", ".join(result.report.inconsistent_pairs))
    logger.info("=" * 70)
    return result.exit_status
