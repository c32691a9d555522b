"""converge command implementation.

格子サイズの列に沿った固有値と誤差比を CSV で標準出力に書くコマンドです。
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any

from leafspec.application.usecases.converge_usecase import ConvergeUseCase
from leafspec.infrastructure.repositories.csv_report_writer import convergence_frame, to_csv_text
from leafspec.infrastructure.repositories.yaml_scenario_repository import YamlScenarioRepository
from leafspec.presentation.commands.common import add_common_arguments, parse_ladder

logger = logging.getLogger(__name__)


def add_arguments(subparsers: Any) -> None:
    """Add converge subcommand and its arguments.

    Args:
        subparsers: Subparsers action to add the command to.
    """
    parser = subparsers.add_parser("converge", help="Convergence study for one presentation")
    add_common_arguments(parser)
    parser.add_argument("name", help="Presentation name")
    parser.add_argument(
        "--ladder",
        type=parse_ladder,
        default=(500, 1000, 2000),
        help="Comma-separated grid sizes, each double the last (default: 500,1000,2000)",
    )
    parser.add_argument("-k", type=int, default=5, help="Number of eigenvalues (default: 5)")
    parser.add_argument(
        "--strict",
        action="store_true",
        help="Fail when an observed ratio deviates from 4 by more than 50%%",
    )


def run(args: argparse.Namespace) -> int:
    """Execute converge command.

    Returns:
        Exit status
    """
    usecase = ConvergeUseCase(scenario_repo=YamlScenarioRepository())
    table = usecase.execute(Path(args.scenario), args.name, args.ladder, args.k, args.strict)
    sys.stdout.write(to_csv_text(convergence_frame(table)))
    logger.info("Convergence table written for %s (%d eigenvalues)", args.name, table.count)
    return 0
