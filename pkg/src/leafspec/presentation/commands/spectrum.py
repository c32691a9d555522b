"""spectrum command implementation.

1 つの提示の基本スペクトルを spectra.csv と同じ列で標準出力に書くコマンドです。
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any

from leafspec.application.usecases.spectrum_usecase import SpectrumUseCase
from leafspec.infrastructure.repositories.csv_report_writer import spectra_frame, to_csv_text
from leafspec.infrastructure.repositories.yaml_scenario_repository import YamlScenarioRepository
from leafspec.presentation.commands.common import add_common_arguments

logger = logging.getLogger(__name__)


def add_arguments(subparsers: Any) -> None:
    """Add spectrum subcommand and its arguments.

    Args:
        subparsers: Subparsers action to add the command to.
    """
    parser = subparsers.add_parser("spectrum", help="Basic spectrum of one presentation")
    add_common_arguments(parser)
    parser.add_argument("name", help="Presentation name")
    parser.add_argument("-N", type=int, default=2000, help="Grid size (default: 2000)")
    parser.add_argument("-k", type=int, default=10, help="Number of eigenvalues (default: 10)")
    parser.add_argument(
        "--orbifold",
        action="store_true",
        help="Drop the mean-curvature drift (Neumann spectrum of the interval)",
    )


def run(args: argparse.Namespace) -> int:
    """Execute spectrum command.

    Returns:
        Exit status
    """
    usecase = SpectrumUseCase(scenario_repo=YamlScenarioRepository())
    estimate = usecase.execute(Path(args.scenario), args.name, args.N, args.k, args.orbifold)
    sys.stdout.write(to_csv_text(spectra_frame([estimate])))
    return 0
