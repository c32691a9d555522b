"""Common utilities shared across CLI commands.

共通ユーティリティ（ロギング設定、格子の列のパース、共通引数）を提供します。
"""

import argparse
import logging


def setup_logging(verbose: bool = False) -> None:
    """Initialize logging configuration.

    ロギング設定を初期化します。

    Args:
        verbose: If True, set log level to DEBUG. (詳細ログを出力する場合True)
    """
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="[%(asctime)s] %(levelname)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def parse_ladder(text: str) -> tuple[int, ...]:
    """Parse a comma-separated ladder of grid sizes (e.g. "500,1000,2000").

    Raises:
        ValueError: If an entry is not a positive integer.
    """
    try:
        ladder = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ValueError(f"Invalid ladder: {text!r}. Expected e.g. 500,1000,2000") from e
    if not ladder or any(n <= 0 for n in ladder):
        raise ValueError(f"Invalid ladder: {text!r}. Grid sizes must be positive")
    return ladder


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Add common arguments shared across commands.

    全コマンド共通の引数（scenario, --verbose）を追加します。

    Args:
        parser: Argument parser to add arguments to.
    """
    parser.add_argument("scenario", help="Path to the scenario file")

    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Enable verbose logging",
    )
