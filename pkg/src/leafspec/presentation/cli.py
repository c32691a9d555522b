"""CLI entry point for leafspec.

薄いディスパッチャーとして機能し、引数パース・ロギング設定・コマンド委譲を行います。
各コマンドの実装は presentation.commands 配下のモジュールに委譲します。

終了コード:
    0: 成功
    1: 入力エラー・ジョブの失敗・予期しないエラー
    2: 定理の仮定が成り立つのにスペクトルが一致しない
    130: ユーザーによる中断
"""

import argparse
import logging
import sys
from collections.abc import Sequence

from leafspec.domain.errors import InconsistentTheoremError, LeafspecError
from leafspec.presentation.commands import common, converge, run, spectrum

logger = logging.getLogger(__name__)

__all__ = ["main", "parse_args"]

_COMMANDS = {
    "run": run.run,
    "converge": converge.run,
    "spectrum": spectrum.run,
}


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments.

    コマンドライン引数をパースします。

    Args:
        argv: Arguments (defaults to sys.argv[1:]).

    Returns:
        Parsed arguments namespace.
    """
    parser = argparse.ArgumentParser(
        prog="leafspec",
        description="Basic spectra and isospectrality checks for interval leaf spaces",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # 各コマンドの引数定義を委譲
    run.add_arguments(subparsers)
    converge.add_arguments(subparsers)
    spectrum.add_arguments(subparsers)

    parsed = parser.parse_args(argv)

    if parsed.command == "run" and parsed.jobs is not None and parsed.jobs < 1:
        parser.error("--jobs must be a positive integer (>= 1)")
    if parsed.command in ("converge", "spectrum") and parsed.k < 0:
        parser.error("-k must be >= 0")

    return parsed


def main(argv: Sequence[str] | None = None) -> None:
    """Main entry point. (メインエントリーポイント)"""
    try:
        args = parse_args(argv)
        common.setup_logging(args.verbose)

        logger.info("=" * 70)
        logger.info("leafspec - %s", args.command)
        logger.info("=" * 70)
        logger.info("Scenario: %s", args.scenario)

        status = _COMMANDS[args.command](args)
        sys.exit(status)

    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        sys.exit(130)

    except InconsistentTheoremError as e:
        logger.error("Theorem inconsistency: %s", e)
        sys.exit(2)

    except (LeafspecError, ValueError, FileNotFoundError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        sys.exit(1)

    except Exception as e:
        logger.error("Unexpected error: %s", e, exc_info=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
