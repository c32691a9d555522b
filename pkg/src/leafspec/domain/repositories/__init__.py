"""Domain層のリポジトリインターフェースを提供

シナリオの読み込みと結果の書き出しを抽象化するインターフェースを定義します。
"""

from .report_writer import IReportWriter
from .scenario_repository import IScenarioRepository

__all__ = [
    "IReportWriter",
    "IScenarioRepository",
]
