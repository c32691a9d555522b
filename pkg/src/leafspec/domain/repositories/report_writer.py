"""Report writer interface (Protocol).

実行結果（スペクトル・判定・来歴）を永続化するサービスのインターフェース定義。
Domain 層では Protocol のみを定義し、実装は Infrastructure 層に配置します。

実装クラス: ``infrastructure.repositories.csv_report_writer.CsvReportWriter``
"""

from collections.abc import Set
from pathlib import Path
from typing import Protocol, runtime_checkable

from leafspec.domain.models.scenario import OutputArtifact, Report


@runtime_checkable
class IReportWriter(Protocol):
    """Interface for persisting run reports."""

    def write(
        self, report: Report, output_dir: Path, outputs: Set[OutputArtifact]
    ) -> tuple[Path, ...]:
        """Write the requested artifacts.

        Args:
            report: Run result.
            output_dir: Directory to write into (created if missing).
            outputs: Artifacts to write.

        Returns:
            Paths of the written files in a fixed order.
        """
        ...

    def read(self, path: Path) -> Report:
        """Read a report back from its JSON artifact.

        Raises:
            ValueError: If the file is not a valid report.
        """
        ...
