"""シナリオリポジトリのインターフェース定義

このモジュールはシナリオ文書の読み込みを抽象化します。
Infrastructure層で具体的な実装（YAML ファイル等）を提供します。
"""

from abc import ABC, abstractmethod
from pathlib import Path

from ..models.scenario import ScenarioDocument


class IScenarioRepository(ABC):
    """シナリオリポジトリのインターフェース

    シナリオ文書の取得を抽象化し、Domain層とInfrastructure層を疎結合に保ちます。
    """

    @abstractmethod
    def load(self, path: Path) -> ScenarioDocument:
        """シナリオ文書を読み込む

        Args:
            path: シナリオファイルのパス

        Returns:
            ScenarioDocument: 検証済みのシナリオ（ファイルの SHA-256 を含む）

        Raises:
            ScenarioParseError: 構文または値が不正な場合（行番号とフィールドを含む）
            UnknownPresentationError: 未宣言の提示を参照している場合
            FileNotFoundError: ファイルが存在しない場合
        """
        ...
