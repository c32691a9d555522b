"""収束診断のユースケース

シナリオ中の 1 つの提示について、格子サイズを倍々にした列で固有値を求め、
観測された誤差比と外挿値を表にまとめます。
"""

import logging
from pathlib import Path

from leafspec.application.usecases.presentation_catalog import PresentationCatalog
from leafspec.domain.models.spectrum import ConvergenceTable
from leafspec.domain.repositories.scenario_repository import IScenarioRepository
from leafspec.domain.services.presentation_factory import PresentationFactory
from leafspec.domain.services.sturm_solver import SturmSolver

logger = logging.getLogger(__name__)


class ConvergeUseCase:
    """収束診断のユースケース

    Attributes:
        _scenario_repo: シナリオリポジトリ
        _solver: スペクトルソルバ
        _factory: 提示ファクトリ
    """

    def __init__(
        self,
        scenario_repo: IScenarioRepository,
        solver: SturmSolver | None = None,
        factory: PresentationFactory | None = None,
    ) -> None:
        self._scenario_repo = scenario_repo
        self._solver = solver or SturmSolver()
        self._factory = factory or PresentationFactory()

    def execute(
        self,
        scenario_path: Path,
        name: str,
        ladder: tuple[int, ...],
        count: int,
        strict: bool = False,
    ) -> ConvergenceTable:
        """収束表を計算する

        Args:
            scenario_path: シナリオファイル
            name: 提示名
            ladder: 格子サイズの列（3 段以上、各段で 2 倍）
            count: 固有値の個数（0 なら空の表）
            strict: 誤差比が 4 から 50% 以上ずれたら例外にするか

        Returns:
            ConvergenceTable: 収束表

        Raises:
            GridTooCoarseError: 16 未満の格子を含む場合
            UnknownPresentationError: 提示が宣言されていない場合
            ConvergenceSuspectError: strict で誤差比が外れた場合
        """
        scenario = self._scenario_repo.load(scenario_path)
        presentation = PresentationCatalog.from_scenario(scenario, self._factory).get(name)
        logger.info("Convergence study for %s over %s (k=%d)", name, ladder, count)

        table = self._solver.convergence_table(presentation, ladder, count)
        self._solver.screen_ratios(name, table.ratios, strict=strict)
        return table
