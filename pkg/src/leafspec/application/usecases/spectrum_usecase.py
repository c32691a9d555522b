"""単一提示のスペクトル計算のユースケース"""

import logging
from pathlib import Path

from leafspec.application.usecases.presentation_catalog import PresentationCatalog
from leafspec.domain.models.spectrum import SpectrumEstimate
from leafspec.domain.repositories.scenario_repository import IScenarioRepository
from leafspec.domain.services.presentation_factory import PresentationFactory
from leafspec.domain.services.sturm_solver import SturmSolver

logger = logging.getLogger(__name__)


class SpectrumUseCase:
    """シナリオ中の 1 つの提示の基本スペクトル（またはオービフォールドスペクトル）を求める"""

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
        grid_size: int,
        count: int,
        orbifold: bool = False,
    ) -> SpectrumEstimate:
        """スペクトルを計算する

        Args:
            scenario_path: シナリオファイル
            name: 提示名
            grid_size: 格子サイズ N
            count: 固有値の個数 k
            orbifold: ドリフト項を落とした Neumann スペクトルを求めるか

        Raises:
            GridTooCoarseError: N < 16 の場合
            UnknownPresentationError: 提示が宣言されていない場合
        """
        scenario = self._scenario_repo.load(scenario_path)
        presentation = PresentationCatalog.from_scenario(scenario, self._factory).get(name)
        logger.info("Spectrum of %s (N=%d, k=%d, orbifold=%s)", name, grid_size, count, orbifold)

        if orbifold:
            return self._solver.orbifold_spectrum(presentation, grid_size, count)
        return self._solver.basic_spectrum(presentation, grid_size, count)
