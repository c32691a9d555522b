"""シナリオ一括実行のユースケース

このモジュールはシナリオの実行をオーケストレーションします。
1. シナリオを読み込み、提示を組み立てる
2. 各提示の基本スペクトルを並列に計算する
3. 各比較の仮定チェックと判定を並列に計算する
4. （要求があれば）収束診断を計算する
5. 宣言順に結果をまとめ、成果物を書き出す

個々のジョブの失敗は記録して続行し、終了状態に反映します。
"""

import logging
from collections.abc import Callable
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass
from datetime import UTC, datetime
from pathlib import Path

from leafspec.application.usecases.presentation_catalog import PresentationCatalog
from leafspec.domain.errors import InconsistentCoverError, InconsistentTheoremError
from leafspec.domain.models.isometry import IsometryDatum, Verdict
from leafspec.domain.models.mean_curvature import CoveringDatum
from leafspec.domain.models.scenario import (
    ComparisonSpec,
    MapKind,
    OutputArtifact,
    Report,
    ScenarioDocument,
)
from leafspec.domain.models.spectrum import ConvergenceTable, SpectrumEstimate
from leafspec.domain.models.weight import PulledBackWeight
from leafspec.domain.repositories.report_writer import IReportWriter
from leafspec.domain.repositories.scenario_repository import IScenarioRepository
from leafspec.domain.services.isometry_checker import IsometryChecker
from leafspec.domain.services.presentation_factory import PresentationFactory
from leafspec.domain.services.sturm_solver import SturmSolver

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INCONSISTENT = 2


@dataclass(frozen=True)
class RunResult:
    """Outcome of one scenario run.

    Attributes:
        report: 実行結果
        written: 書き出したファイル
    """

    report: Report
    written: tuple[Path, ...] = ()

    @property
    def exit_status(self) -> int:
        """0: 成功、1: ジョブの失敗、2: 定理との矛盾"""
        if self.report.inconsistent_pairs:
            return EXIT_INCONSISTENT
        if self.report.failures:
            return EXIT_FAILURE
        return EXIT_OK


class RunScenarioUseCase:
    """シナリオ一括実行のユースケース

    Attributes:
        _scenario_repo: シナリオリポジトリ
        _report_writer: 成果物の書き出し
        _factory: 提示ファクトリ
        _solver: スペクトルソルバ
        _checker: 仮定チェック
        _max_workers: ジョブの並列数の上限
    """

    def __init__(
        self,
        scenario_repo: IScenarioRepository,
        report_writer: IReportWriter,
        factory: PresentationFactory | None = None,
        solver: SturmSolver | None = None,
        checker: IsometryChecker | None = None,
        max_workers: int = 4,
        clock: Callable[[], datetime] | None = None,
    ) -> None:
        """初期化

        Args:
            scenario_repo: シナリオリポジトリ（依存性注入）
            report_writer: 成果物の書き出し（依存性注入）
            factory: 提示ファクトリ
            solver: スペクトルソルバ
            checker: 仮定チェック
            max_workers: ジョブの並列数の上限
            clock: 生成時刻の取得（テスト用）
        """
        self._scenario_repo = scenario_repo
        self._report_writer = report_writer
        self._factory = factory or PresentationFactory()
        self._solver = solver or SturmSolver()
        self._checker = checker or IsometryChecker(solver=self._solver, factory=self._factory)
        self._max_workers = max(1, max_workers)
        self._clock = clock or (lambda: datetime.now(UTC))

    def execute(self, scenario_path: Path, output_dir: Path) -> RunResult:
        """シナリオを実行して成果物を書き出す

        Args:
            scenario_path: シナリオファイル
            output_dir: 出力先ディレクトリ

        Returns:
            RunResult: 実行結果と書き出したファイル

        Raises:
            ScenarioParseError: シナリオが不正な場合
            UnknownPresentationError: 未宣言の提示を参照している場合
            ValueError: 提示のデータが不正な場合
        """
        scenario = self._scenario_repo.load(scenario_path)
        catalog = PresentationCatalog.from_scenario(scenario, self._factory)
        report = self.run(scenario, catalog)
        written = self._report_writer.write(report, output_dir, scenario.outputs)

        result = RunResult(report=report, written=written)
        logger.info(
            "Finished: %d spectra, %d verdicts, %d failures, %d inconsistent",
            len(report.spectra),
            len(report.verdicts),
            len(report.failures),
            len(report.inconsistent_pairs),
        )
        return result

    def run(self, scenario: ScenarioDocument, catalog: PresentationCatalog) -> Report:
        """組み立て済みのカタログでシナリオを計算する（書き出しはしない）"""
        solver_settings = scenario.solver
        failures: list[str] = []

        with ThreadPoolExecutor(max_workers=self._max_workers) as pool:
            spectrum_jobs = {
                p.name: pool.submit(
                    self._solver.basic_spectrum,
                    p,
                    solver_settings.grid_size,
                    solver_settings.eigen_count,
                )
                for p in catalog
            }
            spectra = {
                name: estimate
                for name, job in spectrum_jobs.items()
                if (estimate := _collect(job, f"spectrum {name}", failures)) is not None
            }

            verdict_jobs: list[tuple[ComparisonSpec, Future[Verdict]]] = []
            for comparison in scenario.comparisons:
                try:
                    iso = self._isometry(comparison, catalog)
                except ValueError as e:
                    logger.error("Comparison %s is invalid: %s", comparison.label, e)
                    failures.append(f"verdict {comparison.label}: {e}")
                    continue
                pair = _spectra_pair(spectra, comparison)
                verdict_jobs.append(
                    (
                        comparison,
                        pool.submit(
                            self._checker.verdict,
                            iso,
                            solver_settings.grid_size,
                            solver_settings.eigen_count,
                            solver_settings.tol_hyp,
                            solver_settings.tol_spec,
                            solver_settings.hyp_margin,
                            pair,
                        ),
                    )
                )

            convergence_jobs: list[tuple[str, Future[ConvergenceTable]]] = []
            if OutputArtifact.CONVERGENCE in scenario.outputs:
                n = solver_settings.grid_size
                convergence_jobs = [
                    (
                        p.name,
                        pool.submit(
                            self._solver.convergence_table,
                            p,
                            (n, 2 * n, 4 * n),
                            solver_settings.eigen_count,
                        ),
                    )
                    for p in catalog
                ]

            verdicts: list[Verdict] = []
            for comparison, job in verdict_jobs:
                verdict = self._collect_verdict(comparison, job, failures)
                if verdict is not None:
                    verdicts.append(verdict)

            convergence = [
                table
                for name, job in convergence_jobs
                if (table := _collect(job, f"convergence {name}", failures)) is not None
            ]

        return Report(
            scenario_hash=scenario.source_hash,
            scenario_path=scenario.source_path,
            solver=solver_settings,
            spectra=tuple(spectra[name] for name in catalog.names if name in spectra),
            verdicts=tuple(verdicts),
            convergence=tuple(convergence),
            failures=tuple(failures),
            generated_at=self._clock().isoformat(timespec="seconds"),
        )

    @staticmethod
    def _collect_verdict(
        comparison: ComparisonSpec, job: Future[Verdict], failures: list[str]
    ) -> Verdict | None:
        try:
            verdict = job.result()
        except InconsistentTheoremError as e:
            # 矛盾した判定もレポートに残す
            logger.error("Theorem inconsistency in %s: %s", comparison.label, e)
            return e.verdict if isinstance(e.verdict, Verdict) else None
        except Exception as e:
            logger.error("Verdict %s failed: %s", comparison.label, e, exc_info=True)
            failures.append(f"verdict {comparison.label}: {e}")
            return None
        logger.info(
            "Verdict %s: isospectral=%s, theorem_applies=%s",
            comparison.label,
            verdict.isospectral,
            verdict.theorem_applies,
        )
        return verdict

    @staticmethod
    def _isometry(comparison: ComparisonSpec, catalog: PresentationCatalog) -> IsometryDatum:
        """比較の指定から写像のデータを作る

        Raises:
            InconsistentCoverError: 折り返し写像の像側が持ち上げでない場合
        """
        source = catalog.get(comparison.source)
        target = catalog.get(comparison.target)

        if comparison.map_kind == MapKind.FOLD:
            weight = target.weight
            if not isinstance(weight, PulledBackWeight):
                raise InconsistentCoverError(
                    f"fold map needs '{target.name}' to be a covering lift of '{source.name}'"
                )
            covering = CoveringDatum(
                deck_order=weight.fold.deck_order,
                folding_map=weight.fold,
                base=source,
                cover=target,
            )
            return IsometryDatum(
                source=source,
                target=target,
                claimed_codim_preserving=comparison.claimed_codim_preserving,
                covering=covering,
            )

        offset = comparison.offset
        if offset is None:
            offset = 0.0 if comparison.orientation == 1 else source.length
        return IsometryDatum(
            source=source,
            target=target,
            orientation=comparison.orientation,
            offset=offset,
            claimed_codim_preserving=comparison.claimed_codim_preserving,
        )


def _collect[T](job: Future[T], label: str, failures: list[str]) -> T | None:
    try:
        return job.result()
    except Exception as e:
        logger.error("Job %s failed: %s", label, e, exc_info=True)
        failures.append(f"{label}: {e}")
        return None


def _spectra_pair(
    spectra: dict[str, SpectrumEstimate], comparison: ComparisonSpec
) -> tuple[SpectrumEstimate, SpectrumEstimate] | None:
    """両側のスペクトルが計算済みならその組（なければ判定側で計算し直す）"""
    if comparison.source in spectra and comparison.target in spectra:
        return spectra[comparison.source], spectra[comparison.target]
    return None
