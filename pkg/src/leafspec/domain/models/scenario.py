"""Scenario documents and run reports.

- SolverSettings: 格子サイズ・固有値の個数・許容誤差
- ComparisonSpec: 比較する提示の組と商空間の写像
- ScenarioDocument: 提示・比較・ソルバ設定・出力の指定
- Report: 実行結果（スペクトル・判定・収束診断・来歴）
"""

from dataclasses import dataclass
from enum import Enum

from leafspec.domain.errors import GridTooCoarseError, UnknownPresentationError
from leafspec.domain.models.isometry import Verdict
from leafspec.domain.models.presentation import PresentationDescriptor
from leafspec.domain.models.spectrum import ConvergenceTable, SpectrumEstimate

MIN_GRID_SIZE = 16


class OutputArtifact(Enum):
    """出力成果物の種類"""

    SPECTRA = "spectra"
    VERDICTS = "verdicts"
    REPORT = "report"
    CONVERGENCE = "convergence"


DEFAULT_OUTPUTS = frozenset(
    {OutputArtifact.SPECTRA, OutputArtifact.VERDICTS, OutputArtifact.REPORT}
)


class MapKind(Enum):
    """商空間の写像の種類"""

    AFFINE = "affine"
    FOLD = "fold"


@dataclass(frozen=True)
class SolverSettings:
    """Numerical parameters shared by every job in a scenario.

    Attributes:
        grid_size: 粗い方の格子のセル数 N（16 以上）
        eigen_count: 求める固有値の個数 k（N/4 以下）
        tol_hyp: 平均曲率チェックの許容誤差
        tol_spec: 固有値比較の相対許容誤差
        hyp_margin: 特異点の周りで除外する区間長の割合
    """

    grid_size: int = 2000
    eigen_count: int = 5
    tol_hyp: float = 1e-8
    tol_spec: float = 1e-2
    hyp_margin: float = 0.01

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.grid_size < MIN_GRID_SIZE:
            raise GridTooCoarseError(
                f"grid_size must be >= {MIN_GRID_SIZE}, got {self.grid_size}"
            )
        if not (0 <= self.eigen_count <= self.grid_size // 4):
            raise ValueError(
                f"eigen_count must be in [0, {self.grid_size // 4}], got {self.eigen_count}"
            )
        if not (self.tol_hyp > 0 and self.tol_spec > 0):
            raise ValueError(
                f"tolerances must be positive, got tol_hyp={self.tol_hyp}, "
                f"tol_spec={self.tol_spec}"
            )
        if not (0 <= self.hyp_margin < 0.5):
            raise ValueError(f"hyp_margin must be in [0, 0.5), got {self.hyp_margin}")


@dataclass(frozen=True)
class ComparisonSpec:
    """One requested comparison between two declared presentations.

    Attributes:
        source: 定義域側の提示名
        target: 像側の提示名
        orientation: s（+1 / -1）
        offset: b（None なら s = +1 で 0、s = -1 で source の長さ）
        map_kind: アフィン写像か被覆の折り返しか
        claimed_codim_preserving: 作成者が余次元保存を主張しているか
    """

    source: str
    target: str
    orientation: int = 1
    offset: float | None = None
    map_kind: MapKind = MapKind.AFFINE
    claimed_codim_preserving: bool = False

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.orientation not in (1, -1):
            raise ValueError(f"orientation must be +1 or -1, got {self.orientation}")

    @property
    def label(self) -> str:
        return f"{self.source}~{self.target}"


@dataclass(frozen=True)
class ScenarioDocument:
    """Parsed scenario.

    Attributes:
        presentations: 宣言順の提示記述子
        comparisons: 宣言順の比較
        solver: ソルバ設定
        outputs: 要求された出力
        source_hash: シナリオファイルの SHA-256
        source_path: シナリオファイルのパス

    Raises:
        UnknownPresentationError: 未宣言の提示を参照している場合
    """

    presentations: tuple[PresentationDescriptor, ...]
    comparisons: tuple[ComparisonSpec, ...] = ()
    solver: SolverSettings = SolverSettings()
    outputs: frozenset[OutputArtifact] = DEFAULT_OUTPUTS
    source_hash: str = ""
    source_path: str = ""

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        declared: set[str] = set()
        for descriptor in self.presentations:
            if descriptor.name in declared:
                raise ValueError(f"presentation '{descriptor.name}' is declared twice")
            if descriptor.source is not None and descriptor.source not in declared:
                raise UnknownPresentationError(
                    f"presentation '{descriptor.name}' derives from undeclared "
                    f"'{descriptor.source}'"
                )
            declared.add(descriptor.name)

        for comparison in self.comparisons:
            for name in (comparison.source, comparison.target):
                if name not in declared:
                    raise UnknownPresentationError(
                        f"comparison {comparison.label} references undeclared presentation "
                        f"'{name}'"
                    )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.presentations)

    def descriptor(self, name: str) -> PresentationDescriptor:
        """名前から記述子を引く

        Raises:
            UnknownPresentationError: 宣言されていない場合
        """
        for descriptor in self.presentations:
            if descriptor.name == name:
                return descriptor
        raise UnknownPresentationError(
            f"presentation '{name}' is not declared (known: {', '.join(self.names)})"
        )


@dataclass(frozen=True)
class Report:
    """Result of running a scenario.

    Attributes:
        scenario_hash: シナリオの SHA-256
        scenario_path: シナリオのパス
        solver: 使用したソルバ設定
        spectra: 提示ごとのスペクトル（宣言順）
        verdicts: 比較ごとの判定（宣言順）
        convergence: 収束診断（要求された場合）
        failures: 失敗したジョブのメッセージ
        generated_at: 生成時刻（ISO 8601）
    """

    scenario_hash: str
    scenario_path: str
    solver: SolverSettings
    spectra: tuple[SpectrumEstimate, ...] = ()
    verdicts: tuple[Verdict, ...] = ()
    convergence: tuple[ConvergenceTable, ...] = ()
    failures: tuple[str, ...] = ()
    generated_at: str = ""

    @property
    def inconsistent_pairs(self) -> tuple[str, ...]:
        """定理と矛盾した比較のラベル"""
        return tuple(v.pair for v in self.verdicts if not v.consistent)
