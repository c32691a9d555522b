"""Candidate isometries between leaf spaces and their check results.

- IsometryDatum: 比較する 2 つの提示と商空間の間の写像
- CheckResult: 個々の仮定チェックの結果
- Verdict: 仮定チェックとスペクトル比較をまとめた判定
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from leafspec.domain.models.mean_curvature import CoveringDatum
from leafspec.domain.models.presentation import FoliationPresentation
from leafspec.domain.models.spectrum import SpectrumEstimate

type FloatArray = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class IsometryDatum:
    """Map between two leaf spaces.

    アフィン写像 θ ↦ sθ + b（s = ±1）か、被覆の折り返し写像のいずれかです。
    被覆の場合は target が被覆側、source が基底側になります。

    Attributes:
        source: 写像の定義域側の提示
        target: 像側の提示
        orientation: s（+1 または -1）
        offset: b
        claimed_codim_preserving: シナリオ上で余次元保存と主張されているか
        covering: 被覆データ（アフィン写像なら None）
    """

    source: FoliationPresentation
    target: FoliationPresentation
    orientation: int = 1
    offset: float = 0.0
    claimed_codim_preserving: bool = False
    covering: CoveringDatum | None = None

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.orientation not in (1, -1):
            raise ValueError(f"orientation must be +1 or -1, got {self.orientation}")
        if self.covering is not None:
            if self.covering.base is not self.source:
                raise ValueError("covering base must be the source presentation")
            if self.covering.cover is not None and self.covering.cover is not self.target:
                raise ValueError("covering cover must be the target presentation")
            if self.orientation != 1 or self.offset != 0.0:
                raise ValueError("covering maps carry no affine orientation or offset")

    @property
    def label(self) -> str:
        return f"{self.source.name}~{self.target.name}"

    @property
    def is_covering(self) -> bool:
        return self.covering is not None

    def apply(self, theta: ArrayLike) -> FloatArray:
        """アフィン写像 θ ↦ sθ + b を適用する"""
        return self.orientation * np.asarray(theta, dtype=np.float64) + self.offset


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one hypothesis check.

    Attributes:
        passed: 合格したか
        detail: 人が読むための説明
        deviation: 数値的なずれ（該当する場合）
        table: 層ごとの比較表（文字列の行）
        applicable: チェックが適用可能だったか
    """

    passed: bool
    detail: str = ""
    deviation: float | None = None
    table: tuple[tuple[str, ...], ...] = ()
    applicable: bool = True


@dataclass(frozen=True)
class Verdict:
    """Combined hypothesis checks and spectral comparison for one pair.

    theorem_applies が真なのに isospectral が偽になる判定は数値的な欠陥を示し、
    IsometryChecker は InconsistentTheoremError を送出します。

    Attributes:
        pair: ペアのラベル
        metric: 等長性チェック
        codim: 余次元保存チェック
        qcodim_strata: 商余次元の層の保存チェック
        mean_curvature: 平均曲率の一致チェック
        shape_spectra: 形作用素スペクトルの一致チェック（診断用）
        spectra: (source, target) のスペクトル推定
        isospectral: 外挿固有値が許容誤差内で一致したか
        max_rel_gap: 最大の相対固有値ギャップ
        theorem_applies: 等スペクトル性の十分条件が成り立つか
        minimal: (source, target) の各提示が極小（H_* ≡ 0）か
    """

    pair: str
    metric: CheckResult
    codim: CheckResult
    qcodim_strata: CheckResult
    mean_curvature: CheckResult
    shape_spectra: CheckResult
    spectra: tuple[SpectrumEstimate, SpectrumEstimate]
    isospectral: bool
    max_rel_gap: float
    theorem_applies: bool
    minimal: tuple[bool, bool] = (False, False)

    @property
    def metric_ok(self) -> bool:
        return self.metric.passed

    @property
    def codim_ok(self) -> bool:
        return self.codim.passed

    @property
    def qcodim_ok(self) -> bool:
        return self.qcodim_strata.passed

    @property
    def mean_curvature_ok(self) -> bool:
        return self.mean_curvature.passed

    @property
    def consistent(self) -> bool:
        """定理の結論と数値結果が矛盾していないか"""
        if not self.theorem_applies:
            return True
        # 平均曲率が対応するなら極小性も両側で一致する
        return self.isospectral and self.minimal[0] == self.minimal[1]
