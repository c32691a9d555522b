"""Foliation presentations and their stratification by leaf type.

1 次元商空間をもつ特異リーマン葉層の「提示」を表すドメインモデル。
- FoliationPresentation: 曲率・葉体積・葉の次元を束ねた不変データ
- Stratum / Stratification: 商区間上の層の分解と商余次元
- PresentationFamily / PresentationDescriptor: シナリオからの構築指示
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from leafspec.domain.errors import DimensionMismatchError, NegativeCurvatureError
from leafspec.domain.models.weight import WeightProfile


class PresentationFamily(Enum):
    """提示の族

    基本族は直接構築し、派生族は宣言済みの提示から作ります。
    """

    SPHERE_ROTATION = "sphere_rotation"
    ORBIFOLD_INTERVAL = "orbifold_interval"
    CUSTOM = "custom"
    REFLECTION = "reflection"
    RESCALE = "rescale"
    RELABEL = "relabel"
    COVERING_LIFT = "covering_lift"

    @property
    def is_derived(self) -> bool:
        """宣言済みの提示を元にする族かどうか"""
        return self in (
            PresentationFamily.REFLECTION,
            PresentationFamily.RESCALE,
            PresentationFamily.RELABEL,
            PresentationFamily.COVERING_LIFT,
        )


@dataclass(frozen=True)
class PresentationDescriptor:
    """Instruction for building one named presentation.

    Attributes:
        name: 提示の名前（シナリオ内で一意）
        family: 族
        parameters: 族ごとのパラメータ（n, r, length, weight, factor, deck_order など）
        source: 派生族の元になる提示の名前
    """

    name: str
    family: PresentationFamily
    parameters: dict[str, Any] = field(default_factory=dict[str, Any])
    source: str | None = None

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if not self.name:
            raise ValueError("descriptor name must not be empty")
        if self.family.is_derived and self.source is None:
            raise ValueError(f"derived family {self.family.value} requires a source presentation")


@dataclass(frozen=True, eq=False)
class FoliationPresentation:
    """Immutable description of a foliation with an interval leaf space.

    Attributes:
        name: 名前
        kappa: 外部空間の定曲率 κ（0 以上）
        weight: 葉体積関数 w
        regular_leaf_dim: 正則葉の次元 d
        endpoint_leaf_dims: 両端点上の葉の次元（d 以下）
        cover_order: 基本群被覆の次数（1 以上）
        exceptional_endpoints: 次元が落ちない端点を例外葉（オービフォールド点）とみなすか

    Raises:
        NegativeCurvatureError: κ < 0 の場合
        DimensionMismatchError: 端点の次元低下と w の消滅次数が一致しない場合
    """

    name: str
    kappa: float
    weight: WeightProfile
    regular_leaf_dim: int
    endpoint_leaf_dims: tuple[int, int]
    cover_order: int = 1
    exceptional_endpoints: tuple[bool, bool] = (False, False)

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if not self.name:
            raise ValueError("presentation name must not be empty")
        if not math.isfinite(self.kappa):
            raise ValueError(f"kappa must be finite, got {self.kappa}")
        if self.kappa < 0:
            raise NegativeCurvatureError(
                f"kappa must be >= 0 (negative curvature admits no non-trivial foliation), "
                f"got {self.kappa}"
            )
        if self.regular_leaf_dim < 0:
            raise DimensionMismatchError(
                f"regular_leaf_dim must be >= 0, got {self.regular_leaf_dim}"
            )
        if self.cover_order < 1:
            raise ValueError(f"cover_order must be >= 1, got {self.cover_order}")

        for side, (dim, order) in enumerate(
            zip(self.endpoint_leaf_dims, self.weight.vanishing_orders, strict=True)
        ):
            if not (0 <= dim <= self.regular_leaf_dim):
                raise DimensionMismatchError(
                    f"endpoint {side} leaf dimension must be in [0, {self.regular_leaf_dim}], "
                    f"got {dim}"
                )
            if self.regular_leaf_dim - dim != order:
                raise DimensionMismatchError(
                    f"endpoint {side}: leaf dimension drop {self.regular_leaf_dim - dim} "
                    f"does not match weight vanishing order {order}"
                )

        for position, order in self.weight.interior_zeros:
            if order > self.regular_leaf_dim:
                raise DimensionMismatchError(
                    f"interior zero at {position} has order {order} > regular leaf dimension "
                    f"{self.regular_leaf_dim}"
                )

    @property
    def length(self) -> float:
        """商区間の長さ L"""
        return self.weight.length

    @property
    def ambient_dim(self) -> int:
        """全空間の次元（正則葉の次元 + 1）"""
        return self.regular_leaf_dim + 1

    def leaf_dim_at(self, theta: float, tolerance: float = 1e-9) -> int:
        """位置 θ 上の葉の次元"""
        scale = tolerance * self.length
        if abs(theta) <= scale:
            return self.endpoint_leaf_dims[0]
        if abs(theta - self.length) <= scale:
            return self.endpoint_leaf_dims[1]
        for position, order in self.weight.interior_zeros:
            if abs(theta - position) <= scale:
                return self.regular_leaf_dim - order
        return self.regular_leaf_dim

    def __repr__(self) -> str:
        return (
            f"FoliationPresentation(name={self.name!r}, kappa={self.kappa}, "
            f"length={self.length:.6g}, dims={self.regular_leaf_dim}/{self.endpoint_leaf_dims})"
        )


class StratumKind(Enum):
    """層の種類"""

    REGULAR = "regular"
    ENDPOINT = "endpoint"
    INTERIOR_POINT = "interior_point"


@dataclass(frozen=True)
class Stratum:
    """One stratum of the quotient interval.

    Attributes:
        kind: 種類（正則・端点・内部点）
        start: 商区間上の開始位置
        end: 終了位置（点の層では start と等しい）
        leaf_dim: 層上の葉の次元
        qcodim: 商余次元（正則層の商の次元 1 から層の商の次元を引いた値）
    """

    kind: StratumKind
    start: float
    end: float
    leaf_dim: int
    qcodim: int

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.end < self.start:
            raise ValueError(f"stratum end {self.end} precedes start {self.start}")
        if self.qcodim not in (0, 1):
            raise ValueError(
                f"qcodim must be 0 or 1 on a 1-dimensional leaf space, got {self.qcodim}"
            )

    @property
    def is_point(self) -> bool:
        return self.start == self.end


@dataclass(frozen=True)
class Stratification:
    """Decomposition of the leaf space into strata.

    正則層（商余次元 0）はただ一つで、葉の次元が最大になります。

    Attributes:
        length: 商区間の長さ
        strata: 位置順の層
    """

    length: float
    strata: tuple[Stratum, ...]

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        regular = [s for s in self.strata if s.kind == StratumKind.REGULAR]
        if len(regular) != 1 or regular[0].qcodim != 0:
            raise ValueError("stratification must contain exactly one regular stratum")
        if any(s.qcodim == 0 for s in self.strata if s.kind != StratumKind.REGULAR):
            raise ValueError("only the regular stratum may have qcodim 0")
        if any(s.leaf_dim > regular[0].leaf_dim for s in self.strata):
            raise ValueError("no stratum may have larger leaves than the regular stratum")

    @property
    def regular(self) -> Stratum:
        """正則層"""
        return next(s for s in self.strata if s.kind == StratumKind.REGULAR)

    @property
    def singular_strata(self) -> tuple[Stratum, ...]:
        """葉の次元が正則層より小さい層"""
        top = self.regular.leaf_dim
        return tuple(s for s in self.strata if s.leaf_dim < top)

    @property
    def has_boundary(self) -> bool:
        """商余次元 1 の層（商空間の境界・特異点）が存在するか"""
        return any(s.qcodim == 1 for s in self.strata)

    def positions_with_qcodim(self, qcodim: int) -> tuple[float, ...]:
        """指定した商余次元をもつ点の層の位置（位置順）"""
        return tuple(sorted(s.start for s in self.strata if s.is_point and s.qcodim == qcodim))

    def closure_with_qcodim(self, qcodim: int) -> tuple[tuple[float, float], ...]:
        """指定した商余次元の層の閉包を区間の組で返す"""
        return tuple(
            sorted(
                (0.0, self.length) if s.kind == StratumKind.REGULAR else (s.start, s.end)
                for s in self.strata
                if s.qcodim == qcodim
            )
        )
