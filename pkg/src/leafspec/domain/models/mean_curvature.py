"""Mean-curvature field, covering data and cone extensions.

- MeanCurvatureField: H_*(θ) = -(log w)'(θ)（近特異点では漸近形に切り替え）
- CoveringDatum: 有限被覆 [0, mL] → [0, L] のデータ
- ConePresentation: 球面上の葉層を錐 C(S) に延長したもの
"""

import math
from dataclasses import dataclass, field, replace
from typing import overload

import numpy as np
from numpy.typing import NDArray

from leafspec.domain.errors import InconsistentCoverError, SingularEndpointError
from leafspec.domain.models.folding import FoldingMap
from leafspec.domain.models.presentation import FoliationPresentation
from leafspec.domain.models.weight import PowerTrigWeight

type FloatArray = NDArray[np.float64]

# w がこの比率（最大値に対する）以下になると漸近形 -m/(θ-θ*) を使う
NEAR_SINGULAR_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class MeanCurvatureField:
    """Basic mean curvature H_* = -(log w)' as a function of θ.

    H_* は葉の平均曲率ベクトルを θ 方向の成分で表したもので、
    θ → θ* (w の m 位の零点) で -m/(θ-θ*) のように発散します。

    Attributes:
        source: 元の提示
    """

    source: FoliationPresentation
    _peak: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        """インスタンス化後の初期化"""
        object.__setattr__(self, "_peak", self.source.weight.peak())

    @overload
    def __call__(self, theta: float) -> float: ...

    @overload
    def __call__(self, theta: FloatArray) -> FloatArray: ...

    def __call__(self, theta: float | FloatArray) -> float | FloatArray:
        """Evaluate H_*(θ).

        Args:
            theta: 区間上の位置（スカラーまたは配列）

        Returns:
            平均曲率（スカラー入力ならスカラー）

        Raises:
            OutOfDomainError: 区間外の場合
            SingularEndpointError: w が消滅する点の場合
        """
        values = self._evaluate(np.atleast_1d(np.asarray(theta, dtype=np.float64)))
        if np.ndim(theta) == 0:
            return float(values[0])
        return values.reshape(np.shape(theta))

    def _evaluate(self, theta: FloatArray) -> FloatArray:
        weight = self.source.weight
        w = weight.value(theta)
        if np.any(w == 0.0):
            bad = float(theta[np.argmax(w == 0.0)])
            raise SingularEndpointError(
                f"mean curvature of {self.source.name} is undefined at theta={bad} (w = 0)"
            )

        result = -weight.log_derivative(theta)
        near = w <= NEAR_SINGULAR_CUTOFF * self._peak
        points = weight.singular_points()
        if points and np.any(near):
            positions = np.asarray([p for p, _ in points])
            orders = np.asarray([m for _, m in points], dtype=np.float64)
            nearest = np.argmin(np.abs(theta[near, np.newaxis] - positions), axis=1)
            result[near] = -orders[nearest] / (theta[near] - positions[nearest])
        return result


@dataclass(frozen=True, eq=False)
class CoveringDatum:
    """Finite covering of interval leaf spaces.

    Attributes:
        deck_order: 被覆の次数 m
        folding_map: 被覆区間から基底区間への折り返し写像
        base: 基底の提示
        cover: 被覆側の提示（持ち上げ前は None）

    Raises:
        InconsistentCoverError: 次数や長さが一致しない場合
    """

    deck_order: int
    folding_map: FoldingMap
    base: FoliationPresentation
    cover: FoliationPresentation | None = None

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.deck_order != self.folding_map.deck_order:
            raise InconsistentCoverError(
                f"deck_order {self.deck_order} does not match folding map order "
                f"{self.folding_map.deck_order}"
            )
        if not math.isclose(self.folding_map.base_length, self.base.length, rel_tol=1e-12):
            raise InconsistentCoverError(
                f"folding map base length {self.folding_map.base_length} does not match "
                f"{self.base.name} length {self.base.length}"
            )
        if self.cover is not None and not math.isclose(
            self.cover.length, self.folding_map.cover_length, rel_tol=1e-12
        ):
            raise InconsistentCoverError(
                f"cover length {self.cover.length} is not {self.deck_order} x {self.base.length}"
            )

    @classmethod
    def standard(cls, base: FoliationPresentation, deck_order: int) -> "CoveringDatum":
        """標準の折り返し点 jL をもつ被覆データを作る"""
        return cls(
            deck_order=deck_order,
            folding_map=FoldingMap(base_length=base.length, deck_order=deck_order),
            base=base,
        )

    def with_cover(self, cover: FoliationPresentation) -> "CoveringDatum":
        return replace(self, cover=cover)


@dataclass(frozen=True, eq=False)
class ConePresentation:
    """Extension of a round-sphere foliation to the cone over the sphere.

    錐 C(S) 上の葉体積は (ρ/r)^d · w(θ)（d は正則葉の次元）です。

    Attributes:
        source: 半径 r の球面上の提示
        radius: 球面の半径 r = 1/√κ
    """

    source: FoliationPresentation
    radius: float

    @property
    def radial_power(self) -> int:
        """動径方向の次数 d"""
        return self.source.regular_leaf_dim

    def weight(self, rho: float, theta: float) -> float:
        """錐上の葉体積 (ρ/r)^d w(θ)"""
        _check_radius(rho)
        return (rho / self.radius) ** self.radial_power * float(self.source.weight.value(theta))

    def radial_log_derivative(self, rho: float) -> float:
        """∂_ρ log(葉体積) = d/ρ"""
        _check_radius(rho)
        return self.radial_power / rho

    def radial_mean_curvature(self, rho: float) -> float:
        """平均曲率の動径成分 -d/ρ"""
        return -self.radial_log_derivative(rho)

    def angular_mean_curvature(self, rho: float, theta: float) -> float:
        """半径 ρ の球面上での平均曲率の角度成分 (r/ρ)·H_*(θ)"""
        _check_radius(rho)
        return (self.radius / rho) * MeanCurvatureField(self.source)(theta)

    def restrict(self, rho: float) -> FoliationPresentation:
        """Restrict to the sphere of radius ρ.

        ρ = r なら元の提示そのものを返します。
        """
        _check_radius(rho)
        if rho == self.radius:
            return self.source
        weight = self.source.weight
        assert isinstance(weight, PowerTrigWeight)
        ratio = rho / self.radius
        restricted = replace(
            weight,
            scale=weight.scale / ratio**2,
            length=weight.length * ratio,
            coefficient=weight.coefficient * ratio**self.radial_power,
        )
        return replace(
            self.source,
            name=f"{self.source.name}@rho={rho:g}",
            kappa=1.0 / rho**2,
            weight=restricted,
        )


def _check_radius(rho: float) -> None:
    if not (math.isfinite(rho) and rho > 0):
        raise ValueError(f"rho must be positive, got {rho}")
