"""Folding map of a covering between interval leaf spaces.

m 重被覆 [0, mL] → [0, L] を区分的な反転で表現します。
偶数番目の区間は恒等写像、奇数番目の区間は反転写像になります。
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from leafspec.domain.errors import InconsistentCoverError

type FloatArray = NDArray[np.float64]

# 折り返し点位置の相対許容誤差
FOLD_POINT_RTOL = 1e-12


@dataclass(frozen=True)
class FoldingMap:
    """Piecewise reflection from the cover interval onto the base interval.

    被覆区間 [0, m·L] の j 番目の区間 [jL, (j+1)L] を、j が偶数なら平行移動で、
    奇数なら反転で基底区間 [0, L] に写します。

    Attributes:
        base_length: 基底区間の長さ L（正）
        deck_order: 被覆の次数 m（1 以上）
        fold_points: 内部の折り返し点（省略時は標準の jL, j=1..m-1）

    Raises:
        InconsistentCoverError: 次数・長さ・折り返し点が不整合な場合
    """

    base_length: float
    deck_order: int
    fold_points: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.deck_order < 1:
            raise InconsistentCoverError(f"deck_order must be >= 1, got {self.deck_order}")
        if not (np.isfinite(self.base_length) and self.base_length > 0):
            raise InconsistentCoverError(
                f"base_length must be positive and finite, got {self.base_length}"
            )

        expected = tuple(j * self.base_length for j in range(1, self.deck_order))
        if not self.fold_points:
            object.__setattr__(self, "fold_points", expected)
            return

        if len(self.fold_points) != len(expected) or not np.allclose(
            self.fold_points, expected, rtol=FOLD_POINT_RTOL, atol=0.0
        ):
            raise InconsistentCoverError(
                f"fold points {self.fold_points} do not match a standard "
                f"{self.deck_order}-fold cover of [0, {self.base_length}]"
            )

    @property
    def cover_length(self) -> float:
        """被覆区間の長さ m·L"""
        return self.deck_order * self.base_length

    @property
    def reverses_far_end(self) -> bool:
        """被覆区間の右端が基底区間の左端 0 に写るかどうか（m が偶数）"""
        return self.deck_order % 2 == 0

    def _segment(self, theta: FloatArray) -> NDArray[np.int64]:
        index = np.floor(theta / self.base_length).astype(np.int64)
        return np.clip(index, 0, self.deck_order - 1)

    def apply(self, theta: ArrayLike) -> FloatArray:
        """Map cover positions to base positions.

        Args:
            theta: 被覆区間上の位置（スカラーまたは配列）

        Returns:
            基底区間 [0, L] 上の位置
        """
        values = np.asarray(theta, dtype=np.float64)
        segment = self._segment(values)
        remainder = values - segment * self.base_length
        folded = np.where(segment % 2 == 1, self.base_length - remainder, remainder)
        return np.clip(folded, 0.0, self.base_length)

    def slope(self, theta: ArrayLike) -> FloatArray:
        """Derivative of the folding map (+1 or -1 away from fold points)."""
        values = np.asarray(theta, dtype=np.float64)
        return np.where(self._segment(values) % 2 == 1, -1.0, 1.0)

    def is_near_fold(self, theta: ArrayLike, tolerance: float) -> NDArray[np.bool_]:
        """折り返し点から距離 tolerance 以内かどうか"""
        values = np.asarray(theta, dtype=np.float64)
        if not self.fold_points:
            return np.zeros(values.shape, dtype=np.bool_)
        points = np.asarray(self.fold_points, dtype=np.float64)
        distance = np.abs(values[..., np.newaxis] - points)
        return np.any(distance <= tolerance, axis=-1)
