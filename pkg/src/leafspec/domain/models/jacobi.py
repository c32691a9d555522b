"""Jacobi-field data along leaf-space geodesics.

測地線に沿った葉層ヤコビ場の係数と、正則葉の形作用素のスペクトル。
"""

import math
from dataclasses import dataclass

from leafspec.domain.errors import NegativeCurvatureError


@dataclass(frozen=True)
class JacobiSolution:
    """Closed-form coefficient f(t) of a foliated Jacobi field.

    f'' + κ f = 0, f(0) = 1, f'(0) = -λ の解で、κ > 0 なら
    f(t) = cos(√κ t) - (λ/√κ) sin(√κ t)、κ = 0 なら f(t) = 1 - λt。

    Attributes:
        kappa: 曲率 κ（0 以上）
        shape_eigenvalue: 形作用素の固有値 λ
        first_zero: 最初の正の零点 t₀（存在しなければ inf）
    """

    kappa: float
    shape_eigenvalue: float
    first_zero: float

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.kappa < 0:
            raise NegativeCurvatureError(f"kappa must be >= 0, got {self.kappa}")
        if not (self.first_zero > 0):
            raise ValueError(f"first_zero must be positive, got {self.first_zero}")

    def coefficient(self, t: float) -> float:
        """f(t)"""
        if self.kappa == 0:
            return 1.0 - self.shape_eigenvalue * t
        root = math.sqrt(self.kappa)
        return math.cos(root * t) - (self.shape_eigenvalue / root) * math.sin(root * t)

    def derivative(self, t: float) -> float:
        """f'(t)"""
        if self.kappa == 0:
            return -self.shape_eigenvalue
        root = math.sqrt(self.kappa)
        return -root * math.sin(root * t) - self.shape_eigenvalue * math.cos(root * t)

    @property
    def is_focal(self) -> bool:
        """有限時間で零点（焦点）に達するかどうか"""
        return math.isfinite(self.first_zero)


@dataclass(frozen=True)
class ShapeEntry:
    """形作用素の固有値と重複度"""

    eigenvalue: float
    multiplicity: int

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.multiplicity < 1:
            raise ValueError(f"multiplicity must be >= 1, got {self.multiplicity}")


@dataclass(frozen=True)
class ShapeSpectrum:
    """Shape-operator spectrum of the regular leaf through one point.

    Attributes:
        at_point: 商区間上の位置 θ
        direction: 法線の向き（+1 は θ 増加方向）
        entries: 固有値と重複度（固有値の昇順）
    """

    at_point: float
    direction: int
    entries: tuple[ShapeEntry, ...]

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction}")

    @property
    def dimension(self) -> int:
        """重複度の合計（正則葉の次元）"""
        return sum(entry.multiplicity for entry in self.entries)

    @property
    def trace(self) -> float:
        """形作用素のトレース"""
        return sum(entry.eigenvalue * entry.multiplicity for entry in self.entries)

    def nonzero(self, tolerance: float = 1e-12) -> tuple[ShapeEntry, ...]:
        return tuple(e for e in self.entries if abs(e.eigenvalue) > tolerance)
