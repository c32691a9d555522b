"""Discretized operators and spectral estimates.

- DiscreteOperator: 対称化された三重対角行列（有限体積法）
- SpectrumEstimate: 2 つの格子での固有値と Richardson 外挿値
- ConvergenceTable: 格子の系列に対する固有値と収束比
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

type FloatArray = NDArray[np.float64]

# 固有値の昇順チェックで許す相対的な逆転量
ORDERING_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Symmetric tridiagonal form of the basic Laplacian on a cell-centred grid.

    元の作用素 Δf = -(1/w)(w f')' は重み付き内積で対称であり、
    g = √w f と変換すると通常の対称行列になります。

    Attributes:
        grid_size: セル数 N
        length: 区間長 L
        diagonal: 対角成分（長さ N）
        off_diagonal: 副対角成分（長さ N-1）
        cell_weights: セル中心での w（長さ N）
        face_weights: セル境界での w（長さ N+1、外側の境界も含む）
        label: 表示用ラベル
    """

    grid_size: int
    length: float
    diagonal: FloatArray
    off_diagonal: FloatArray
    cell_weights: FloatArray
    face_weights: FloatArray
    label: str = ""

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        n = self.grid_size
        if self.diagonal.shape != (n,) or self.cell_weights.shape != (n,):
            raise ValueError(f"diagonal and cell_weights must have length {n}")
        if self.off_diagonal.shape != (n - 1,):
            raise ValueError(f"off_diagonal must have length {n - 1}")
        if self.face_weights.shape != (n + 1,):
            raise ValueError(f"face_weights must have length {n + 1}")
        if np.any(self.cell_weights <= 0):
            raise ValueError("cell weights must be positive")

    @property
    def cell_width(self) -> float:
        return self.length / self.grid_size

    @property
    def cell_centers(self) -> FloatArray:
        return (np.arange(self.grid_size) + 0.5) * self.cell_width

    def dense(self) -> FloatArray:
        """密行列として返す（小さな格子での検証用）"""
        matrix = np.diag(self.diagonal)
        matrix += np.diag(self.off_diagonal, 1) + np.diag(self.off_diagonal, -1)
        return matrix

    def apply(self, vector: FloatArray) -> FloatArray:
        """対称化行列 S を掛ける"""
        result = self.diagonal * vector
        result[:-1] += self.off_diagonal * vector[1:]
        result[1:] += self.off_diagonal * vector[:-1]
        return result

    def to_untransformed(self, vector: FloatArray) -> FloatArray:
        """g = √w f から f に戻す"""
        return vector / np.sqrt(self.cell_weights)

    def from_untransformed(self, vector: FloatArray) -> FloatArray:
        """f から g = √w f に変換する"""
        return vector * np.sqrt(self.cell_weights)

    def apply_untransformed(self, values: FloatArray) -> FloatArray:
        """元の作用素 -(1/w)(w f')' の離散版（外側境界は流束 0）"""
        return self.to_untransformed(self.apply(self.from_untransformed(values)))

    def weighted_inner(self, first: FloatArray, second: FloatArray) -> float:
        """重み付き内積 h Σ w_i f_i g_i"""
        return float(self.cell_width * np.sum(self.cell_weights * first * second))


@dataclass(frozen=True)
class SpectrumEstimate:
    """Lowest eigenvalues at grid sizes N and 2N with Richardson extrapolation.

    Attributes:
        label: 提示の名前
        grid_sizes: (N, 2N)
        coarse: 格子 N での固有値（昇順）
        fine: 格子 2N での固有値
        extrapolated: (4λ_2N - λ_N)/3
        error_estimates: |λ_2N - λ_N|/3
    """

    label: str
    grid_sizes: tuple[int, int]
    coarse: tuple[float, ...]
    fine: tuple[float, ...]
    extrapolated: tuple[float, ...]
    error_estimates: tuple[float, ...]

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        count = len(self.extrapolated)
        if not (len(self.coarse) == len(self.fine) == len(self.error_estimates) == count):
            raise ValueError("all eigenvalue sequences must have the same length")
        if self.grid_sizes[1] != 2 * self.grid_sizes[0]:
            raise ValueError(f"grid sizes must be (N, 2N), got {self.grid_sizes}")
        for previous, current in zip(self.extrapolated, self.extrapolated[1:], strict=False):
            if current < previous - ORDERING_RTOL * max(1.0, abs(previous)):
                raise ValueError(f"eigenvalues must be ascending, got {previous} > {current}")
        if any(e < 0 for e in self.error_estimates):
            raise ValueError("error estimates must be non-negative")

    @property
    def eigenvalues(self) -> tuple[float, ...]:
        """外挿後の固有値"""
        return self.extrapolated

    @property
    def count(self) -> int:
        return len(self.extrapolated)


@dataclass(frozen=True)
class ConvergenceTable:
    """Eigenvalues along a ladder of grid sizes with observed ratios.

    Attributes:
        label: 提示の名前
        ladder: 格子サイズの列（各段で 2 倍）
        eigenvalues: 各格子での固有値
        ratios: 最後の 3 段から求めた (λ_N - λ_2N)/(λ_2N - λ_4N)（定義できない場合は None）
        extrapolated: 最後の 2 段からの Richardson 外挿値
    """

    label: str
    ladder: tuple[int, ...]
    eigenvalues: tuple[tuple[float, ...], ...]
    ratios: tuple[float | None, ...]
    extrapolated: tuple[float, ...]

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if len(self.ladder) < 3:
            raise ValueError(f"ladder needs at least 3 grid sizes, got {self.ladder}")
        if len(self.eigenvalues) != len(self.ladder):
            raise ValueError("one eigenvalue row is required per grid size")

    @property
    def count(self) -> int:
        return len(self.extrapolated)
