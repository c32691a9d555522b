"""Weighted Sturm-Liouville solver for the basic Laplacian.

基本ラプラシアン Δf = -(1/w)(w f')' = -f'' + H_* f' を
セル中心の有限体積法で離散化し、低い固有値を求めるドメインサービス。

- 離散化: 発散形の三点差分、対称化 g = √w f
- 境界: 外側の面で流束 0（特異端点では正則性、正則端点では Neumann 条件）
- 固有値: 三重対角行列の二分法（Sturm 列）と逆反復
- 外挿: 2 次精度を仮定した Richardson 外挿（係数 4）
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from scipy.linalg import eigh_tridiagonal

from leafspec.domain.errors import (
    ConvergenceSuspectError,
    GridTooCoarseError,
    InconsistentCoverError,
    InvalidWeightError,
    UnknownFamilyError,
)
from leafspec.domain.models.presentation import FoliationPresentation
from leafspec.domain.models.spectrum import ConvergenceTable, DiscreteOperator, SpectrumEstimate
from leafspec.domain.models.weight import ConstantWeight, PulledBackWeight, WeightProfile

logger = logging.getLogger(__name__)

type FloatArray = NDArray[np.float64]


class SturmSolver:
    """Assemble and solve the discrete basic Laplacian of a presentation."""

    MIN_GRID_SIZE = 16

    # 2 次精度のスキームでは誤差比が 4 になる
    RICHARDSON_FACTOR = 4.0

    # 観測された誤差比の 4 からの許容相対ずれ
    RATIO_TOLERANCE = 0.5

    # 最小固有値（定数関数）が入るべき範囲
    ZERO_MODE_BAND = (-1e-8, 1e-6)

    # 三重対角性の判定に用いる相対しきい値
    BAND_TOLERANCE = 1e-12

    def assemble(self, presentation: FoliationPresentation, grid_size: int) -> DiscreteOperator:
        """Assemble the symmetrized operator on N cells.

        Args:
            presentation: 提示
            grid_size: セル数 N（16 以上）

        Returns:
            対称三重対角の離散作用素

        Raises:
            GridTooCoarseError: N < 16 の場合
            InconsistentCoverError: 内部零点がセル境界に乗らない場合
        """
        self._check_grid(grid_size)
        return self._assemble_weight(presentation.weight, grid_size, presentation.name)

    def assemble_deck_invariant(
        self, presentation: FoliationPresentation, grid_size: int
    ) -> DiscreteOperator:
        """Restrict a lifted presentation to deck-invariant functions.

        被覆区間上の作用素（N·m セル）を、折り返しで不変なベクトル
        （基底区間の N セルへの偶拡張）の空間に Galerkin 射影します。
        持ち上げでない提示ではそのまま assemble と同じです。
        """
        self._check_grid(grid_size)
        weight = presentation.weight
        if not isinstance(weight, PulledBackWeight):
            return self._assemble_weight(weight, grid_size, presentation.name)
        return self._assemble_invariant(weight, grid_size, presentation.name)

    def eigenpairs(self, operator: DiscreteOperator, count: int) -> tuple[FloatArray, FloatArray]:
        """Lowest eigenpairs of the symmetrized matrix.

        二分法（stebz）で固有値を求め、逆反復（stein）で固有ベクトルを求めた後、
        Rayleigh 商で固有値を仕上げます。

        Returns:
            (固有値（昇順）, 固有ベクトル（列）)
        """
        if count == 0:
            return np.empty(0), np.empty((operator.grid_size, 0))
        if count > operator.grid_size:
            raise ValueError(f"cannot compute {count} eigenvalues on {operator.grid_size} cells")

        _, vectors = eigh_tridiagonal(
            operator.diagonal,
            operator.off_diagonal,
            select="i",
            select_range=(0, count - 1),
            lapack_driver="stebz",
        )
        refined = np.array(
            [vector @ operator.apply(vector) / (vector @ vector) for vector in vectors.T]
        )
        order = np.argsort(refined)
        return refined[order], vectors[:, order]

    def eigenvalues(self, operator: DiscreteOperator, count: int) -> FloatArray:
        """Lowest eigenvalues (ascending)."""
        values, _ = self.eigenpairs(operator, count)
        return values

    def basic_spectrum(
        self,
        presentation: FoliationPresentation,
        grid_size: int,
        count: int,
        *,
        deck_invariant: bool = True,
    ) -> SpectrumEstimate:
        """Richardson-extrapolated basic spectrum.

        Args:
            presentation: 提示
            grid_size: 粗い格子のセル数 N（細かい格子は 2N）
            count: 固有値の個数 k（N/4 以下）
            deck_invariant: 持ち上げに対して折り返し不変な関数に制限するか

        Returns:
            スペクトル推定

        Raises:
            GridTooCoarseError: N < 16 の場合
            ValueError: k > N/4 の場合
        """
        self._check_grid(grid_size)
        self._check_count(grid_size, count)
        return self._spectrum(
            presentation.weight, presentation.name, grid_size, count, invariant=deck_invariant
        )

    def orbifold_spectrum(
        self, presentation: FoliationPresentation, grid_size: int, count: int
    ) -> SpectrumEstimate:
        """Spectrum of the drift-free (pure Neumann) Laplacian on the same interval.

        w を 1 に置き換えます（持ち上げの場合は折り返し構造を保ったまま 1 にします）。
        """
        self._check_grid(grid_size)
        self._check_count(grid_size, count)
        weight = presentation.weight
        flat: WeightProfile
        if isinstance(weight, PulledBackWeight):
            flat = PulledBackWeight(ConstantWeight(1.0, weight.fold.base_length), weight.fold)
        else:
            flat = ConstantWeight(1.0, presentation.length)
        return self._spectrum(
            flat, f"{presentation.name}[orbifold]", grid_size, count, invariant=True
        )

    def reference_spectrum(self, family: str, count: int, **parameters: float) -> list[float]:
        """Closed-form spectra.

        - sphere(n, r): k(k+n-1)/r²
        - interval(length): (kπ/L)²

        Raises:
            UnknownFamilyError: 未知の族の場合
        """
        if count < 0:
            raise ValueError(f"count must be >= 0, got {count}")
        match family:
            case "sphere":
                n = int(parameters.get("n", 2))
                r = float(parameters.get("r", 1.0))
                return [k * (k + n - 1) / r**2 for k in range(count)]
            case "interval" | "orbifold":
                length = float(parameters.get("length", math.pi))
                return [(k * math.pi / length) ** 2 for k in range(count)]
            case _:
                raise UnknownFamilyError(f"unknown reference family: {family!r}")

    def low_modes(
        self, presentation: FoliationPresentation, grid_size: int, count: int
    ) -> tuple[FloatArray, FloatArray, FloatArray]:
        """Low eigenfunctions sampled at cell centres (diagnostics only).

        Returns:
            (セル中心, 固有値, 固有関数（列、重み付きノルム 1）)
        """
        operator = self.assemble_deck_invariant(presentation, grid_size)
        values, vectors = self.eigenpairs(operator, count)
        modes = vectors / np.sqrt(operator.cell_weights)[:, np.newaxis]
        for i in range(modes.shape[1]):
            modes[:, i] /= math.sqrt(operator.weighted_inner(modes[:, i], modes[:, i]))
        return operator.cell_centers, values, modes

    def convergence_ratios(
        self, presentation: FoliationPresentation, grid_size: int, count: int
    ) -> tuple[float | None, ...]:
        """(λ_N - λ_2N)/(λ_2N - λ_4N) per eigenvalue (None when the denominator vanishes)."""
        self._check_grid(grid_size)
        self._check_count(grid_size, count)
        rows = [
            self.eigenvalues(self.assemble_deck_invariant(presentation, n), count)
            for n in (grid_size, 2 * grid_size, 4 * grid_size)
        ]
        return self._ratios(rows[0], rows[1], rows[2])

    def check_convergence(
        self,
        presentation: FoliationPresentation,
        grid_size: int,
        count: int,
        *,
        strict: bool = True,
    ) -> tuple[float | None, ...]:
        """Raise if an observed ratio deviates from 4 by more than 50 %.

        Raises:
            ConvergenceSuspectError: strict で誤差比が 2 次精度の予測から外れた場合
        """
        ratios = self.convergence_ratios(presentation, grid_size, count)
        return self.screen_ratios(presentation.name, ratios, strict=strict)

    def screen_ratios(
        self, label: str, ratios: tuple[float | None, ...], *, strict: bool = True
    ) -> tuple[float | None, ...]:
        """誤差比を 4 ± 50% と照合し、外れたものを警告する

        Raises:
            ConvergenceSuspectError: strict で外れた誤差比がある場合
        """
        tolerance = self.RATIO_TOLERANCE * self.RICHARDSON_FACTOR
        suspect = [
            (i, r)
            for i, r in enumerate(ratios)
            if r is not None and abs(r - self.RICHARDSON_FACTOR) > tolerance
        ]
        if suspect:
            logger.warning("Suspicious convergence ratios for %s: %s", label, suspect)
            if strict:
                raise ConvergenceSuspectError(
                    f"observed ratios {suspect} for {label} deviate from "
                    f"{self.RICHARDSON_FACTOR} by more than {self.RATIO_TOLERANCE:.0%}",
                    ratios,
                )
        return ratios

    def convergence_table(
        self, presentation: FoliationPresentation, ladder: tuple[int, ...], count: int
    ) -> ConvergenceTable:
        """Eigenvalues over a doubling ladder of grid sizes.

        Raises:
            GridTooCoarseError: 16 未満の格子を含む場合
            ValueError: 3 段未満、または各段が前段の 2 倍でない場合
        """
        if len(ladder) < 3:
            raise ValueError(f"ladder needs at least 3 grid sizes, got {ladder}")
        for size in ladder:
            self._check_grid(size)
        for previous, current in zip(ladder, ladder[1:], strict=False):
            if current != 2 * previous:
                raise ValueError(f"each ladder step must double the last, got {ladder}")
        self._check_count(ladder[0], count)

        rows = tuple(
            tuple(
                float(v)
                for v in self.eigenvalues(self.assemble_deck_invariant(presentation, n), count)
            )
            for n in ladder
        )
        coarse, fine = np.asarray(rows[-2]), np.asarray(rows[-1])
        extrapolated, _ = self._richardson(coarse, fine)
        ratios = self._ratios(np.asarray(rows[-3]), coarse, fine)
        logger.debug("Convergence ratios for %s: %s", presentation.name, ratios)
        return ConvergenceTable(
            label=presentation.name,
            ladder=tuple(ladder),
            eigenvalues=rows,
            ratios=ratios,
            extrapolated=tuple(float(v) for v in extrapolated),
        )

    def _spectrum(
        self, weight: WeightProfile, label: str, grid_size: int, count: int, *, invariant: bool
    ) -> SpectrumEstimate:
        def build(n: int) -> DiscreteOperator:
            if invariant and isinstance(weight, PulledBackWeight):
                return self._assemble_invariant(weight, n, label)
            return self._assemble_weight(weight, n, label)

        coarse = self.eigenvalues(build(grid_size), count)
        fine = self.eigenvalues(build(2 * grid_size), count)
        extrapolated, errors = self._richardson(coarse, fine)
        for i, (value, error) in enumerate(zip(extrapolated, errors, strict=True)):
            logger.debug("%s lambda_%d = %.12g (+/- %.2e)", label, i, value, error)

        if count > 0:
            low, high = self.ZERO_MODE_BAND
            if not (low <= extrapolated[0] <= high):
                logger.warning(
                    "Zero mode of %s outside expected band: %.3e", label, extrapolated[0]
                )

        return SpectrumEstimate(
            label=label,
            grid_sizes=(grid_size, 2 * grid_size),
            coarse=tuple(float(v) for v in coarse),
            fine=tuple(float(v) for v in fine),
            extrapolated=tuple(float(v) for v in extrapolated),
            error_estimates=tuple(float(v) for v in errors),
        )

    def _richardson(self, coarse: FloatArray, fine: FloatArray) -> tuple[FloatArray, FloatArray]:
        factor = self.RICHARDSON_FACTOR
        extrapolated = (factor * fine - coarse) / (factor - 1.0)
        errors = np.abs(fine - coarse) / (factor - 1.0)
        return extrapolated, errors

    def _assemble_weight(
        self, weight: WeightProfile, grid_size: int, label: str
    ) -> DiscreteOperator:
        length = weight.length
        h = length / grid_size
        self._check_interior_zeros(weight, grid_size)

        faces = np.linspace(0.0, length, grid_size + 1)
        centers = (np.arange(grid_size) + 0.5) * h
        cell_weights = weight.value(centers)
        face_weights = weight.value(faces)
        if np.any(cell_weights <= 0):
            raise InvalidWeightError(f"weight of {label} vanishes at a cell centre")

        # 外側の面は流束 0
        inner = face_weights[1:-1]
        left_flux = np.concatenate(([0.0], inner))
        right_flux = np.concatenate((inner, [0.0]))
        diagonal = (left_flux + right_flux) / (h * h * cell_weights)
        off_diagonal = -inner / (h * h * np.sqrt(cell_weights[:-1] * cell_weights[1:]))

        logger.debug("Assembled %s on %d cells (h=%.3e)", label, grid_size, h)
        return DiscreteOperator(
            grid_size=grid_size,
            length=length,
            diagonal=diagonal,
            off_diagonal=off_diagonal,
            cell_weights=cell_weights,
            face_weights=face_weights,
            label=label,
        )

    def _assemble_invariant(
        self, weight: PulledBackWeight, grid_size: int, label: str
    ) -> DiscreteOperator:
        fold = weight.fold
        cover_cells = grid_size * fold.deck_order
        cover = self._assemble_weight(weight, cover_cells, label)
        h = cover.cell_width

        # 対称化前の剛性行列と質量行列
        inner = cover.face_weights[1:-1]
        stiffness_diagonal = (np.concatenate(([0.0], inner)) + np.concatenate((inner, [0.0])))
        stiffness = sparse.diags(
            [-inner, stiffness_diagonal, -inner], offsets=[-1, 0, 1], format="csr"
        ) / (h * h)
        mass = sparse.diags(cover.cell_weights, format="csr")

        base_cell = np.floor(fold.apply(cover.cell_centers) / h).astype(np.int64)
        base_cell = np.clip(base_cell, 0, grid_size - 1)
        projection = sparse.csr_matrix(
            (np.ones(cover_cells), (np.arange(cover_cells), base_cell)),
            shape=(cover_cells, grid_size),
        )
        reduced_stiffness = (projection.T @ stiffness @ projection).tocoo()
        reduced_mass = (projection.T @ mass @ projection).diagonal()

        band = np.abs(reduced_stiffness.row - reduced_stiffness.col) > 1
        peak = float(np.max(np.abs(reduced_stiffness.data)))
        if np.any(np.abs(reduced_stiffness.data[band]) > self.BAND_TOLERANCE * peak):
            raise InconsistentCoverError(
                f"fold of {label} does not reduce to a tridiagonal operator"
            )

        reduced = reduced_stiffness.tocsr()
        scale = 1.0 / np.sqrt(reduced_mass)
        diagonal = reduced.diagonal() * scale * scale
        off_diagonal = reduced.diagonal(1) * scale[:-1] * scale[1:]
        # 内側の面の重みは m 個の逆像の和、外側は端点での値の m 倍
        outer = fold.deck_order * weight.base.value(np.array([0.0, fold.base_length]))
        face_weights = np.concatenate(([outer[0]], -reduced.diagonal(1) * h * h, [outer[1]]))

        return DiscreteOperator(
            grid_size=grid_size,
            length=fold.base_length,
            diagonal=diagonal,
            off_diagonal=off_diagonal,
            cell_weights=reduced_mass,
            face_weights=face_weights,
            label=label,
        )

    def _check_grid(self, grid_size: int) -> None:
        if grid_size < self.MIN_GRID_SIZE:
            raise GridTooCoarseError(
                f"grid size must be >= {self.MIN_GRID_SIZE}, got {grid_size}"
            )

    @staticmethod
    def _check_count(grid_size: int, count: int) -> None:
        if not (0 <= count <= grid_size // 4):
            raise ValueError(
                f"eigenvalue count must be in [0, N/4 = {grid_size // 4}], got {count}"
            )

    @staticmethod
    def _check_interior_zeros(weight: WeightProfile, grid_size: int) -> None:
        h = weight.length / grid_size
        for position, _ in weight.interior_zeros:
            cells = position / h
            if abs(cells - round(cells)) > 1e-9:
                raise InconsistentCoverError(
                    f"interior zero at {position} does not fall on a cell face of a "
                    f"{grid_size}-cell grid"
                )

    def _ratios(
        self, coarse: FloatArray, medium: FloatArray, fine: FloatArray
    ) -> tuple[float | None, ...]:
        ratios: list[float | None] = []
        for a, b, c in zip(coarse, medium, fine, strict=True):
            denominator = b - c
            # 零モードと差が丸め誤差以下の固有値では比が定義できない
            if abs(c) <= self.ZERO_MODE_BAND[1] or abs(denominator) <= 1e-13 * abs(c):
                ratios.append(None)
            else:
                ratios.append(float((a - b) / denominator))
        return tuple(ratios)
