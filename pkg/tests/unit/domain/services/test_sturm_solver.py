"""Tests for SturmSolver.

有限体積法による基本ラプラシアンの離散化と固有値計算のテスト。
小さな格子（N = 64〜400）で検証し、N = 2000 の受け入れ基準は結合テストで扱います。
"""

import math

import numpy as np
import pytest

from leafspec.domain.errors import (
    ConvergenceSuspectError,
    GridTooCoarseError,
    InconsistentCoverError,
    UnknownFamilyError,
)
from leafspec.domain.models.mean_curvature import MeanCurvatureField
from leafspec.domain.models.presentation import FoliationPresentation
from leafspec.domain.models.weight import PowerTrigWeight
from leafspec.domain.services.mean_curvature_service import MeanCurvatureService
from leafspec.domain.services.presentation_factory import PresentationFactory
from leafspec.domain.services.sturm_solver import SturmSolver


class TestAssemble:
    """assemble のテスト"""

    def test_minimum_grid(self, solver: SturmSolver, sphere2: FoliationPresentation) -> None:
        """N = 16 で組み立てられること"""
        operator = solver.assemble(sphere2, 16)
        assert operator.grid_size == 16
        assert operator.face_weights[0] == 0.0

    def test_coarse_grid_raises(self, solver: SturmSolver, sphere2: FoliationPresentation) -> None:
        """N < 16 は GridTooCoarseError になること"""
        with pytest.raises(GridTooCoarseError, match=">= 16"):
            solver.assemble(sphere2, 15)

    def test_symmetric_matrix(self, solver: SturmSolver, sphere3: FoliationPresentation) -> None:
        """対称化行列が対称であること"""
        matrix = solver.assemble(sphere3, 32).dense()
        np.testing.assert_array_equal(matrix, matrix.T)

    @pytest.mark.parametrize("name", ["sphere2", "sphere3"])
    def test_self_adjoint_in_weighted_inner_product(
        self, solver: SturmSolver, request: pytest.FixtureRequest, name: str
    ) -> None:
        """元の作用素が 20 組の乱数ベクトルで重み付き内積について自己随伴であること"""
        presentation: FoliationPresentation = request.getfixturevalue(name)
        operator = solver.assemble(presentation, 64)
        rng = np.random.default_rng(64)
        for _ in range(20):
            first, second = rng.standard_normal(64), rng.standard_normal(64)
            image_first = operator.apply_untransformed(first)
            image_second = operator.apply_untransformed(second)

            left = operator.weighted_inner(image_first, second)
            right = operator.weighted_inner(first, image_second)
            scale = math.sqrt(
                operator.weighted_inner(image_first, image_first)
                * operator.weighted_inner(second, second)
            ) + math.sqrt(
                operator.weighted_inner(first, first)
                * operator.weighted_inner(image_second, image_second)
            )
            assert abs(left - right) <= 1e-12 * scale

    def test_constants_are_in_kernel(
        self, solver: SturmSolver, sphere3: FoliationPresentation
    ) -> None:
        """定数関数は離散作用素の核に入ること"""
        operator = solver.assemble(sphere3, 64)
        image = operator.apply_untransformed(np.ones(64))
        np.testing.assert_allclose(image, 0.0, atol=1e-8)

    @pytest.mark.parametrize("grid_size", [16, 100, 400])
    @pytest.mark.parametrize("name", ["sphere2", "sphere3", "half_sin"])
    def test_lowest_eigenvalue_vanishes(
        self, solver: SturmSolver, request: pytest.FixtureRequest, name: str, grid_size: int
    ) -> None:
        """一定でない重みでも最小固有値が 1e-9·λ₁ 以内で 0 になること"""
        presentation: FoliationPresentation = request.getfixturevalue(name)
        lowest, first = solver.eigenvalues(solver.assemble(presentation, grid_size), 2)

        assert first > 0
        assert abs(lowest) <= 1e-9 * first

    def test_drift_form_is_second_order(
        self, solver: SturmSolver, sphere2: FoliationPresentation
    ) -> None:
        """-(1/w)(w f')' と -f'' + H_* f' の差分近似の残差が O(h²) で減ること"""
        field = MeanCurvatureField(sphere2)
        rng = np.random.default_rng(50)
        grid_sizes = (100, 200, 400)
        modes = np.arange(1, 5)

        for _ in range(50):
            cos_part, sin_part = rng.standard_normal(4), rng.standard_normal(4)
            residuals: list[float] = []
            for n in grid_sizes:
                operator = solver.assemble(sphere2, n)
                theta = operator.cell_centers
                h = operator.cell_width
                values = np.cos(np.outer(theta, modes)) @ cos_part + np.sin(
                    np.outer(theta, modes)
                ) @ sin_part

                laplacian = -(values[2:] - 2 * values[1:-1] + values[:-2]) / h**2
                gradient = (values[2:] - values[:-2]) / (2 * h)
                expected = laplacian + field(theta[1:-1]) * gradient
                discrete = operator.apply_untransformed(values)[1:-1]

                window = (theta[1:-1] > 0.5) & (theta[1:-1] < math.pi - 0.5)
                residuals.append(float(np.max(np.abs(discrete - expected)[window])))

            slope = np.polyfit(
                np.log([math.pi / n for n in grid_sizes]), np.log(residuals), 1
            )[0]
            assert 1.8 <= slope <= 2.3

    def test_interior_zero_off_face_raises(
        self,
        solver: SturmSolver,
        mean_curvature_service: MeanCurvatureService,
        sphere2: FoliationPresentation,
    ) -> None:
        """内部零点がセル境界に乗らない格子ではエラーになること"""
        lifted = mean_curvature_service.lift(sphere2, 2)
        with pytest.raises(InconsistentCoverError, match="cell face"):
            solver.assemble(lifted, 65)


class TestBasicSpectrum:
    """basic_spectrum のテスト"""

    def test_round_sphere(self, solver: SturmSolver, sphere2: FoliationPresentation) -> None:
        """S^2 の基本スペクトルが k(k+1) に近いこと"""
        estimate = solver.basic_spectrum(sphere2, 128, 4)

        assert estimate.grid_sizes == (128, 256)
        assert estimate.eigenvalues[0] == pytest.approx(0.0, abs=1e-8)
        assert estimate.eigenvalues[1:] == pytest.approx([2.0, 6.0, 12.0], rel=1e-3)

    def test_three_sphere(self, solver: SturmSolver, sphere3: FoliationPresentation) -> None:
        """S^3 の基本スペクトルが k(k+2) に近いこと"""
        estimate = solver.basic_spectrum(sphere3, 128, 3)
        assert estimate.eigenvalues[1:] == pytest.approx([3.0, 8.0], rel=1e-3)

    def test_orbifold(self, solver: SturmSolver, orbifold: FoliationPresentation) -> None:
        """オービフォールド [0, π] の Neumann スペクトル k²"""
        estimate = solver.basic_spectrum(orbifold, 64, 4)
        assert estimate.eigenvalues[0] == pytest.approx(0.0, abs=1e-10)
        assert estimate.eigenvalues[1:] == pytest.approx([1.0, 4.0, 9.0], rel=1e-5)

    def test_error_estimates_shrink_with_extrapolation(
        self, solver: SturmSolver, sphere2: FoliationPresentation
    ) -> None:
        """外挿値は細かい格子の値より真値に近いこと"""
        estimate = solver.basic_spectrum(sphere2, 64, 3)
        assert abs(estimate.extrapolated[1] - 2.0) < abs(estimate.fine[1] - 2.0)
        assert estimate.error_estimates[1] > 0

    def test_scale_invariance(
        self,
        solver: SturmSolver,
        factory: PresentationFactory,
        sphere2: FoliationPresentation,
    ) -> None:
        """重みの定数倍でスペクトルが変わらないこと"""
        base = solver.basic_spectrum(sphere2, 64, 5)
        scaled = solver.basic_spectrum(factory.rescale(sphere2, 7.0), 64, 5)

        assert scaled.eigenvalues[0] == pytest.approx(base.eigenvalues[0], abs=1e-9)
        assert scaled.eigenvalues[1:] == pytest.approx(base.eigenvalues[1:], rel=1e-10)

    def test_reflection_invariance(self, solver: SturmSolver, factory: PresentationFactory) -> None:
        """θ ↦ L - θ の反転でスペクトルが変わらないこと"""
        clifford = factory.custom(
            name="clifford",
            kappa=1.0,
            weight=PowerTrigWeight(sin_power=1, cos_power=1, scale=1.0, length=math.pi / 2),
            regular_leaf_dim=2,
            endpoint_leaf_dims=(1, 1),
        )
        half_sin = factory.custom(
            name="half_sin",
            kappa=0.25,
            weight=PowerTrigWeight(sin_power=1, cos_power=0, scale=0.25, length=math.pi),
            regular_leaf_dim=1,
            endpoint_leaf_dims=(0, 1),
        )
        for presentation in (clifford, half_sin):
            base = solver.basic_spectrum(presentation, 64, 5)
            reflected = solver.basic_spectrum(factory.reflect(presentation), 64, 5)
            assert reflected.eigenvalues[0] == pytest.approx(base.eigenvalues[0], abs=1e-9)
            assert reflected.eigenvalues[1:] == pytest.approx(base.eigenvalues[1:], rel=1e-10)

    @pytest.mark.parametrize("count", [-1, 17])
    def test_count_out_of_range_raises(
        self, solver: SturmSolver, sphere2: FoliationPresentation, count: int
    ) -> None:
        """k が [0, N/4] の外ならエラーになること"""
        with pytest.raises(ValueError, match="eigenvalue count must be in"):
            solver.basic_spectrum(sphere2, 64, count)

    def test_zero_mode_band_is_fixed(self, solver: SturmSolver) -> None:
        """最小固有値の許容帯は [-1e-8, 1e-6]"""
        assert solver.ZERO_MODE_BAND == (-1e-8, 1e-6)

    @pytest.mark.parametrize(
        ("shift", "warned"),
        [(0.0, False), (-5e-9, False), (5e-7, False), (-2e-8, True), (1e-3, True)],
    )
    def test_zero_mode_outside_band_warns(
        self,
        solver: SturmSolver,
        orbifold: FoliationPresentation,
        monkeypatch: pytest.MonkeyPatch,
        caplog: pytest.LogCaptureFixture,
        shift: float,
        warned: bool,
    ) -> None:
        """最小固有値が許容帯を外れると警告のみを出し、結果は返すこと"""
        original = solver.eigenvalues
        monkeypatch.setattr(
            solver, "eigenvalues", lambda operator, count: original(operator, count) + shift
        )

        estimate = solver.basic_spectrum(orbifold, 64, 3)

        assert estimate.eigenvalues[0] == pytest.approx(shift, abs=1e-10)
        assert ("Zero mode of orb outside expected band" in caplog.text) is warned

    def test_zero_count(self, solver: SturmSolver, sphere2: FoliationPresentation) -> None:
        """k = 0 では空の推定を返すこと"""
        assert solver.basic_spectrum(sphere2, 64, 0).count == 0


class TestCoveringSpectrum:
    """持ち上げのスペクトルのテスト"""

    def test_deck_invariant_matches_base(
        self,
        solver: SturmSolver,
        mean_curvature_service: MeanCurvatureService,
        sphere2: FoliationPresentation,
    ) -> None:
        """折り返し不変な関数に制限すると基底と同じスペクトルになること"""
        lifted = mean_curvature_service.lift(sphere2, 2)
        base = solver.basic_spectrum(sphere2, 64, 4)
        cover = solver.basic_spectrum(lifted, 64, 4)

        assert cover.eigenvalues[0] == pytest.approx(0.0, abs=1e-9)
        assert cover.eigenvalues[1:] == pytest.approx(base.eigenvalues[1:], rel=1e-10)

    def test_full_cover_doubles_multiplicities(
        self,
        solver: SturmSolver,
        mean_curvature_service: MeanCurvatureService,
        sphere2: FoliationPresentation,
    ) -> None:
        """折り返し点で w が消えると被覆区間の作用素は 2 つに分かれること"""
        lifted = mean_curvature_service.lift(sphere2, 2)
        estimate = solver.basic_spectrum(lifted, 128, 4, deck_invariant=False)
        assert estimate.eigenvalues[:2] == pytest.approx([0.0, 0.0], abs=1e-8)
        assert estimate.eigenvalues[2:] == pytest.approx([2.0, 2.0], rel=1e-2)

    def test_triple_cover_of_orbifold(
        self,
        solver: SturmSolver,
        mean_curvature_service: MeanCurvatureService,
        orbifold: FoliationPresentation,
    ) -> None:
        """オービフォールドの 3 重被覆も基底と同じスペクトルになること"""
        cover = solver.basic_spectrum(mean_curvature_service.lift(orbifold, 3), 64, 4)
        assert cover.eigenvalues[1:] == pytest.approx([1.0, 4.0, 9.0], rel=1e-5)

    def test_assemble_deck_invariant_passthrough(
        self, solver: SturmSolver, sphere2: FoliationPresentation
    ) -> None:
        """持ち上げでない提示では assemble と同じ行列になること"""
        np.testing.assert_array_equal(
            solver.assemble_deck_invariant(sphere2, 32).dense(),
            solver.assemble(sphere2, 32).dense(),
        )


class TestOrbifoldSpectrum:
    """orbifold_spectrum のテスト"""

    def test_drift_free_comparison(
        self, solver: SturmSolver, sphere2: FoliationPresentation
    ) -> None:
        """w を 1 に置き換えたスペクトルは k² になること"""
        estimate = solver.orbifold_spectrum(sphere2, 64, 4)

        assert estimate.label == "s2[orbifold]"
        assert estimate.eigenvalues[1:] == pytest.approx([1.0, 4.0, 9.0], rel=1e-5)

    def test_lift_keeps_fold(
        self,
        solver: SturmSolver,
        mean_curvature_service: MeanCurvatureService,
        sphere2: FoliationPresentation,
    ) -> None:
        """持ち上げでは基底区間の Neumann スペクトルになること"""
        estimate = solver.orbifold_spectrum(mean_curvature_service.lift(sphere2, 2), 64, 3)
        assert estimate.eigenvalues[1:] == pytest.approx([1.0, 4.0], rel=1e-5)


class TestReferenceSpectrum:
    """reference_spectrum のテスト"""

    def test_sphere(self, solver: SturmSolver) -> None:
        """球面 k(k+n-1)/r²"""
        assert solver.reference_spectrum("sphere", 4, n=2) == [0.0, 2.0, 6.0, 12.0]
        assert solver.reference_spectrum("sphere", 3, n=3, r=2.0) == [0.0, 0.75, 2.0]

    def test_interval(self, solver: SturmSolver) -> None:
        """区間 (kπ/L)²"""
        assert solver.reference_spectrum("interval", 3, length=math.pi) == pytest.approx(
            [0.0, 1.0, 4.0]
        )
        assert solver.reference_spectrum("orbifold", 2, length=2 * math.pi) == pytest.approx(
            [0.0, 0.25]
        )

    def test_unknown_family_raises(self, solver: SturmSolver) -> None:
        """未知の族は UnknownFamilyError になること"""
        with pytest.raises(UnknownFamilyError, match="torus"):
            solver.reference_spectrum("torus", 3)


class TestDiagnostics:
    """low_modes / convergence のテスト"""

    def test_low_modes_are_weighted_normalized(
        self, solver: SturmSolver, sphere2: FoliationPresentation
    ) -> None:
        """固有関数は重み付きノルム 1 で、最初のものは定数であること"""
        centers, values, modes = solver.low_modes(sphere2, 64, 3)
        operator = solver.assemble(sphere2, 64)

        assert centers.shape == (64,)
        assert values.shape == (3,)
        for i in range(3):
            assert operator.weighted_inner(modes[:, i], modes[:, i]) == pytest.approx(1.0)
        np.testing.assert_allclose(np.abs(modes[:, 0]), 1 / math.sqrt(2), rtol=1e-3)

    def test_second_mode_is_cosine(
        self, solver: SturmSolver, sphere2: FoliationPresentation
    ) -> None:
        """S^2 の 2 番目の固有関数は cos θ に比例すること"""
        centers, _, modes = solver.low_modes(sphere2, 128, 2)
        mode = modes[:, 1] * np.sign(modes[0, 1])
        np.testing.assert_allclose(mode, math.sqrt(1.5) * np.cos(centers), atol=1e-2)

    def test_orbifold_ratios_are_four(
        self, solver: SturmSolver, orbifold: FoliationPresentation
    ) -> None:
        """2 次精度なら誤差比がおよそ 4 になること"""
        ratios = solver.check_convergence(orbifold, 32, 4)

        assert ratios[0] is None
        for ratio in ratios[1:]:
            assert ratio is not None
            assert ratio == pytest.approx(4.0, rel=0.05)

    def test_suspect_ratios_raise(
        self, solver: SturmSolver, orbifold: FoliationPresentation, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """誤差比が 4 から大きく外れると ConvergenceSuspectError になること"""
        monkeypatch.setattr(solver, "convergence_ratios", lambda *args: (None, 1.0))
        with pytest.raises(ConvergenceSuspectError, match="deviate"):
            solver.check_convergence(orbifold, 32, 2)

    def test_screen_ratios_warns_without_strict(
        self, solver: SturmSolver, caplog: pytest.LogCaptureFixture
    ) -> None:
        """strict でなければ外れた誤差比は警告のみで返すこと"""
        ratios = solver.screen_ratios("orb", (None, 4.1, 1.0), strict=False)

        assert ratios == (None, 4.1, 1.0)
        assert "Suspicious convergence ratios for orb: [(2, 1.0)]" in caplog.text

    def test_convergence_table(self, solver: SturmSolver, orbifold: FoliationPresentation) -> None:
        """倍々の格子列に対する固有値表"""
        table = solver.convergence_table(orbifold, (32, 64, 128), 3)

        assert table.label == "orb"
        assert len(table.eigenvalues) == 3
        assert table.extrapolated[1:] == pytest.approx([1.0, 4.0], rel=1e-5)
        assert table.ratios[1] == pytest.approx(4.0, rel=0.05)

    @pytest.mark.parametrize(
        ("ladder", "error", "message"),
        [
            ((64, 128), ValueError, "at least 3"),
            ((64, 128, 200), ValueError, "double"),
            ((8, 16, 32), GridTooCoarseError, ">= 16"),
        ],
    )
    def test_invalid_ladder_raises(
        self,
        solver: SturmSolver,
        orbifold: FoliationPresentation,
        ladder: tuple[int, ...],
        error: type[Exception],
        message: str,
    ) -> None:
        """不正な格子列はエラーになること"""
        with pytest.raises(error, match=message):
            solver.convergence_table(orbifold, ladder, 2)
