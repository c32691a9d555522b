"""Numerical reproductions on fine grids.

N = 2000 の格子で球面・オービフォールドのスペクトル、被覆の持ち上げ、
同梱コーパスでの定理との整合性、収束次数を確認します。
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leafspec.application.usecases.run_scenario_usecase import RunScenarioUseCase
from leafspec.domain.models.isometry import IsometryDatum
from leafspec.domain.models.mean_curvature import CoveringDatum
from leafspec.domain.models.presentation import FoliationPresentation
from leafspec.domain.models.scenario import Report
from leafspec.domain.services.isometry_checker import IsometryChecker
from leafspec.domain.services.jacobi_service import JacobiService
from leafspec.domain.services.mean_curvature_service import MeanCurvatureService
from leafspec.domain.services.presentation_factory import PresentationFactory
from leafspec.domain.services.sturm_solver import SturmSolver
from leafspec.infrastructure.repositories.csv_report_writer import CsvReportWriter
from leafspec.infrastructure.repositories.yaml_scenario_repository import YamlScenarioRepository
from leafspec.presentation.cli import main

GRID_SIZE = 2000
SCENARIOS = Path(__file__).resolve().parents[2] / "config" / "scenarios"

_SOLVER = SturmSolver()
_FACTORY = PresentationFactory()


def _assert_spectrum(actual: tuple[float, ...], expected: list[float]) -> None:
    """0 に近い値は絶対誤差 1e-6、それ以外は相対誤差 0.5% で一致すること"""
    assert len(actual) == len(expected)
    for value, target in zip(actual, expected, strict=True):
        if abs(target) < 1e-6:
            assert value == pytest.approx(0.0, abs=1e-6)
        else:
            assert value == pytest.approx(target, rel=5e-3)


@pytest.fixture(scope="module")
def corpus_report(tmp_path_factory: pytest.TempPathFactory) -> Report:
    """同梱コーパスを N = 2000 で実行したレポート"""
    usecase = RunScenarioUseCase(
        scenario_repo=YamlScenarioRepository(),
        report_writer=CsvReportWriter(),
    )
    result = usecase.execute(SCENARIOS / "corpus.scenario", tmp_path_factory.mktemp("corpus"))
    return result.report


@pytest.mark.integration
class TestSphereOrbifoldPair:
    """回転による S^2 とオービフォールド [0, π] の比較"""

    def test_sphere_spectrum(self) -> None:
        """S^2 の基本スペクトルは k(k+1)"""
        estimate = _SOLVER.basic_spectrum(_FACTORY.sphere_rotation(2, 1.0), GRID_SIZE, 5)
        _assert_spectrum(estimate.eigenvalues, [0, 2, 6, 12, 20])

    def test_orbifold_spectrum(self) -> None:
        """オービフォールドの基本スペクトルは k²"""
        estimate = _SOLVER.basic_spectrum(_FACTORY.orbifold_interval(math.pi), GRID_SIZE, 5)
        _assert_spectrum(estimate.eigenvalues, [0, 1, 4, 9, 16])

    def test_verdict(self) -> None:
        """計量と qcodim の層は一致するが、余次元と平均曲率が一致せず等スペクトルでない"""
        checker = IsometryChecker(solver=_SOLVER, factory=_FACTORY)
        iso = IsometryDatum(
            _FACTORY.sphere_rotation(2, 1.0, "sphere"),
            _FACTORY.orbifold_interval(math.pi, name="orbifold"),
        )

        verdict = checker.verdict(iso, GRID_SIZE, 5)

        assert verdict.metric_ok
        assert verdict.qcodim_ok
        assert not verdict.codim_ok
        assert not verdict.mean_curvature_ok
        assert not verdict.theorem_applies
        assert not verdict.isospectral
        assert verdict.minimal == (False, True)

    def test_leading_gap_is_robust(self) -> None:
        """最初の非零固有値の相対差は格子によらず 40% を超えること"""
        sphere = _FACTORY.sphere_rotation(2, 1.0)
        orbifold = _FACTORY.orbifold_interval(math.pi)
        for n in (500, 1000, GRID_SIZE):
            first = _SOLVER.basic_spectrum(sphere, n, 2).eigenvalues[1]
            second = _SOLVER.basic_spectrum(orbifold, n, 2).eigenvalues[1]
            assert abs(first - second) / max(first, second) > 0.4

    def test_cli_run(self, tmp_path: Path) -> None:
        """同梱の example1 を CLI で実行すると非等スペクトルの行を書くこと"""
        with pytest.raises(SystemExit) as exc_info:
            main(["run", str(SCENARIOS / "example1.scenario"), "--out", str(tmp_path)])

        assert exc_info.value.code == 0
        rows = (tmp_path / "verdicts.csv").read_text(encoding="utf-8").splitlines()
        assert rows[1].startswith("sphere~orbifold,true,false,true,false,false,false,")


@pytest.mark.integration
class TestSphereFamily:
    """球面の回転葉層の族"""

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_dimension(self, n: int) -> None:
        """最初の 4 つの非零固有値が k(k+n-1) に一致すること"""
        estimate = _SOLVER.basic_spectrum(_FACTORY.sphere_rotation(n, 1.0), GRID_SIZE, 5)
        _assert_spectrum(estimate.eigenvalues, [k * (k + n - 1) for k in range(5)])

    def test_radius_scaling(self) -> None:
        """半径 1/2 では 4·k(k+1) になること"""
        estimate = _SOLVER.basic_spectrum(_FACTORY.sphere_rotation(2, 0.5), GRID_SIZE, 5)
        _assert_spectrum(estimate.eigenvalues, [4 * k * (k + 1) for k in range(5)])

    def test_convergence_order(self) -> None:
        """λ₁, λ₂ の誤差比が [3.2, 4.8] に入ること"""
        table = _SOLVER.convergence_table(
            _FACTORY.sphere_rotation(2, 1.0), (500, 1000, 2000), 3
        )
        for ratio in table.ratios[1:]:
            assert ratio is not None
            assert 3.2 <= ratio <= 4.8


@pytest.mark.integration
class TestCorpus:
    """同梱コーパスでの定理との整合性"""

    def test_no_inconsistency(self, corpus_report: Report) -> None:
        """仮定が成り立つのに非等スペクトルになる比較がないこと"""
        assert len(corpus_report.verdicts) >= 10
        assert corpus_report.failures == ()
        assert corpus_report.inconsistent_pairs == ()
        for verdict in corpus_report.verdicts:
            assert not verdict.theorem_applies or verdict.isospectral

    def test_codim_implies_qcodim(self, corpus_report: Report) -> None:
        """余次元を保つ比較では商余次元の層も保たれること"""
        checked = [v for v in corpus_report.verdicts if v.codim_ok]

        assert checked
        for verdict in checked:
            assert verdict.qcodim_ok, verdict.pair

    @pytest.mark.parametrize(
        "pair",
        [
            "s2~s2_x7",
            "s2~s2_half",
            "table~table_x3",
            "s2~s2_ref",
            "s3~s3_ref",
            "half_sin~half_sin_ref",
            "clifford~clifford_ref",
            "grid~grid_ref",
        ],
    )
    def test_rescale_and_reflection_pairs(self, corpus_report: Report, pair: str) -> None:
        """定数倍と反転の組は固有値ごとに 1e-10 で一致すること"""
        verdict = next(v for v in corpus_report.verdicts if v.pair == pair)
        first, second = verdict.spectra

        assert verdict.theorem_applies
        assert verdict.isospectral
        assert first.extrapolated[0] == pytest.approx(second.extrapolated[0], abs=1e-9)
        assert first.extrapolated[1:] == pytest.approx(second.extrapolated[1:], rel=1e-10)

    def test_hypothesis_failures(self, corpus_report: Report) -> None:
        """平均曲率が一致しない比較は定理の対象外"""
        verdicts = {v.pair: v for v in corpus_report.verdicts}
        for pair in ("s2~orb", "s2~half_sin", "s2~s2_small"):
            assert not verdicts[pair].theorem_applies
            assert not verdicts[pair].isospectral


@pytest.mark.integration
class TestCoveringLift:
    """S^2 の 2 重被覆への持ち上げ"""

    def test_spectrum_matches_base(self) -> None:
        """最初の 5 つの固有値が基底と 0.5% で一致すること"""
        sphere = _FACTORY.sphere_rotation(2, 1.0, "s2")
        lifted = MeanCurvatureService().lift(sphere, 2)

        base = _SOLVER.basic_spectrum(sphere, GRID_SIZE, 5)
        cover = _SOLVER.basic_spectrum(lifted, GRID_SIZE, 5)
        _assert_spectrum(cover.eigenvalues, list(base.eigenvalues))

    def test_mean_curvature_matches(self) -> None:
        """|H̃_*| = |H_* ∘ fold| が 500 点で 1e-9 以内であること"""
        service = MeanCurvatureService()
        sphere = _FACTORY.sphere_rotation(2, 1.0, "s2")
        covering = CoveringDatum.standard(sphere, 2)
        lifted = service.covering_lift(sphere, covering, "s2_lift")
        points = np.concatenate(
            [
                np.linspace(0.01, math.pi - 0.01, 250),
                np.linspace(math.pi + 0.01, 2 * math.pi - 0.01, 250),
            ]
        )

        assert service.covering_deviation(sphere, lifted, covering, points) < 1e-9


@pytest.mark.integration
class TestJacobiFields:
    """ヤコビ場の公式"""

    @pytest.mark.parametrize("kappa", [0.0, 0.25, 1.0, 4.0])
    def test_round_trip(self, kappa: float) -> None:
        """λ → t₀ → λ が 1e-10 で元に戻ること"""
        jacobi = JacobiService()
        for lam in np.geomspace(1e-3, 1e3, 200):
            t0 = jacobi.first_conjugate_time(kappa, float(lam))
            recovered = jacobi.eigenvalue_from_conjugate_time(kappa, t0)
            assert recovered == pytest.approx(float(lam), rel=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(
        kappa=st.one_of(st.just(0.0), st.floats(min_value=0.01, max_value=4.0)),
        lam=st.floats(min_value=-5.0, max_value=5.0, allow_subnormal=False),
    )
    def test_closed_form_matches_integration(self, kappa: float, lam: float) -> None:
        """閉形式の係数が [0, min(t₀, 10)] で数値積分と 1e-8 で一致すること"""
        jacobi = JacobiService()
        end = min(jacobi.first_conjugate_time(kappa, lam), 10.0)
        times = np.linspace(0.0, end, 50)
        expected = [jacobi.jacobi_coefficient(kappa, lam, float(t)) for t in times]
        integrated = jacobi.integrate_coefficient(kappa, lam, times)
        np.testing.assert_allclose(integrated, expected, rtol=0.0, atol=1e-8)

    def test_quarter_period(self) -> None:
        """κ = 1, t₀ = π/2 では λ = 0 ちょうど"""
        assert JacobiService().eigenvalue_from_conjugate_time(1.0, math.pi / 2) == 0.0

    @pytest.mark.parametrize("power", [1, 2, 3])
    def test_trace_identity(self, power: int) -> None:
        """sin^m の重みでは形作用素のトレースが (log w)′ に一致すること"""
        jacobi = JacobiService()
        presentation: FoliationPresentation = _FACTORY.sphere_rotation(power + 1, 1.0)
        rng = np.random.default_rng(20261017)
        for theta in rng.uniform(0.05, math.pi - 0.05, 100):
            spectrum = jacobi.shape_spectrum_from_profile(presentation, float(theta), -1)
            expected = float(presentation.weight.log_derivative(float(theta)))
            assert spectrum.trace == pytest.approx(expected, abs=1e-9)
