"""Tests for scenario documents and reports.

シナリオ文書とレポートのドメインモデルのテスト。
"""

import pytest

from leafspec.domain.errors import GridTooCoarseError, UnknownPresentationError
from leafspec.domain.models.presentation import PresentationDescriptor, PresentationFamily
from leafspec.domain.models.scenario import (
    DEFAULT_OUTPUTS,
    ComparisonSpec,
    OutputArtifact,
    ScenarioDocument,
    SolverSettings,
)
from tests.support.builders import make_report, make_verdict


def _sphere(name: str = "s2") -> PresentationDescriptor:
    return PresentationDescriptor(name, PresentationFamily.SPHERE_ROTATION, {"n": 2})


class TestSolverSettings:
    """SolverSettings のテスト"""

    def test_defaults(self) -> None:
        """既定値"""
        settings = SolverSettings()
        assert settings.grid_size == 2000
        assert settings.eigen_count == 5
        assert settings.tol_spec == 1e-2

    def test_coarse_grid_raises(self) -> None:
        """N < 16 は GridTooCoarseError になること"""
        with pytest.raises(GridTooCoarseError):
            SolverSettings(grid_size=8, eigen_count=1)

    @pytest.mark.parametrize("count", [-1, 17])
    def test_eigen_count_range(self, count: int) -> None:
        """k は [0, N/4] に収まること"""
        with pytest.raises(ValueError, match="eigen_count"):
            SolverSettings(grid_size=64, eigen_count=count)

    def test_tolerances_must_be_positive(self) -> None:
        """許容誤差が正でなければエラーになること"""
        with pytest.raises(ValueError, match="tolerances must be positive"):
            SolverSettings(tol_spec=0.0)

    def test_margin_range(self) -> None:
        """除外割合は [0, 0.5) に収まること"""
        with pytest.raises(ValueError, match="hyp_margin"):
            SolverSettings(hyp_margin=0.5)


class TestComparisonSpec:
    """ComparisonSpec のテスト"""

    def test_label(self) -> None:
        """ラベルは source~target"""
        assert ComparisonSpec("s2", "orb").label == "s2~orb"

    def test_invalid_orientation_raises(self) -> None:
        """向きが ±1 以外ならエラーになること"""
        with pytest.raises(ValueError, match="orientation"):
            ComparisonSpec("s2", "orb", orientation=0)


class TestScenarioDocument:
    """ScenarioDocument のテスト"""

    def test_valid_document(self) -> None:
        """正常な文書を作成できること"""
        document = ScenarioDocument(
            presentations=(
                _sphere(),
                PresentationDescriptor("s2_ref", PresentationFamily.REFLECTION, source="s2"),
            ),
            comparisons=(ComparisonSpec("s2", "s2_ref", orientation=-1),),
        )

        assert document.names == ("s2", "s2_ref")
        assert document.descriptor("s2_ref").source == "s2"
        assert document.outputs == DEFAULT_OUTPUTS
        assert OutputArtifact.CONVERGENCE not in document.outputs

    def test_duplicate_name_raises(self) -> None:
        """同じ名前の二重宣言はエラーになること"""
        with pytest.raises(ValueError, match="declared twice"):
            ScenarioDocument(presentations=(_sphere(), _sphere()))

    def test_forward_reference_raises(self) -> None:
        """未宣言の提示から派生するとエラーになること"""
        with pytest.raises(UnknownPresentationError, match="undeclared 's2'"):
            ScenarioDocument(
                presentations=(
                    PresentationDescriptor("s2_ref", PresentationFamily.REFLECTION, source="s2"),
                    _sphere(),
                )
            )

    def test_comparison_with_unknown_name_raises(self) -> None:
        """比較が未宣言の提示を参照するとエラーになること"""
        with pytest.raises(UnknownPresentationError, match="'orb'"):
            ScenarioDocument(presentations=(_sphere(),), comparisons=(ComparisonSpec("s2", "orb"),))

    def test_descriptor_lookup_failure(self) -> None:
        """存在しない名前の参照はエラーになること"""
        document = ScenarioDocument(presentations=(_sphere(),))
        with pytest.raises(UnknownPresentationError, match="known: s2"):
            document.descriptor("s3")


class TestReport:
    """Report のテスト"""

    def test_inconsistent_pairs(self) -> None:
        """矛盾した判定のラベルのみを返すこと"""
        report = make_report(
            verdicts=[
                make_verdict("ok~ok", theorem_applies=False),
                make_verdict("bad~bad", theorem_applies=True, isospectral=False),
            ]
        )
        assert report.inconsistent_pairs == ("bad~bad",)

    def test_empty_report(self) -> None:
        """空のレポートには矛盾がないこと"""
        assert make_report().inconsistent_pairs == ()
