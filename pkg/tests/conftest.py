"""Shared fixtures for leafspec tests.

ドメインサービスと代表的な提示（球面・オービフォールド）を共有します。
"""

import math

import pytest

from leafspec.domain.models.presentation import FoliationPresentation
from leafspec.domain.models.weight import PowerTrigWeight
from leafspec.domain.services.isometry_checker import IsometryChecker
from leafspec.domain.services.jacobi_service import JacobiService
from leafspec.domain.services.mean_curvature_service import MeanCurvatureService
from leafspec.domain.services.presentation_factory import PresentationFactory
from leafspec.domain.services.sturm_solver import SturmSolver


@pytest.fixture
def factory() -> PresentationFactory:
    """提示ファクトリ"""
    return PresentationFactory()


@pytest.fixture
def solver() -> SturmSolver:
    """スペクトルソルバ"""
    return SturmSolver()


@pytest.fixture
def mean_curvature_service() -> MeanCurvatureService:
    """平均曲率サービス"""
    return MeanCurvatureService()


@pytest.fixture
def jacobi_service() -> JacobiService:
    """ヤコビ場サービス"""
    return JacobiService()


@pytest.fixture
def checker(solver: SturmSolver, factory: PresentationFactory) -> IsometryChecker:
    """仮定チェック（並列数 1）"""
    return IsometryChecker(solver=solver, factory=factory, max_workers=1)


@pytest.fixture
def sphere2(factory: PresentationFactory) -> FoliationPresentation:
    """S^2 の回転葉層（w = sin θ on [0, π]）"""
    return factory.sphere_rotation(2, 1.0, "s2")


@pytest.fixture
def sphere3(factory: PresentationFactory) -> FoliationPresentation:
    """S^3 の回転葉層（w = sin² θ on [0, π]）"""
    return factory.sphere_rotation(3, 1.0, "s3")


@pytest.fixture
def orbifold(factory: PresentationFactory) -> FoliationPresentation:
    """オービフォールド [0, π]"""
    return factory.orbifold_interval(math.pi, name="orb")


@pytest.fixture
def half_sin(factory: PresentationFactory) -> FoliationPresentation:
    """w = sin(θ/2) on [0, π]（左端のみで葉が潰れる）"""
    return factory.custom(
        name="half_sin",
        kappa=0.25,
        weight=PowerTrigWeight(sin_power=1, cos_power=0, scale=0.25, length=math.pi),
        regular_leaf_dim=1,
        endpoint_leaf_dims=(0, 1),
    )
