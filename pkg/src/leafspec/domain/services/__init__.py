"""ドメインサービス"""

from leafspec.domain.services.isometry_checker import IsometryChecker
from leafspec.domain.services.jacobi_service import JacobiService
from leafspec.domain.services.mean_curvature_service import MeanCurvatureService
from leafspec.domain.services.presentation_factory import PresentationFactory
from leafspec.domain.services.sturm_solver import SturmSolver

__all__ = [
    "IsometryChecker",
    "JacobiService",
    "MeanCurvatureService",
    "PresentationFactory",
    "SturmSolver",
]
