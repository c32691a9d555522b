"""ドメインモデルパッケージ

葉層の提示・重み・スペクトル・判定などのデータ構造を定義します。
"""

from leafspec.domain.models.folding import FoldingMap
from leafspec.domain.models.isometry import CheckResult, IsometryDatum, Verdict
from leafspec.domain.models.jacobi import JacobiSolution, ShapeEntry, ShapeSpectrum
from leafspec.domain.models.mean_curvature import (
    ConePresentation,
    CoveringDatum,
    MeanCurvatureField,
)
from leafspec.domain.models.presentation import (
    FoliationPresentation,
    PresentationDescriptor,
    PresentationFamily,
    Stratification,
    Stratum,
    StratumKind,
)
from leafspec.domain.models.scenario import (
    ComparisonSpec,
    MapKind,
    OutputArtifact,
    Report,
    ScenarioDocument,
    SolverSettings,
)
from leafspec.domain.models.spectrum import ConvergenceTable, DiscreteOperator, SpectrumEstimate
from leafspec.domain.models.weight import (
    ConstantWeight,
    PolynomialTableWeight,
    PowerTrigWeight,
    PulledBackWeight,
    ReflectedWeight,
    SampledGridWeight,
    WeightForm,
    WeightProfile,
)

__all__ = [
    "CheckResult",
    "ComparisonSpec",
    "ConePresentation",
    "ConstantWeight",
    "ConvergenceTable",
    "CoveringDatum",
    "DiscreteOperator",
    "FoldingMap",
    "FoliationPresentation",
    "IsometryDatum",
    "JacobiSolution",
    "MapKind",
    "MeanCurvatureField",
    "OutputArtifact",
    "PolynomialTableWeight",
    "PowerTrigWeight",
    "PresentationDescriptor",
    "PresentationFamily",
    "PulledBackWeight",
    "ReflectedWeight",
    "Report",
    "SampledGridWeight",
    "ScenarioDocument",
    "ShapeEntry",
    "ShapeSpectrum",
    "SolverSettings",
    "SpectrumEstimate",
    "Stratification",
    "Stratum",
    "StratumKind",
    "Verdict",
    "WeightForm",
    "WeightProfile",
]
