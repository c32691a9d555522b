"""Mean curvature of leaves, cone extensions and covering lifts.

葉の平均曲率 H_* = -(log w)' を扱うドメインサービス。
- 極小性の判定
- 球面上の葉層の錐への延長
- 有限被覆への持ち上げ（H_* は折り返し写像で保存される）
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray

from leafspec.domain.errors import InconsistentCoverError, NotASphereError
from leafspec.domain.models.mean_curvature import (
    ConePresentation,
    CoveringDatum,
    MeanCurvatureField,
)
from leafspec.domain.models.presentation import FoliationPresentation
from leafspec.domain.models.weight import PowerTrigWeight, PulledBackWeight

logger = logging.getLogger(__name__)

# 被覆の基底の同一性を確かめる内部標本点の数
BASE_SAMPLES = 33

type FloatArray = NDArray[np.float64]


class MeanCurvatureService:
    """Compute and transport the basic mean-curvature field."""

    # 極小性判定に使う内部メッシュの点数
    MINIMALITY_MESH_POINTS = 1000

    def mean_curvature(self, presentation: FoliationPresentation) -> MeanCurvatureField:
        """Return the field θ ↦ H_*(θ) = -(log w)'(θ)."""
        return MeanCurvatureField(presentation)

    def is_minimal(self, presentation: FoliationPresentation, tol: float = 1e-10) -> bool:
        """True iff sup |H_*| over an interior mesh is at most tol.

        メッシュ上で w が消える点（内部零点）は除外します。
        """
        mesh = np.linspace(0.0, presentation.length, self.MINIMALITY_MESH_POINTS + 2)[1:-1]
        mesh = mesh[presentation.weight.value(mesh) > 0.0]
        field = self.mean_curvature(presentation)
        deviation = float(np.max(np.abs(field(mesh))))
        logger.debug("sup |H| of %s = %.3e", presentation.name, deviation)
        return deviation <= tol

    def cone_extension(self, presentation: FoliationPresentation) -> ConePresentation:
        """Extend a foliation of the round sphere radially to the cone.

        Raises:
            NotASphereError: κ <= 0、または重みが sin/cos の閉形式でない場合
        """
        if presentation.kappa <= 0:
            raise NotASphereError(
                f"cone extension needs a round sphere (kappa > 0), got kappa={presentation.kappa}"
            )
        if not isinstance(presentation.weight, PowerTrigWeight):
            raise NotASphereError(
                f"cone extension needs a closed-form sphere weight, got "
                f"{presentation.weight.form.value}"
            )
        return ConePresentation(source=presentation, radius=1.0 / math.sqrt(presentation.kappa))

    def covering_lift(
        self,
        presentation: FoliationPresentation,
        covering: CoveringDatum,
        name: str | None = None,
    ) -> FoliationPresentation:
        """Lift a presentation to an m-fold cover of its leaf space.

        被覆側の重みは w̃ = w ∘ fold で、H̃_* = slope · H_* ∘ fold となります。

        Raises:
            InconsistentCoverError: 被覆データの基底が presentation と一致しない場合
        """
        if covering.base is not presentation and not _same_leaf_space(covering.base, presentation):
            raise InconsistentCoverError(
                f"covering base {covering.base.name} does not match {presentation.name}"
            )
        if covering.deck_order == 1:
            return presentation

        fold = covering.folding_map
        weight = PulledBackWeight(presentation.weight, fold)
        left_dim, right_dim = presentation.endpoint_leaf_dims
        left_flag, right_flag = presentation.exceptional_endpoints
        far_dim, far_flag = (
            (left_dim, left_flag) if fold.reverses_far_end else (right_dim, right_flag)
        )
        lifted = FoliationPresentation(
            name=name or f"{presentation.name}~{covering.deck_order}",
            kappa=presentation.kappa,
            weight=weight,
            regular_leaf_dim=presentation.regular_leaf_dim,
            endpoint_leaf_dims=(left_dim, far_dim),
            cover_order=presentation.cover_order * covering.deck_order,
            exceptional_endpoints=(left_flag, far_flag),
        )
        logger.debug(
            "Lifted %s to %d-fold cover of length %.6g",
            presentation.name,
            covering.deck_order,
            lifted.length,
        )
        return lifted

    def lift(
        self, presentation: FoliationPresentation, deck_order: int, name: str | None = None
    ) -> FoliationPresentation:
        """標準の折り返し点で m 重被覆に持ち上げる"""
        return self.covering_lift(
            presentation, CoveringDatum.standard(presentation, deck_order), name
        )

    def covering_deviation(
        self,
        base: FoliationPresentation,
        cover: FoliationPresentation,
        covering: CoveringDatum,
        points: FloatArray,
    ) -> float:
        """max | |H̃_*(θ̃)| - |H_*(fold(θ̃))| | over the given cover points.

        折り返し点（w が消える内部点）は呼び出し側で除外してください。
        """
        cover_field = self.mean_curvature(cover)
        base_field = self.mean_curvature(base)
        images = covering.folding_map.apply(points)
        return float(np.max(np.abs(np.abs(cover_field(points)) - np.abs(base_field(images)))))


def _same_leaf_space(first: FoliationPresentation, second: FoliationPresentation) -> bool:
    """長さ・葉の次元・内部標本点での重みが一致するか"""
    if not math.isclose(first.length, second.length, rel_tol=1e-12):
        return False
    if (
        first.regular_leaf_dim != second.regular_leaf_dim
        or first.endpoint_leaf_dims != second.endpoint_leaf_dims
        or first.exceptional_endpoints != second.exceptional_endpoints
    ):
        return False
    theta = np.linspace(0.0, first.length, BASE_SAMPLES + 2)[1:-1]
    return bool(
        np.allclose(first.weight.value(theta), second.weight.value(theta), rtol=1e-12, atol=0.0)
    )
