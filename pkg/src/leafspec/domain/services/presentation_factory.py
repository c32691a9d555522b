"""Construction of foliation presentations and their stratifications.

シナリオの記述子や族のパラメータから FoliationPresentation を組み立てる
ドメインサービス。反転・定数倍・別名・被覆の持ち上げといった派生提示もここで作ります。
"""

import logging
import math
from collections.abc import Iterable, Mapping
from typing import Any

import numpy as np

from leafspec.domain.errors import (
    InvalidWeightError,
    UnknownFamilyError,
    UnknownPresentationError,
)
from leafspec.domain.models.presentation import (
    FoliationPresentation,
    PresentationDescriptor,
    PresentationFamily,
    Stratification,
    Stratum,
    StratumKind,
)
from leafspec.domain.models.weight import ConstantWeight, PowerTrigWeight, WeightProfile
from leafspec.domain.services.mean_curvature_service import MeanCurvatureService

logger = logging.getLogger(__name__)


class PresentationFactory:
    """Build presentations from families and derive new ones from existing ones.

    基本族:
    - sphere_rotation(n, r): 半径 r の S^n に SO(n) が作用する葉層（w = sin^{n-1}(θ/r)）
    - orbifold_interval(L): オービフォールド [0, L]（w ≡ 1、両端は例外点）
    - custom: 任意の曲率・重み・次元

    派生族: reflection / rescale / relabel / covering_lift
    """

    def __init__(self, mean_curvature_service: MeanCurvatureService | None = None) -> None:
        """Initialize the factory.

        Args:
            mean_curvature_service: 被覆の持ち上げに使うサービス
        """
        self._mean_curvature_service = mean_curvature_service or MeanCurvatureService()

    def sphere_rotation(self, n: int, r: float, name: str | None = None) -> FoliationPresentation:
        """Rotation foliation of the round n-sphere of radius r.

        Args:
            n: 球面の次元（2 以上）
            r: 半径（正）
            name: 名前（省略時は "sphere(n,r)"）

        Returns:
            κ = 1/r²、w = sin^{n-1}(θ/r) on [0, πr] の提示

        Raises:
            ValueError: n < 2 または r <= 0 の場合
        """
        if n < 2:
            raise ValueError(f"sphere dimension must be >= 2, got {n}")
        if not (math.isfinite(r) and r > 0):
            raise ValueError(f"radius must be positive, got {r}")

        kappa = 1.0 / r**2
        weight = PowerTrigWeight(sin_power=n - 1, cos_power=0, scale=kappa, length=math.pi * r)
        return FoliationPresentation(
            name=name or f"sphere({n},{r:g})",
            kappa=kappa,
            weight=weight,
            regular_leaf_dim=n - 1,
            endpoint_leaf_dims=(0, 0),
        )

    def orbifold_interval(
        self, length: float, regular_leaf_dim: int = 0, name: str | None = None
    ) -> FoliationPresentation:
        """Regular (orbifold) foliation whose leaf space is [0, length].

        w ≡ 1 で平均曲率は 0、両端点は次元の落ちない例外点です。
        """
        weight = ConstantWeight(level=1.0, length=length)
        return FoliationPresentation(
            name=name or f"orbifold({length:g})",
            kappa=0.0,
            weight=weight,
            regular_leaf_dim=regular_leaf_dim,
            endpoint_leaf_dims=(regular_leaf_dim, regular_leaf_dim),
            exceptional_endpoints=(True, True),
        )

    def custom(
        self,
        name: str,
        kappa: float,
        weight: WeightProfile,
        regular_leaf_dim: int,
        endpoint_leaf_dims: tuple[int, int],
        cover_order: int = 1,
        exceptional_endpoints: tuple[bool, bool] = (False, False),
    ) -> FoliationPresentation:
        """任意のデータから提示を作る（検証は FoliationPresentation が行う）"""
        return FoliationPresentation(
            name=name,
            kappa=kappa,
            weight=weight,
            regular_leaf_dim=regular_leaf_dim,
            endpoint_leaf_dims=endpoint_leaf_dims,
            cover_order=cover_order,
            exceptional_endpoints=exceptional_endpoints,
        )

    def reflect(
        self, presentation: FoliationPresentation, name: str | None = None
    ) -> FoliationPresentation:
        """Pull a presentation back through θ ↦ L - θ."""
        left, right = presentation.endpoint_leaf_dims
        first, second = presentation.exceptional_endpoints
        return FoliationPresentation(
            name=name or f"{presentation.name}.reflected",
            kappa=presentation.kappa,
            weight=presentation.weight.reflected(),
            regular_leaf_dim=presentation.regular_leaf_dim,
            endpoint_leaf_dims=(right, left),
            cover_order=presentation.cover_order,
            exceptional_endpoints=(second, first),
        )

    def rescale(
        self, presentation: FoliationPresentation, factor: float, name: str | None = None
    ) -> FoliationPresentation:
        """Multiply the leaf volume by a positive constant."""
        return self._copy(
            presentation,
            name=name or f"{presentation.name}.x{factor:g}",
            weight=presentation.weight.scaled(factor),
        )

    def relabel(self, presentation: FoliationPresentation, name: str) -> FoliationPresentation:
        """Same foliation under another name (orbit-equivalent actions).

        作用とその有効化 G/∩G_x は同じ軌道をもつので、提示は名前以外一致します。
        """
        return self._copy(presentation, name=name, weight=presentation.weight)

    def make_presentation(
        self,
        descriptor: PresentationDescriptor,
        resolved: Mapping[str, FoliationPresentation] | None = None,
    ) -> FoliationPresentation:
        """Build one presentation from its descriptor.

        Args:
            descriptor: 記述子
            resolved: 派生族が参照する構築済みの提示

        Returns:
            構築した提示

        Raises:
            UnknownFamilyError: 族に対応する構築手順がない場合
            UnknownPresentationError: 派生元が未構築の場合
            ValueError: パラメータが不正な場合
        """
        params = descriptor.parameters
        family = descriptor.family
        logger.debug("Building presentation %s (%s)", descriptor.name, family.value)

        match family:
            case PresentationFamily.SPHERE_ROTATION:
                return self.sphere_rotation(
                    int(_require(params, "n")), float(_require(params, "r")), descriptor.name
                )
            case PresentationFamily.ORBIFOLD_INTERVAL:
                return self.orbifold_interval(
                    float(_require(params, "length")),
                    int(params.get("regular_leaf_dim", 0)),
                    descriptor.name,
                )
            case PresentationFamily.CUSTOM:
                weight = _require(params, "weight")
                if not isinstance(weight, WeightProfile):
                    raise InvalidWeightError(
                        f"custom presentation {descriptor.name} needs a WeightProfile"
                    )
                dims = tuple(_require(params, "endpoint_leaf_dims"))
                flags = tuple(params.get("exceptional_endpoints", (False, False)))
                return self.custom(
                    name=descriptor.name,
                    kappa=float(_require(params, "kappa")),
                    weight=weight,
                    regular_leaf_dim=int(_require(params, "regular_leaf_dim")),
                    endpoint_leaf_dims=(int(dims[0]), int(dims[1])),
                    cover_order=int(params.get("cover_order", 1)),
                    exceptional_endpoints=(bool(flags[0]), bool(flags[1])),
                )
            case _:
                pass

        source = self._resolve_source(descriptor, resolved or {})
        match family:
            case PresentationFamily.REFLECTION:
                return self.reflect(source, descriptor.name)
            case PresentationFamily.RESCALE:
                return self.rescale(source, float(_require(params, "factor")), descriptor.name)
            case PresentationFamily.RELABEL:
                return self.relabel(source, descriptor.name)
            case PresentationFamily.COVERING_LIFT:
                return self._mean_curvature_service.lift(
                    source, int(_require(params, "deck_order")), descriptor.name
                )
            case _:
                raise UnknownFamilyError(f"unknown presentation family: {family}")

    def make_catalog(
        self, descriptors: Iterable[PresentationDescriptor]
    ) -> dict[str, FoliationPresentation]:
        """Build every presentation in declaration order.

        派生族は先に宣言された提示のみを参照できます。
        """
        catalog: dict[str, FoliationPresentation] = {}
        for descriptor in descriptors:
            try:
                catalog[descriptor.name] = self.make_presentation(descriptor, catalog)
            except ValueError as e:
                logger.error("Failed to build presentation '%s': %s", descriptor.name, e)
                raise
        logger.info("Built %d presentations", len(catalog))
        return catalog

    def stratify(self, presentation: FoliationPresentation) -> Stratification:
        """Decompose the leaf space into strata.

        正則層（内部、商余次元 0）に加えて、次元の落ちる端点・例外端点・
        内部零点（被覆の折り返し点）を商余次元 1 の点の層として返します。
        """
        length = presentation.length
        regular_dim = presentation.regular_leaf_dim
        strata = [Stratum(StratumKind.REGULAR, 0.0, length, regular_dim, 0)]

        for side, position in enumerate((0.0, length)):
            dim = presentation.endpoint_leaf_dims[side]
            if dim < regular_dim or presentation.exceptional_endpoints[side]:
                strata.append(Stratum(StratumKind.ENDPOINT, position, position, dim, 1))

        for position, order in presentation.weight.interior_zeros:
            strata.append(
                Stratum(StratumKind.INTERIOR_POINT, position, position, regular_dim - order, 1)
            )

        strata.sort(key=lambda s: (s.start, s.kind != StratumKind.REGULAR))
        return Stratification(length=length, strata=tuple(strata))

    def leaf_volume(self, presentation: FoliationPresentation, theta: float) -> float:
        """Evaluate w(θ).

        Raises:
            OutOfDomainError: θ が [0, L] の外にある場合
        """
        return float(presentation.weight.value(theta))

    @staticmethod
    def fitted_vanishing_order(
        weight: WeightProfile,
        endpoint: int,
        distances: tuple[float, float] = (1e-6, 1e-5),
    ) -> float:
        """Estimate the vanishing order at an endpoint from a log-log slope.

        w(δ) ~ C δ^m なので、2 点の log w と log δ の傾きが m の近似になります。

        Args:
            weight: 重み
            endpoint: 0（左端）または 1（右端）
            distances: 端点からの距離（区間長に対する比）

        Returns:
            推定された消滅次数（正則な端点では 0 に近い値）
        """
        if endpoint not in (0, 1):
            raise ValueError(f"endpoint must be 0 or 1, got {endpoint}")
        offsets = np.asarray(distances, dtype=np.float64) * weight.length
        points = offsets if endpoint == 0 else weight.length - offsets
        values = weight.value(points)
        slope = np.diff(np.log(values)) / np.diff(np.log(offsets))
        return float(slope[0])

    @staticmethod
    def _resolve_source(
        descriptor: PresentationDescriptor, resolved: Mapping[str, FoliationPresentation]
    ) -> FoliationPresentation:
        if descriptor.source is None or descriptor.source not in resolved:
            raise UnknownPresentationError(
                f"presentation '{descriptor.name}' derives from unknown '{descriptor.source}'"
            )
        return resolved[descriptor.source]

    @staticmethod
    def _copy(
        presentation: FoliationPresentation, name: str, weight: WeightProfile
    ) -> FoliationPresentation:
        return FoliationPresentation(
            name=name,
            kappa=presentation.kappa,
            weight=weight,
            regular_leaf_dim=presentation.regular_leaf_dim,
            endpoint_leaf_dims=presentation.endpoint_leaf_dims,
            cover_order=presentation.cover_order,
            exceptional_endpoints=presentation.exceptional_endpoints,
        )


def _require(params: Mapping[str, Any], key: str) -> Any:
    if key not in params:
        raise ValueError(f"missing required parameter: {key}")
    return params[key]
