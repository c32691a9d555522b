"""Leaf-volume weight profiles on an interval leaf space.

商空間 [0, L] 上の葉体積関数 w(θ) を表現するドメインモデル。
- WeightProfile: 共通インターフェース（値・導関数・対数微分・消滅次数）
- ConstantWeight: 定数（消滅点なし）
- PowerTrigWeight: c·sin^a(θ√κ')·cos^b(θ√κ') 型の閉形式
- PolynomialTableWeight: 節点の値と傾きで与える区分 3 次 Hermite 補間
- SampledGridWeight: 等間隔標本の単調保存（PCHIP）補間
- PulledBackWeight: 折り返し写像による引き戻し
- ReflectedWeight: θ ↦ L - θ による反転
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator, PPoly

from leafspec.domain.errors import InconsistentCoverError, InvalidWeightError, OutOfDomainError
from leafspec.domain.models.folding import FoldingMap

type FloatArray = NDArray[np.float64]

# 標本・節点で与える重みの最小点数
MIN_SAMPLE_NODES = 16

# 区間外判定の相対許容誤差（丸め誤差による端点のはみ出しを許す）
DOMAIN_RTOL = 1e-12

# 正値性チェックに用いる内部メッシュの点数
POSITIVITY_MESH_POINTS = 1000

# 閉形式の端点が sin/cos の零点に一致するかの許容誤差
ENDPOINT_MATCH_TOL = 1e-12


class WeightForm(Enum):
    """重み関数の表現形式"""

    CONSTANT = "constant"
    POWER_TRIG = "power_trig"
    POLYNOMIAL_TABLE = "polynomial_table"
    SAMPLED_GRID = "sampled_grid"
    PULLBACK = "pullback"
    REFLECTED = "reflected"


class WeightProfile(ABC):
    """Leaf volume as a function on the quotient interval [0, length].

    葉体積関数の抽象基底クラス。値は内部で正、端点では宣言された
    消滅次数が正のときに限り 0 になります。

    サブクラスは ``_value`` / ``_derivative`` / ``vanishing_orders`` などを
    実装し、``__post_init__`` の最後で ``_validate()`` を呼び出します。
    """

    length: float

    @property
    @abstractmethod
    def form(self) -> WeightForm:
        """表現形式"""

    @property
    @abstractmethod
    def vanishing_orders(self) -> tuple[int, int]:
        """左端・右端での消滅次数（0 は消滅しない）"""

    @property
    @abstractmethod
    def is_closed_form(self) -> bool:
        """解析的な閉形式かどうか"""

    @property
    def interior_zeros(self) -> tuple[tuple[float, int], ...]:
        """内部の零点と消滅次数（引き戻し重みの折り返し点のみ）"""
        return ()

    @abstractmethod
    def _value(self, theta: FloatArray) -> FloatArray: ...

    @abstractmethod
    def _derivative(self, theta: FloatArray) -> FloatArray: ...

    def _log_derivative(self, theta: FloatArray) -> FloatArray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._derivative(theta) / self._value(theta)

    @abstractmethod
    def scaled(self, factor: float) -> "WeightProfile":
        """Return the weight multiplied by a positive constant."""

    def reflected(self) -> "WeightProfile":
        """Return the weight composed with θ ↦ length - θ."""
        return ReflectedWeight(self)

    def _domain(self, theta: ArrayLike) -> FloatArray:
        values = np.asarray(theta, dtype=np.float64)
        slack = DOMAIN_RTOL * self.length
        if (
            not np.all(np.isfinite(values))
            or np.any(values < -slack)
            or np.any(values > self.length + slack)
        ):
            raise OutOfDomainError(f"theta must lie in [0, {self.length}], got {theta}")
        return np.clip(values, 0.0, self.length)

    def value(self, theta: ArrayLike) -> FloatArray:
        """Evaluate w(θ).

        Args:
            theta: 区間 [0, length] 上の位置（スカラーまたは配列）

        Returns:
            葉体積（入力と同じ形状）

        Raises:
            OutOfDomainError: 区間外の位置が含まれる場合
        """
        return self._value(self._domain(theta))

    def derivative(self, theta: ArrayLike) -> FloatArray:
        """Evaluate w'(θ)."""
        return self._derivative(self._domain(theta))

    def log_derivative(self, theta: ArrayLike) -> FloatArray:
        """Evaluate (log w)'(θ); infinite where w vanishes."""
        return self._log_derivative(self._domain(theta))

    def _snap_endpoints(self, theta: FloatArray, result: FloatArray) -> FloatArray:
        """消滅次数が正の端点では補間の丸め誤差を除いて厳密に 0 を返す"""
        left, right = self.vanishing_orders
        if left > 0:
            result = np.where(theta == 0.0, 0.0, result)
        if right > 0:
            result = np.where(theta == self.length, 0.0, result)
        return result

    def singular_points(self) -> tuple[tuple[float, int], ...]:
        """w が消滅する点（端点と内部零点）とその次数を位置順に返す"""
        left, right = self.vanishing_orders
        points = list(self.interior_zeros)
        if left > 0:
            points.append((0.0, left))
        if right > 0:
            points.append((self.length, right))
        return tuple(sorted(points))

    def peak(self) -> float:
        """内部メッシュ上での w の最大値（近特異カットオフの基準）"""
        mesh = np.linspace(0.0, self.length, 2 * POSITIVITY_MESH_POINTS + 1)
        return float(np.max(self._value(mesh)))

    def _validate(self) -> None:
        """共通の不変条件を検証する

        Raises:
            InvalidWeightError: 長さ・正値性・端点の消滅が不整合な場合
        """
        if not (math.isfinite(self.length) and self.length > 0):
            raise InvalidWeightError(f"length must be positive and finite, got {self.length}")

        for side, order in enumerate(self.vanishing_orders):
            if order < 0:
                raise InvalidWeightError(f"vanishing order must be >= 0, got {order}")
            endpoint = np.array([0.0 if side == 0 else self.length])
            endpoint_value = float(self._value(endpoint)[0])
            if order > 0 and endpoint_value != 0.0:
                raise InvalidWeightError(
                    f"weight declared to vanish to order {order} at theta={endpoint[0]} "
                    f"but equals {endpoint_value}"
                )
            if order == 0 and not endpoint_value > 0.0:
                raise InvalidWeightError(
                    f"weight must be positive at regular endpoint theta={endpoint[0]}, "
                    f"got {endpoint_value}"
                )

        mesh = np.linspace(0.0, self.length, POSITIVITY_MESH_POINTS + 2)[1:-1]
        values = self._value(mesh)
        zero_positions = [position for position, _ in self.interior_zeros]
        allowed = np.zeros(mesh.shape, dtype=np.bool_)
        for position in zero_positions:
            allowed |= mesh == position
        bad = (~np.isfinite(values) | (values <= 0.0)) & ~allowed
        if np.any(bad):
            first = float(mesh[np.argmax(bad)])
            raise InvalidWeightError(f"weight must be positive in the interior, fails at {first}")


@dataclass(frozen=True)
class ConstantWeight(WeightProfile):
    """Constant leaf volume (regular foliation with no singular leaves).

    Attributes:
        level: 定数値（正）
        length: 区間長（正）
    """

    level: float
    length: float

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if not (math.isfinite(self.level) and self.level > 0):
            raise InvalidWeightError(f"level must be positive, got {self.level}")
        self._validate()

    @property
    def form(self) -> WeightForm:
        return WeightForm.CONSTANT

    @property
    def vanishing_orders(self) -> tuple[int, int]:
        return (0, 0)

    @property
    def is_closed_form(self) -> bool:
        return True

    def _value(self, theta: FloatArray) -> FloatArray:
        return np.full(theta.shape, self.level, dtype=np.float64)

    def _derivative(self, theta: FloatArray) -> FloatArray:
        return np.zeros(theta.shape, dtype=np.float64)

    def _log_derivative(self, theta: FloatArray) -> FloatArray:
        return np.zeros(theta.shape, dtype=np.float64)

    def scaled(self, factor: float) -> "ConstantWeight":
        _check_factor(factor)
        return replace(self, level=self.level * factor)

    def reflected(self) -> "ConstantWeight":
        return self


@dataclass(frozen=True)
class PowerTrigWeight(WeightProfile):
    """Closed-form weight c·sin^a(θ√κ')·cos^b(θ√κ').

    単位球面 S^n の等径葉層（主曲率が一定）の葉体積はこの形をとります。

    Attributes:
        sin_power: sin の指数 a（0 以上）
        cos_power: cos の指数 b（0 以上）
        scale: 角度スケール κ'（正、曲率 κ の球面なら κ' = κ）
        length: 区間長 L（L√κ' は b = 0 なら π 以下、b > 0 なら π/2 以下）
        coefficient: 正の定数倍 c

    Raises:
        InvalidWeightError: 区間内部で sin/cos が消滅する場合など
    """

    sin_power: int
    cos_power: int
    scale: float
    length: float
    coefficient: float = 1.0

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if self.sin_power < 0 or self.cos_power < 0:
            raise InvalidWeightError(
                f"powers must be >= 0, got sin^{self.sin_power} cos^{self.cos_power}"
            )
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise InvalidWeightError(f"scale must be positive, got {self.scale}")
        if not (math.isfinite(self.coefficient) and self.coefficient > 0):
            raise InvalidWeightError(f"coefficient must be positive, got {self.coefficient}")
        if not (math.isfinite(self.length) and self.length > 0):
            raise InvalidWeightError(f"length must be positive and finite, got {self.length}")

        # cos が内部で消えると正値性が壊れる
        limit = math.pi / 2 if self.cos_power > 0 else math.pi
        if self.angular_length > limit * (1 + ENDPOINT_MATCH_TOL):
            raise InvalidWeightError(
                f"angular length {self.angular_length} exceeds {limit}: "
                "weight would vanish inside the interval"
            )
        self._validate()

    @property
    def sqrt_scale(self) -> float:
        """√κ'"""
        return math.sqrt(self.scale)

    @property
    def angular_length(self) -> float:
        """L√κ'"""
        return self.length * self.sqrt_scale

    @property
    def form(self) -> WeightForm:
        return WeightForm.POWER_TRIG

    @property
    def vanishing_orders(self) -> tuple[int, int]:
        right = 0
        if self.sin_power > 0 and _matches(self.angular_length, math.pi):
            right = self.sin_power
        elif self.cos_power > 0 and _matches(self.angular_length, math.pi / 2):
            right = self.cos_power
        return (self.sin_power, right)

    @property
    def is_closed_form(self) -> bool:
        return True

    def _value(self, theta: FloatArray) -> FloatArray:
        x = theta * self.sqrt_scale
        result = (
            self.coefficient
            * np.power(np.sin(x), self.sin_power)
            * np.power(np.cos(x), self.cos_power)
        )
        # sin(π), cos(π/2) は丸めで 0 にならない
        return self._snap_endpoints(theta, result)

    def _derivative(self, theta: FloatArray) -> FloatArray:
        x = theta * self.sqrt_scale
        sin_x, cos_x = np.sin(x), np.cos(x)
        a, b = self.sin_power, self.cos_power
        first = a * np.power(sin_x, a - 1) * np.power(cos_x, b + 1) if a > 0 else 0.0 * x
        second = b * np.power(sin_x, a + 1) * np.power(cos_x, b - 1) if b > 0 else 0.0 * x
        return self.coefficient * self.sqrt_scale * (first - second)

    def _log_derivative(self, theta: FloatArray) -> FloatArray:
        x = theta * self.sqrt_scale
        with np.errstate(divide="ignore", invalid="ignore"):
            cot_part = self.sin_power / np.tan(x) if self.sin_power > 0 else 0.0 * x
            tan_part = self.cos_power * np.tan(x) if self.cos_power > 0 else 0.0 * x
        return self.sqrt_scale * (cot_part - tan_part)

    def scaled(self, factor: float) -> "PowerTrigWeight":
        _check_factor(factor)
        return replace(self, coefficient=self.coefficient * factor)

    def reflected(self) -> WeightProfile:
        # sin^a on [0, π/√κ'] は中点対称、[0, π/(2√κ')] 上では sin と cos が入れ替わる
        if self.cos_power == 0 and _matches(self.angular_length, math.pi):
            return self
        if _matches(self.angular_length, math.pi / 2):
            return replace(self, sin_power=self.cos_power, cos_power=self.sin_power)
        return ReflectedWeight(self)


@dataclass(frozen=True)
class PolynomialTableWeight(WeightProfile):
    """Piecewise cubic Hermite weight from node values and slopes.

    Attributes:
        nodes: 節点（0 から始まる狭義単調増加、16 点以上）
        values: 節点での値
        slopes: 節点での傾き
        declared_orders: 端点の消滅次数（推定せず宣言する）
    """

    nodes: tuple[float, ...]
    values: tuple[float, ...]
    slopes: tuple[float, ...]
    declared_orders: tuple[int, int] = (0, 0)
    length: float = field(init=False)
    _spline: CubicHermiteSpline = field(init=False, repr=False, compare=False)
    _spline_derivative: PPoly = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        _check_table(self.nodes, "nodes")
        if not (len(self.nodes) == len(self.values) == len(self.slopes)):
            raise InvalidWeightError(
                f"nodes, values and slopes must have equal length, got "
                f"{len(self.nodes)}, {len(self.values)}, {len(self.slopes)}"
            )
        if self.nodes[0] != 0.0:
            raise InvalidWeightError(f"first node must be 0, got {self.nodes[0]}")
        if np.any(np.diff(self.nodes) <= 0):
            raise InvalidWeightError("nodes must be strictly increasing")
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.slopes))):
            raise InvalidWeightError("values and slopes must be finite")
        _check_endpoint_data(self.values, self.declared_orders)

        spline = CubicHermiteSpline(
            np.asarray(self.nodes), np.asarray(self.values), np.asarray(self.slopes)
        )
        object.__setattr__(self, "length", float(self.nodes[-1]))
        object.__setattr__(self, "_spline", spline)
        object.__setattr__(self, "_spline_derivative", spline.derivative())
        self._validate()

    @property
    def form(self) -> WeightForm:
        return WeightForm.POLYNOMIAL_TABLE

    @property
    def vanishing_orders(self) -> tuple[int, int]:
        return self.declared_orders

    @property
    def is_closed_form(self) -> bool:
        return False

    def _value(self, theta: FloatArray) -> FloatArray:
        return self._snap_endpoints(theta, np.asarray(self._spline(theta), dtype=np.float64))

    def _derivative(self, theta: FloatArray) -> FloatArray:
        return np.asarray(self._spline_derivative(theta), dtype=np.float64)

    def scaled(self, factor: float) -> "PolynomialTableWeight":
        _check_factor(factor)
        return PolynomialTableWeight(
            nodes=self.nodes,
            values=tuple(v * factor for v in self.values),
            slopes=tuple(s * factor for s in self.slopes),
            declared_orders=self.declared_orders,
        )


@dataclass(frozen=True)
class SampledGridWeight(WeightProfile):
    """Weight sampled on a uniform grid, interpolated monotonically (PCHIP).

    Attributes:
        values: 等間隔節点 θ_j = j·L/(n-1) での値（16 点以上）
        length: 区間長 L
        declared_orders: 端点の消滅次数（端点の値が 0 ⇔ 次数 > 0）
    """

    values: tuple[float, ...]
    length: float
    declared_orders: tuple[int, int] = (0, 0)
    _interpolant: PchipInterpolator = field(init=False, repr=False, compare=False)
    _interpolant_derivative: PPoly = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        _check_table(self.values, "values")
        if not (math.isfinite(self.length) and self.length > 0):
            raise InvalidWeightError(f"length must be positive and finite, got {self.length}")
        if np.any(np.asarray(self.values[1:-1]) <= 0):
            raise InvalidWeightError("interior samples must be positive")
        _check_endpoint_data(self.values, self.declared_orders)

        interpolant = PchipInterpolator(self.nodes, np.asarray(self.values, dtype=np.float64))
        object.__setattr__(self, "_interpolant", interpolant)
        object.__setattr__(self, "_interpolant_derivative", interpolant.derivative())
        self._validate()

    @property
    def nodes(self) -> FloatArray:
        """等間隔節点"""
        return np.linspace(0.0, self.length, len(self.values))

    @property
    def form(self) -> WeightForm:
        return WeightForm.SAMPLED_GRID

    @property
    def vanishing_orders(self) -> tuple[int, int]:
        return self.declared_orders

    @property
    def is_closed_form(self) -> bool:
        return False

    def _value(self, theta: FloatArray) -> FloatArray:
        return self._snap_endpoints(
            theta, np.asarray(self._interpolant(theta), dtype=np.float64)
        )

    def _derivative(self, theta: FloatArray) -> FloatArray:
        return np.asarray(self._interpolant_derivative(theta), dtype=np.float64)

    def scaled(self, factor: float) -> "SampledGridWeight":
        _check_factor(factor)
        return SampledGridWeight(
            values=tuple(v * factor for v in self.values),
            length=self.length,
            declared_orders=self.declared_orders,
        )


@dataclass(frozen=True)
class PulledBackWeight(WeightProfile):
    """Weight of a covering lift: w̃(θ̃) = w(fold(θ̃)).

    Attributes:
        base: 基底区間上の重み
        fold: 被覆区間から基底区間への折り返し写像
    """

    base: WeightProfile
    fold: FoldingMap
    length: float = field(init=False)

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        if not math.isclose(self.fold.base_length, self.base.length, rel_tol=1e-12):
            raise InconsistentCoverError(
                f"fold base length {self.fold.base_length} does not match weight length "
                f"{self.base.length}"
            )
        if self.base.interior_zeros:
            raise InconsistentCoverError("cannot pull back a weight with interior zeros")
        object.__setattr__(self, "length", self.fold.cover_length)
        self._validate()

    @property
    def form(self) -> WeightForm:
        return WeightForm.PULLBACK

    @property
    def vanishing_orders(self) -> tuple[int, int]:
        left, right = self.base.vanishing_orders
        return (left, left if self.fold.reverses_far_end else right)

    @property
    def interior_zeros(self) -> tuple[tuple[float, int], ...]:
        left, right = self.base.vanishing_orders
        zeros: list[tuple[float, int]] = []
        for j, position in enumerate(self.fold.fold_points, start=1):
            # 奇数番目の折り返し点は基底の右端、偶数番目は左端に写る
            order = right if j % 2 == 1 else left
            if order > 0:
                zeros.append((position, order))
        return tuple(zeros)

    @property
    def is_closed_form(self) -> bool:
        return self.base.is_closed_form

    def _value(self, theta: FloatArray) -> FloatArray:
        return self.base._value(self.fold.apply(theta))  # pyright: ignore[reportPrivateUsage]

    def _derivative(self, theta: FloatArray) -> FloatArray:
        image = self.fold.apply(theta)
        return self.base._derivative(image) * self.fold.slope(theta)  # pyright: ignore[reportPrivateUsage]

    def _log_derivative(self, theta: FloatArray) -> FloatArray:
        image = self.fold.apply(theta)
        return self.base._log_derivative(image) * self.fold.slope(theta)  # pyright: ignore[reportPrivateUsage]

    def scaled(self, factor: float) -> "PulledBackWeight":
        return PulledBackWeight(self.base.scaled(factor), self.fold)


@dataclass(frozen=True)
class ReflectedWeight(WeightProfile):
    """Weight composed with the reversal θ ↦ L - θ."""

    base: WeightProfile
    length: float = field(init=False)

    def __post_init__(self) -> None:
        """インスタンス化後のバリデーション"""
        object.__setattr__(self, "length", self.base.length)
        self._validate()

    @property
    def form(self) -> WeightForm:
        return WeightForm.REFLECTED

    @property
    def vanishing_orders(self) -> tuple[int, int]:
        left, right = self.base.vanishing_orders
        return (right, left)

    @property
    def interior_zeros(self) -> tuple[tuple[float, int], ...]:
        return tuple(sorted((self.length - p, m) for p, m in self.base.interior_zeros))

    @property
    def is_closed_form(self) -> bool:
        return self.base.is_closed_form

    def _value(self, theta: FloatArray) -> FloatArray:
        return self.base._value(self.length - theta)  # pyright: ignore[reportPrivateUsage]

    def _derivative(self, theta: FloatArray) -> FloatArray:
        return -self.base._derivative(self.length - theta)  # pyright: ignore[reportPrivateUsage]

    def _log_derivative(self, theta: FloatArray) -> FloatArray:
        return -self.base._log_derivative(self.length - theta)  # pyright: ignore[reportPrivateUsage]

    def scaled(self, factor: float) -> "ReflectedWeight":
        return ReflectedWeight(self.base.scaled(factor))

    def reflected(self) -> WeightProfile:
        return self.base


def _matches(angle: float, target: float) -> bool:
    return abs(angle - target) <= ENDPOINT_MATCH_TOL * target


def _check_factor(factor: float) -> None:
    if not (math.isfinite(factor) and factor > 0):
        raise InvalidWeightError(f"scale factor must be positive, got {factor}")


def _check_table(entries: tuple[float, ...], name: str) -> None:
    if len(entries) < MIN_SAMPLE_NODES:
        raise InvalidWeightError(
            f"{name} must have at least {MIN_SAMPLE_NODES} entries, got {len(entries)}"
        )


def _check_endpoint_data(values: tuple[float, ...], orders: tuple[int, int]) -> None:
    for side, (value, order) in enumerate(((values[0], orders[0]), (values[-1], orders[1]))):
        if (value == 0.0) != (order > 0):
            raise InvalidWeightError(
                f"endpoint {side} has value {value} but declared vanishing order {order}"
            )
