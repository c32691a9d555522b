"""Jacobi fields, conjugate times and shape-operator spectra on space forms.

定曲率 κ ≥ 0 の空間形における葉層ヤコビ場
f'' + κf = 0, f(0) = 1, f'(0) = -λ を扱うドメインサービス。
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp
from scipy.optimize import bisect

from leafspec.domain.errors import (
    DimensionOrderError,
    NegativeCurvatureError,
    OutOfDomainError,
    OutOfRangeError,
    UnsupportedProfileError,
)
from leafspec.domain.models.jacobi import JacobiSolution, ShapeEntry, ShapeSpectrum
from leafspec.domain.models.presentation import FoliationPresentation
from leafspec.domain.models.weight import ConstantWeight, PowerTrigWeight

logger = logging.getLogger(__name__)

type FloatArray = NDArray[np.float64]


class JacobiService:
    """Closed-form and integrated Jacobi coefficients, conjugate times, shape spectra."""

    # 共役時刻の二分法の絶対許容誤差
    CONJUGATE_TIME_XTOL = 1e-13

    # κ = 0 かつ t₀ = ∞ のときに残差を評価する区間
    UNBOUNDED_SPAN = 10.0

    def jacobi_coefficient(self, kappa: float, lam: float, t: float) -> float:
        """Closed-form f(t).

        Raises:
            NegativeCurvatureError: κ < 0 の場合
            ValueError: t < 0 の場合
        """
        _check_kappa(kappa)
        if t < 0:
            raise ValueError(f"t must be >= 0, got {t}")
        return self._solution(kappa, lam, math.inf).coefficient(t)

    def integrate_coefficient(self, kappa: float, lam: float, times: FloatArray) -> FloatArray:
        """Integrate f'' + κf = 0 numerically (RK45) for cross-checking.

        Args:
            kappa: 曲率
            lam: 形作用素の固有値 λ
            times: 評価時刻（昇順、0 以上）

        Returns:
            各時刻での f の数値解
        """
        _check_kappa(kappa)
        times = np.asarray(times, dtype=np.float64)
        if times.size == 0:
            return np.empty(0)
        if np.any(times < 0) or np.any(np.diff(times) < 0):
            raise ValueError("times must be non-negative and ascending")

        def rhs(_: float, state: FloatArray) -> FloatArray:
            return np.array([state[1], -kappa * state[0]])

        end = float(times[-1])
        if end == 0.0:
            return np.ones_like(times)
        result = solve_ivp(
            rhs,
            (0.0, end),
            np.array([1.0, -lam]),
            method="RK45",
            t_eval=times,
            rtol=1e-12,
            atol=1e-14,
        )
        if not result.success:
            raise RuntimeError(f"Jacobi integration failed: {result.message}")
        return np.asarray(result.y[0], dtype=np.float64)

    def first_conjugate_time(self, kappa: float, lam: float) -> float:
        """Smallest positive zero t₀ of f (math.inf if none).

        κ > 0 のときは (0, π/√κ) 上の二分法の後、Newton 法で 1 回仕上げます。
        """
        _check_kappa(kappa)
        if kappa == 0:
            return 1.0 / lam if lam > 0 else math.inf

        root = math.sqrt(kappa)
        solution = self._solution(kappa, lam, math.inf)
        upper = math.pi / root
        t0 = float(bisect(solution.coefficient, 0.0, upper, xtol=self.CONJUGATE_TIME_XTOL))
        slope = solution.derivative(t0)
        if slope != 0.0:
            polished = t0 - solution.coefficient(t0) / slope
            if 0.0 < polished < upper:
                t0 = polished
        logger.debug("first conjugate time (kappa=%g, lambda=%g) = %.15g", kappa, lam, t0)
        return t0

    def eigenvalue_from_conjugate_time(self, kappa: float, t0: float) -> float:
        """Recover λ from the first conjugate time.

        κ = 0 なら λ = 1/t₀、κ > 0 なら λ = √κ/tan(t₀√κ)。

        Raises:
            OutOfRangeError: t₀ <= 0、または κ > 0 で t₀ >= π/√κ の場合
        """
        _check_kappa(kappa)
        if not t0 > 0:
            raise OutOfRangeError(f"conjugate time must be positive, got {t0}")
        if kappa == 0:
            return 0.0 if math.isinf(t0) else 1.0 / t0

        root = math.sqrt(kappa)
        if t0 >= math.pi / root:
            raise OutOfRangeError(
                f"conjugate time {t0} >= pi/sqrt(kappa) = {math.pi / root}: no such eigenvalue"
            )
        # cot(x) = tan(π/2 - x)（x = π/2 で厳密に 0）
        return root * math.tan(math.pi / 2 - t0 * root)

    def jacobi_solution(self, kappa: float, lam: float) -> JacobiSolution:
        """JacobiSolution with its first conjugate time."""
        return self._solution(kappa, lam, self.first_conjugate_time(kappa, lam))

    def singular_kernel_dimension(self, regular_leaf_dim: int, singular_leaf_dim: int) -> int:
        """Multiplicity of the collapse eigenvalue: regular - singular leaf dimension.

        Raises:
            DimensionOrderError: singular > regular の場合
        """
        if regular_leaf_dim < 0 or singular_leaf_dim < 0:
            raise ValueError(
                f"leaf dimensions must be >= 0, got ({regular_leaf_dim}, {singular_leaf_dim})"
            )
        if singular_leaf_dim > regular_leaf_dim:
            raise DimensionOrderError(
                f"singular leaf dimension {singular_leaf_dim} exceeds regular "
                f"{regular_leaf_dim}"
            )
        return regular_leaf_dim - singular_leaf_dim

    def shape_spectrum_from_profile(
        self, presentation: FoliationPresentation, theta: float, direction: int
    ) -> ShapeSpectrum:
        """Shape-operator eigenvalues of the regular leaf through θ.

        w = c·sin^a(θ√κ')·cos^b(θ√κ') に対して、θ = 0 への崩壊から
        √κ'·cot(θ√κ')（重複度 a）、遠い端点への崩壊から -√κ'·tan(θ√κ')（重複度 b）
        が現れ、残りの重複度は固有値 0 です。direction = +1 のとき全体の符号が反転し、
        トレースは direction·H_*(θ) になります。

        Raises:
            UnsupportedProfileError: 閉形式の積型でない重みの場合
            OutOfDomainError: θ が内部の点でない場合
        """
        if direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {direction}")
        weight = presentation.weight
        if not (0.0 < theta < presentation.length):
            raise OutOfDomainError(
                f"theta must be interior to (0, {presentation.length}), got {theta}"
            )

        regular = presentation.regular_leaf_dim
        entries: list[ShapeEntry] = []
        if isinstance(weight, ConstantWeight):
            used = 0
        elif isinstance(weight, PowerTrigWeight):
            a, b = weight.sin_power, weight.cos_power
            if a + b > regular:
                raise UnsupportedProfileError(
                    f"powers sin^{a} cos^{b} exceed regular leaf dimension {regular}"
                )
            x = theta * weight.sqrt_scale
            sign = -float(direction)
            if a > 0:
                entries.append(ShapeEntry(sign * weight.sqrt_scale / math.tan(x), a))
            if b > 0:
                entries.append(ShapeEntry(-sign * weight.sqrt_scale * math.tan(x), b))
            used = a + b
        else:
            raise UnsupportedProfileError(
                f"shape spectrum needs a constant or power-trig weight, got {weight.form.value}"
            )

        if regular - used > 0:
            entries.append(ShapeEntry(0.0, regular - used))
        entries.sort(key=lambda entry: entry.eigenvalue)
        return ShapeSpectrum(at_point=theta, direction=direction, entries=tuple(entries))

    def projectable_residual(self, kappa: float, lam: float, sample_count: int = 100) -> float:
        """max |f'(t) + λ_t f(t)| with λ_t the transported shape eigenvalue.

        λ_t = eigenvalue_from_conjugate_time(κ, t₀ - t) は測地線に沿って運ばれた
        形作用素の固有値です。t₀ が有限なら [0, 0.9·t₀]、無限なら [0, 10] で評価します。
        """
        _check_kappa(kappa)
        if sample_count < 1:
            raise ValueError(f"sample_count must be >= 1, got {sample_count}")
        solution = self.jacobi_solution(kappa, lam)
        t0 = solution.first_zero

        if math.isfinite(t0):
            times = np.linspace(0.0, 0.9 * t0, sample_count)
            transported = [self.eigenvalue_from_conjugate_time(kappa, t0 - t) for t in times]
        else:
            # κ = 0, λ <= 0: λ_t = λ/(1 - λt)
            times = np.linspace(0.0, self.UNBOUNDED_SPAN, sample_count)
            transported = [lam / (1.0 - lam * t) for t in times]

        residuals = [
            abs(solution.derivative(t) + lam_t * solution.coefficient(t))
            for t, lam_t in zip(times, transported, strict=True)
        ]
        return float(max(residuals))

    @staticmethod
    def _solution(kappa: float, lam: float, first_zero: float) -> JacobiSolution:
        return JacobiSolution(kappa=kappa, shape_eigenvalue=lam, first_zero=first_zero)


def _check_kappa(kappa: float) -> None:
    if kappa < 0:
        raise NegativeCurvatureError(f"kappa must be >= 0, got {kappa}")
