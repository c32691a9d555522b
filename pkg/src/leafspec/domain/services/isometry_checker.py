"""Hypothesis checks and isospectrality verdicts for pairs of presentations.

商空間の等長写像の候補について、
- 計量（区間長）の一致
- 葉の余次元の保存
- 商余次元の層の保存
- 平均曲率 H_* の一致（dφ(H₁) = H₂）
- 形作用素スペクトルの一致（閉形式の重みのみ）
を検査し、基本スペクトルの比較と合わせて判定を下すドメインサービス。
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.typing import NDArray

from leafspec.domain.errors import InconsistentTheoremError, UnsupportedProfileError
from leafspec.domain.models.folding import FoldingMap
from leafspec.domain.models.isometry import CheckResult, IsometryDatum, Verdict
from leafspec.domain.models.mean_curvature import MeanCurvatureField
from leafspec.domain.models.presentation import FoliationPresentation
from leafspec.domain.models.spectrum import SpectrumEstimate
from leafspec.domain.services.jacobi_service import JacobiService
from leafspec.domain.services.mean_curvature_service import MeanCurvatureService
from leafspec.domain.services.presentation_factory import PresentationFactory
from leafspec.domain.services.sturm_solver import SturmSolver

logger = logging.getLogger(__name__)

type FloatArray = NDArray[np.float64]


class IsometryChecker:
    """Check the hypotheses of the isospectrality theorem for one isometry datum."""

    # 平均曲率を比較する内部メッシュの点数
    MESH_POINTS = 1000

    # 区間長の一致判定の相対許容誤差
    LENGTH_RTOL = 1e-12

    # 層の位置の一致判定（区間長に対する比）
    POSITION_RTOL = 1e-9

    # 零モードの相対ギャップの分母の下限
    ZERO_FLOOR = 1e-6

    def __init__(
        self,
        solver: SturmSolver | None = None,
        mean_curvature_service: MeanCurvatureService | None = None,
        factory: PresentationFactory | None = None,
        jacobi_service: JacobiService | None = None,
        max_workers: int = 4,
    ) -> None:
        """Initialize the checker.

        Args:
            solver: 基本スペクトルの計算に使うソルバ
            mean_curvature_service: 平均曲率サービス
            factory: 層の分解に使うファクトリ
            jacobi_service: 形作用素スペクトルの計算に使うサービス
            max_workers: verdict 内で並列に走らせるジョブ数の上限
        """
        self.solver = solver or SturmSolver()
        self.mean_curvature_service = mean_curvature_service or MeanCurvatureService()
        self.factory = factory or PresentationFactory(self.mean_curvature_service)
        self.jacobi_service = jacobi_service or JacobiService()
        self.max_workers = max(1, max_workers)

    def check_metric(self, iso: IsometryDatum) -> CheckResult:
        """Interval lengths match (L₂ = m·L₁ for a covering) and the map is onto."""
        source_length = iso.source.length
        target_length = iso.target.length
        tolerance = self.LENGTH_RTOL * max(1.0, target_length)

        if iso.covering is not None:
            expected = iso.covering.folding_map.cover_length
            deviation = abs(target_length - expected)
            return CheckResult(
                passed=deviation <= tolerance,
                detail=(
                    f"cover length {target_length:.12g} vs {iso.covering.deck_order} x "
                    f"{source_length:.12g}"
                ),
                deviation=deviation,
            )

        deviation = abs(source_length - target_length)
        expected_offset = 0.0 if iso.orientation == 1 else target_length
        offset_ok = abs(iso.offset - expected_offset) <= tolerance
        return CheckResult(
            passed=deviation <= tolerance and offset_ok,
            detail=(
                f"L1={source_length:.12g}, L2={target_length:.12g}, "
                f"map theta -> {iso.orientation:+d}*theta + {iso.offset:.12g}"
            ),
            deviation=deviation,
        )

    def check_codim(self, iso: IsometryDatum) -> CheckResult:
        """Leaf codimension agrees at every pair of corresponding points."""
        if not self.check_metric(iso).passed:
            return _not_run("metric check failed")

        source, target = iso.source, iso.target
        rows: list[tuple[str, ...]] = []
        passed = True

        def compare(position_source: float, position_target: float, label: str) -> None:
            nonlocal passed
            source_dim = source.leaf_dim_at(position_source)
            target_dim = target.leaf_dim_at(position_target)
            source_codim = source.ambient_dim - source_dim
            target_codim = target.ambient_dim - target_dim
            ok = source_codim == target_codim
            passed = passed and ok
            rows.append(
                (
                    label,
                    str(source_dim),
                    str(source_codim),
                    str(target_dim),
                    str(target_codim),
                    "ok" if ok else "mismatch",
                )
            )

        # 正則層
        regular_ok = (
            source.ambient_dim - source.regular_leaf_dim
            == target.ambient_dim - target.regular_leaf_dim
        )
        passed = regular_ok
        rows.append(
            (
                "regular",
                str(source.regular_leaf_dim),
                str(source.ambient_dim - source.regular_leaf_dim),
                str(target.regular_leaf_dim),
                str(target.ambient_dim - target.regular_leaf_dim),
                "ok" if regular_ok else "mismatch",
            )
        )

        if iso.covering is not None:
            fold = iso.covering.folding_map
            for position in _special_points(target) + fold.fold_points:
                image = float(fold.apply(position))
                compare(image, position, f"theta~={position:.6g}")
        else:
            for position in _special_points(source):
                compare(position, float(iso.apply(position)), f"theta={position:.6g}")
            for position in _special_points(target):
                preimage = float(iso.orientation * (position - iso.offset))
                compare(preimage, position, f"theta'={position:.6g}")

        logger.debug("codim check %s: %s", iso.label, passed)
        return CheckResult(
            passed=passed,
            detail="leaf codimensions preserved" if passed else "leaf codimensions differ",
            table=tuple(rows),
        )

    def check_qcodim_strata(self, iso: IsometryDatum) -> CheckResult:
        """The map carries the closure of each qcodim-k stratum onto its counterpart."""
        if not self.check_metric(iso).passed:
            return _not_run("metric check failed")

        source_strata = self.factory.stratify(iso.source)
        target_strata = self.factory.stratify(iso.target)
        source_points = source_strata.positions_with_qcodim(1)
        target_points = target_strata.positions_with_qcodim(1)
        tolerance = self.POSITION_RTOL * iso.source.length

        if iso.covering is not None:
            # 被覆変換群で割ると折り返し点は境界（商余次元 1）になる
            fold = iso.covering.folding_map
            images = fold.apply(np.asarray(target_points + fold.fold_points, dtype=np.float64))
            compared = _unique_sorted([float(x) for x in images], tolerance)
            expected = _unique_sorted(list(source_points), tolerance)
            regular_compared = [
                _fold_image(fold, a, b) for a, b in target_strata.closure_with_qcodim(0)
            ]
            regular_expected = list(source_strata.closure_with_qcodim(0))
        else:
            compared = _unique_sorted([float(iso.apply(p)) for p in source_points], tolerance)
            expected = _unique_sorted(list(target_points), tolerance)
            regular_compared = [
                _ordered(float(iso.apply(a)), float(iso.apply(b)))
                for a, b in source_strata.closure_with_qcodim(0)
            ]
            regular_expected = list(target_strata.closure_with_qcodim(0))

        points_ok = len(compared) == len(expected) and all(
            abs(a - b) <= tolerance for a, b in zip(compared, expected, strict=False)
        )
        regular_ok = len(regular_compared) == len(regular_expected) and all(
            abs(a[0] - b[0]) <= tolerance and abs(a[1] - b[1]) <= tolerance
            for a, b in zip(regular_compared, regular_expected, strict=False)
        )
        passed = points_ok and regular_ok

        rows = (
            (
                "0",
                _format_intervals(regular_compared),
                _format_intervals(regular_expected),
                "ok" if regular_ok else "mismatch",
            ),
            (
                "1",
                _format_points(compared),
                _format_points(expected),
                "ok" if points_ok else "mismatch",
            ),
        )
        if passed:
            detail = "qcodim strata preserved"
        elif not points_ok:
            detail = "qcodim-1 sets differ"
        else:
            detail = "regular strata closures differ"
        logger.debug("qcodim check %s: %s (%s vs %s)", iso.label, passed, compared, expected)
        return CheckResult(
            passed=passed,
            detail=detail,
            table=rows,
        )

    def check_mean_curvature(
        self, iso: IsometryDatum, tol: float = 1e-8, margin: float = 0.01
    ) -> CheckResult:
        """sup |s·H₁(θ) - H₂(φ(θ))| over an interior mesh is at most tol.

        特異点の周り（区間長の margin 倍）は両方の場が発散するため除外します。
        """
        if not self.check_metric(iso).passed:
            return _not_run("metric check failed")

        source_points, target_points, slopes = self._correspondence(iso, margin)
        if source_points.size == 0:
            return CheckResult(passed=True, detail="no admissible sample points", deviation=0.0)

        source_field = MeanCurvatureField(iso.source)
        target_field = MeanCurvatureField(iso.target)
        deviation = float(
            np.max(np.abs(slopes * source_field(source_points) - target_field(target_points)))
        )
        logger.debug("mean curvature deviation %s: %.3e", iso.label, deviation)
        return CheckResult(
            passed=deviation <= tol,
            detail=f"max deviation {deviation:.3e} (tol {tol:.1e})",
            deviation=deviation,
        )

    def check_shape_spectra(
        self, iso: IsometryDatum, samples: int = 16, tol: float = 1e-9, margin: float = 0.01
    ) -> CheckResult:
        """Nonzero shape eigenvalues and multiplicities agree at corresponding points.

        閉形式（定数・sin/cos 積）の重みでのみ適用可能です。
        """
        if not self.check_metric(iso).passed:
            return _not_run("metric check failed")
        if iso.covering is not None:
            return _not_run("shape spectra are not defined for pulled-back weights")

        source_points, target_points, _ = self._correspondence(iso, margin)
        if source_points.size == 0:
            return _not_run("no admissible sample points")
        picks = np.linspace(0, source_points.size - 1, min(samples, source_points.size))
        deviation = 0.0
        try:
            for index in picks.astype(np.int64):
                first = self.jacobi_service.shape_spectrum_from_profile(
                    iso.source, float(source_points[index]), 1
                )
                second = self.jacobi_service.shape_spectrum_from_profile(
                    iso.target, float(target_points[index]), iso.orientation
                )
                left, right = first.nonzero(tol), second.nonzero(tol)
                if [e.multiplicity for e in left] != [e.multiplicity for e in right]:
                    return CheckResult(
                        passed=False,
                        detail=f"multiplicities differ at theta={source_points[index]:.6g}",
                        deviation=float("inf"),
                    )
                for a, b in zip(left, right, strict=True):
                    scale = max(1.0, abs(a.eigenvalue))
                    deviation = max(deviation, abs(a.eigenvalue - b.eigenvalue) / scale)
        except UnsupportedProfileError as e:
            return _not_run(str(e))

        return CheckResult(
            passed=deviation <= tol,
            detail=f"max relative deviation {deviation:.3e}",
            deviation=deviation,
        )

    def compare_spectra(
        self, first: SpectrumEstimate, second: SpectrumEstimate, tol_spec: float
    ) -> tuple[bool, float]:
        """Pair eigenvalues by sorted index and compare relative gaps.

        添字で対応させたギャップが許容誤差を超えても、隣の添字と入れ替えて
        一致する場合（重複度の分裂）は一致とみなします。

        Returns:
            (等スペクトルか, 最大相対ギャップ)
        """
        a, b = first.eigenvalues, second.eigenvalues
        count = min(len(a), len(b))
        gaps = [self._relative_gap(a[i], b[i]) for i in range(count)]
        matched = True
        for i, gap in enumerate(gaps):
            if gap <= tol_spec:
                continue
            neighbours = [j for j in (i - 1, i + 1) if 0 <= j < count]
            if any(
                self._relative_gap(a[i], b[j]) <= tol_spec
                and self._relative_gap(a[j], b[i]) <= tol_spec
                for j in neighbours
            ):
                logger.warning(
                    "%s/%s: eigenvalue %d matched by cluster overlap", first.label, second.label, i
                )
                continue
            matched = False
        return matched, max(gaps, default=0.0)

    def verdict(
        self,
        iso: IsometryDatum,
        grid_size: int,
        count: int,
        tol_hyp: float = 1e-8,
        tol_spec: float = 1e-2,
        margin: float = 0.01,
        spectra: tuple[SpectrumEstimate, SpectrumEstimate] | None = None,
    ) -> Verdict:
        """Run every check, compute both spectra and render a verdict.

        Args:
            iso: 等長写像の候補
            grid_size: 格子サイズ N
            count: 固有値の個数 k
            tol_hyp: 平均曲率チェックの許容誤差
            tol_spec: スペクトル比較の相対許容誤差
            margin: 特異点の周りの除外幅
            spectra: 計算済みのスペクトル（省略時はここで計算）

        Returns:
            判定

        Raises:
            InconsistentTheoremError: 定理の仮定が成り立つのにスペクトルが一致しない場合
        """
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            if spectra is None:
                source_job = pool.submit(self.solver.basic_spectrum, iso.source, grid_size, count)
                target_job = pool.submit(self.solver.basic_spectrum, iso.target, grid_size, count)
            metric_job = pool.submit(self.check_metric, iso)
            codim_job = pool.submit(self.check_codim, iso)
            qcodim_job = pool.submit(self.check_qcodim_strata, iso)
            curvature_job = pool.submit(self.check_mean_curvature, iso, tol_hyp, margin)
            shape_job = pool.submit(self.check_shape_spectra, iso, 16, 1e-9, margin)
            minimal_jobs = (
                pool.submit(self.mean_curvature_service.is_minimal, iso.source),
                pool.submit(self.mean_curvature_service.is_minimal, iso.target),
            )
            if spectra is None:
                spectra = (source_job.result(), target_job.result())

            mean_curvature = curvature_job.result()
            isospectral, max_gap = self.compare_spectra(spectra[0], spectra[1], tol_spec)
            result = Verdict(
                pair=iso.label,
                metric=metric_job.result(),
                codim=codim_job.result(),
                qcodim_strata=qcodim_job.result(),
                mean_curvature=mean_curvature,
                shape_spectra=shape_job.result(),
                spectra=spectra,
                isospectral=isospectral,
                max_rel_gap=max_gap,
                # 1 次元の商空間では平均曲率は常に基本的なので条件 (2) のみ
                theorem_applies=mean_curvature.passed,
                minimal=(minimal_jobs[0].result(), minimal_jobs[1].result()),
            )

        if iso.claimed_codim_preserving and not result.codim_ok:
            logger.warning("%s: claimed codimension preservation does not hold", iso.label)
        logger.info(
            "%s: metric=%s codim=%s qcodim=%s H=%s isospectral=%s (max gap %.3g)",
            iso.label,
            result.metric_ok,
            result.codim_ok,
            result.qcodim_ok,
            result.mean_curvature_ok,
            result.isospectral,
            result.max_rel_gap,
        )
        if not result.consistent:
            logger.error("%s: theorem applies but the numerical result contradicts it", iso.label)
            raise InconsistentTheoremError(
                f"{iso.label}: hypotheses hold but spectra differ "
                f"(max relative gap {result.max_rel_gap:.3e}, minimal={result.minimal})",
                result,
            )
        return result

    def _relative_gap(self, first: float, second: float) -> float:
        return abs(first - second) / max(abs(first), abs(second), self.ZERO_FLOOR)

    def _correspondence(
        self, iso: IsometryDatum, margin: float
    ) -> tuple[FloatArray, FloatArray, FloatArray]:
        """対応する標本点の組 (θ₁, θ₂, dθ₂/dθ₁ の符号) を特異点の周りを除いて返す"""
        source, target = iso.source, iso.target
        if iso.covering is not None:
            fold = iso.covering.folding_map
            target_points = np.linspace(0.0, target.length, self.MESH_POINTS + 2)[1:-1]
            source_points = fold.apply(target_points)
            slopes = fold.slope(target_points)
            # 折り返し点では傾き ±1 が定まらない
            near = fold.is_near_fold(target_points, margin * target.length)
            target_points, source_points, slopes = (
                target_points[~near],
                source_points[~near],
                slopes[~near],
            )
        else:
            source_points = np.linspace(0.0, source.length, self.MESH_POINTS + 2)[1:-1]
            target_points = np.clip(iso.apply(source_points), 0.0, target.length)
            slopes = np.full(source_points.shape, float(iso.orientation))

        keep = _away_from_singular(source, source_points, margin) & _away_from_singular(
            target, target_points, margin
        )
        return source_points[keep], target_points[keep], slopes[keep]


def _not_run(reason: str) -> CheckResult:
    return CheckResult(passed=False, detail=reason, applicable=False)


def _special_points(presentation: FoliationPresentation) -> tuple[float, ...]:
    zeros = tuple(position for position, _ in presentation.weight.interior_zeros)
    return (0.0, *zeros, presentation.length)


def _away_from_singular(
    presentation: FoliationPresentation, points: FloatArray, margin: float
) -> NDArray[np.bool_]:
    keep = np.ones(points.shape, dtype=np.bool_)
    width = margin * presentation.length
    for position, _ in presentation.weight.singular_points():
        keep &= np.abs(points - position) > width
    return keep


def _unique_sorted(values: list[float], tolerance: float) -> list[float]:
    result: list[float] = []
    for value in sorted(values):
        if not result or value - result[-1] > tolerance:
            result.append(value)
    return result


def _format_points(points: list[float]) -> str:
    return "{" + ", ".join(f"{p:.6g}" for p in points) + "}"


def _fold_image(fold: FoldingMap, start: float, end: float) -> tuple[float, float]:
    inner = [p for p in fold.fold_points if start < p < end]
    images = fold.apply(np.asarray([start, *inner, end], dtype=np.float64))
    return (float(images.min()), float(images.max()))


def _ordered(first: float, second: float) -> tuple[float, float]:
    return (first, second) if first <= second else (second, first)


def _format_intervals(intervals: list[tuple[float, float]]) -> str:
    return ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b in intervals)
