"""CSV/JSON report writer implementation.

実行結果を次の成果物として書き出します。
- spectra.csv: presentation, index, lambda_N, lambda_2N, extrapolated, err_est
- verdicts.csv: pair, metric_ok, codim_ok, qcodim_ok, H_ok, theorem_applies,
  isospectral, max_rel_gap
- report.json: 来歴（シナリオのハッシュ・ソルバ設定）と全判定の機械可読な写し

CSV は有効数字 12 桁の固定書式と CRLF 改行（RFC 4180）で、同じ入力からは
同じバイト列になります。
"""

import json
import math
import logging
from collections.abc import Iterable, Set
from dataclasses import asdict
from pathlib import Path
from typing import Any

import pandas as pd

from leafspec.domain.models.isometry import CheckResult, Verdict
from leafspec.domain.models.scenario import OutputArtifact, Report, SolverSettings
from leafspec.domain.models.spectrum import ConvergenceTable, SpectrumEstimate

logger = logging.getLogger(__name__)

SPECTRA_FILENAME = "spectra.csv"
VERDICTS_FILENAME = "verdicts.csv"
REPORT_FILENAME = "report.json"

FLOAT_FORMAT = "%.12g"
LINE_TERMINATOR = "\r\n"

SPECTRA_COLUMNS = ("presentation", "index", "lambda_N", "lambda_2N", "extrapolated", "err_est")
VERDICT_COLUMNS = (
    "pair",
    "metric_ok",
    "codim_ok",
    "qcodim_ok",
    "H_ok",
    "theorem_applies",
    "isospectral",
    "max_rel_gap",
)


def spectra_frame(spectra: Iterable[SpectrumEstimate]) -> pd.DataFrame:
    """スペクトル推定を spectra.csv の表に変換する"""
    rows = [
        (
            estimate.label,
            i,
            estimate.coarse[i],
            estimate.fine[i],
            estimate.extrapolated[i],
            estimate.error_estimates[i],
        )
        for estimate in spectra
        for i in range(estimate.count)
    ]
    return pd.DataFrame(rows, columns=list(SPECTRA_COLUMNS))


def verdicts_frame(verdicts: Iterable[Verdict]) -> pd.DataFrame:
    """判定を verdicts.csv の表に変換する（真偽値は小文字の文字列）"""
    rows = [
        (
            v.pair,
            _flag(v.metric_ok),
            _flag(v.codim_ok),
            _flag(v.qcodim_ok),
            _flag(v.mean_curvature_ok),
            _flag(v.theorem_applies),
            _flag(v.isospectral),
            v.max_rel_gap,
        )
        for v in verdicts
    ]
    return pd.DataFrame(rows, columns=list(VERDICT_COLUMNS))


def convergence_frame(table: ConvergenceTable) -> pd.DataFrame:
    """収束表を 1 固有値 1 行の表に変換する"""
    ladder = [f"N={n}" for n in table.ladder]
    columns = ["presentation", "index", *ladder, "ratio", "extrapolated"]
    rows = [
        (
            table.label,
            i,
            *(row[i] for row in table.eigenvalues),
            float("nan") if table.ratios[i] is None else table.ratios[i],
            table.extrapolated[i],
        )
        for i in range(table.count)
    ]
    return pd.DataFrame(rows, columns=columns)


def to_csv_text(frame: pd.DataFrame) -> str:
    """固定書式の CSV 文字列"""
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator=LINE_TERMINATOR)


class CsvReportWriter:
    """Write run reports as CSV tables plus a JSON mirror."""

    def write(
        self, report: Report, output_dir: Path, outputs: Set[OutputArtifact]
    ) -> tuple[Path, ...]:
        """Write the requested artifacts.

        Args:
            report: 実行結果
            output_dir: 出力先ディレクトリ（なければ作成）
            outputs: 書き出す成果物

        Returns:
            書き出したファイルのパス（spectra, verdicts, report の順）
        """
        output_dir.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []

        if OutputArtifact.SPECTRA in outputs:
            path = output_dir / SPECTRA_FILENAME
            self._write_text(path, to_csv_text(spectra_frame(report.spectra)))
            written.append(path)

        if OutputArtifact.VERDICTS in outputs:
            path = output_dir / VERDICTS_FILENAME
            self._write_text(path, to_csv_text(verdicts_frame(report.verdicts)))
            written.append(path)

        if OutputArtifact.REPORT in outputs or OutputArtifact.CONVERGENCE in outputs:
            path = output_dir / REPORT_FILENAME
            document = report_to_dict(report)
            text = json.dumps(document, indent=2, sort_keys=True, allow_nan=False)
            self._write_text(path, text + "\n")
            written.append(path)

        for path in written:
            logger.info("Wrote %s", path)
        return tuple(written)

    def read(self, path: Path) -> Report:
        """Read a report back from report.json.

        Raises:
            FileNotFoundError: ファイルが存在しない場合
            ValueError: レポートとして解釈できない場合
        """
        if not path.exists():
            raise FileNotFoundError(f"Report file not found: {path}")
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
            return report_from_dict(document)
        except (KeyError, TypeError, json.JSONDecodeError) as e:
            raise ValueError(f"Invalid report file {path}: {e}") from e

    @staticmethod
    def _write_text(path: Path, text: str) -> None:
        # newline="" で CRLF をそのまま書く
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)


def report_to_dict(report: Report) -> dict[str, Any]:
    """Report を JSON 互換の辞書に変換する（非有限の数値は null）"""
    document: dict[str, Any] = {
        "provenance": {
            "scenario_hash": report.scenario_hash,
            "scenario_path": report.scenario_path,
            "generated_at": report.generated_at,
            "solver": asdict(report.solver),
        },
        "spectra": [asdict(s) for s in report.spectra],
        "verdicts": [asdict(v) for v in report.verdicts],
        "convergence": [asdict(c) for c in report.convergence],
        "failures": list(report.failures),
    }
    return _finite_or_none(document)


def report_from_dict(document: dict[str, Any]) -> Report:
    """report_to_dict の逆変換"""
    provenance = document["provenance"]
    return Report(
        scenario_hash=provenance["scenario_hash"],
        scenario_path=provenance["scenario_path"],
        solver=SolverSettings(**provenance["solver"]),
        spectra=tuple(_spectrum_from_dict(s) for s in document["spectra"]),
        verdicts=tuple(_verdict_from_dict(v) for v in document["verdicts"]),
        convergence=tuple(_convergence_from_dict(c) for c in document["convergence"]),
        failures=tuple(document["failures"]),
        generated_at=provenance["generated_at"],
    )


def _finite_or_none(value: Any) -> Any:
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _finite_or_none(item) for key, item in value.items()}  # pyright: ignore[reportUnknownVariableType]
    if isinstance(value, (list, tuple)):
        return [_finite_or_none(item) for item in value]  # pyright: ignore[reportUnknownVariableType]
    return value


def _flag(value: bool) -> str:
    return "true" if value else "false"


def _spectrum_from_dict(data: dict[str, Any]) -> SpectrumEstimate:
    first, second = data["grid_sizes"]
    return SpectrumEstimate(
        label=data["label"],
        grid_sizes=(int(first), int(second)),
        coarse=tuple(data["coarse"]),
        fine=tuple(data["fine"]),
        extrapolated=tuple(data["extrapolated"]),
        error_estimates=tuple(data["error_estimates"]),
    )


def _check_from_dict(data: dict[str, Any]) -> CheckResult:
    return CheckResult(
        passed=data["passed"],
        detail=data["detail"],
        deviation=data["deviation"],
        table=tuple(tuple(row) for row in data["table"]),
        applicable=data["applicable"],
    )


def _verdict_from_dict(data: dict[str, Any]) -> Verdict:
    source, target = data["spectra"]
    first, second = data["minimal"]
    return Verdict(
        pair=data["pair"],
        metric=_check_from_dict(data["metric"]),
        codim=_check_from_dict(data["codim"]),
        qcodim_strata=_check_from_dict(data["qcodim_strata"]),
        mean_curvature=_check_from_dict(data["mean_curvature"]),
        shape_spectra=_check_from_dict(data["shape_spectra"]),
        spectra=(_spectrum_from_dict(source), _spectrum_from_dict(target)),
        isospectral=data["isospectral"],
        max_rel_gap=math.inf if data["max_rel_gap"] is None else data["max_rel_gap"],
        theorem_applies=data["theorem_applies"],
        minimal=(first, second),
    )


def _convergence_from_dict(data: dict[str, Any]) -> ConvergenceTable:
    return ConvergenceTable(
        label=data["label"],
        ladder=tuple(data["ladder"]),
        eigenvalues=tuple(tuple(row) for row in data["eigenvalues"]),
        ratios=tuple(data["ratios"]),
        extrapolated=tuple(data["extrapolated"]),
    )
