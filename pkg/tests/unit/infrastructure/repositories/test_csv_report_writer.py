"""Tests for CsvReportWriter.

CSV の固定書式・CRLF 改行・決定性と JSON の往復のテスト。
"""

import json
import math
from dataclasses import replace
from pathlib import Path

import pytest

from leafspec.domain.models.isometry import CheckResult
from leafspec.domain.models.scenario import DEFAULT_OUTPUTS, OutputArtifact, Report
from leafspec.domain.models.spectrum import ConvergenceTable
from leafspec.infrastructure.repositories.csv_report_writer import (
    REPORT_FILENAME,
    SPECTRA_FILENAME,
    VERDICTS_FILENAME,
    CsvReportWriter,
    convergence_frame,
    spectra_frame,
    to_csv_text,
)
from tests.support.builders import make_estimate, make_report, make_verdict


@pytest.fixture
def writer() -> CsvReportWriter:
    return CsvReportWriter()


@pytest.fixture
def report() -> Report:
    """球面とオービフォールドの比較を模したレポート"""
    spectra = (
        make_estimate("sphere", [0.0, 2.0, 6.0]),
        make_estimate("orbifold", [0.0, 1.0, 4.0]),
    )
    return make_report(
        verdicts=[make_verdict("sphere~orbifold", spectra=spectra)],
        spectra=spectra,
    )


class TestCsvFormat:
    """CSV の書式のテスト"""

    def test_spectra_csv(self, writer: CsvReportWriter, report: Report, tmp_path: Path) -> None:
        """spectra.csv のヘッダと行"""
        writer.write(report, tmp_path, {OutputArtifact.SPECTRA})
        lines = (tmp_path / SPECTRA_FILENAME).read_bytes().decode("utf-8").split("\r\n")

        assert lines[0] == "presentation,index,lambda_N,lambda_2N,extrapolated,err_est"
        assert lines[1] == "sphere,0,0,0,0,0"
        assert lines[3] == "sphere,2,6,6,6,0"
        assert lines[4] == "orbifold,0,0,0,0,0"
        assert lines[-1] == ""

    def test_verdicts_csv(self, writer: CsvReportWriter, report: Report, tmp_path: Path) -> None:
        """verdicts.csv の真偽値は小文字"""
        writer.write(report, tmp_path, {OutputArtifact.VERDICTS})
        text = (tmp_path / VERDICTS_FILENAME).read_bytes().decode("utf-8")

        assert text == (
            "pair,metric_ok,codim_ok,qcodim_ok,H_ok,theorem_applies,isospectral,max_rel_gap\r\n"
            "sphere~orbifold,true,false,true,false,false,false,0.5\r\n"
        )

    def test_twelve_significant_digits(self) -> None:
        """浮動小数点数は有効数字 12 桁"""
        text = to_csv_text(spectra_frame([make_estimate("x", [1.0 / 3.0])]))
        assert text.splitlines()[1] == "x,0,0.333333333333,0.333333333333,0.333333333333,0"

    def test_convergence_frame(self) -> None:
        """収束表は格子ごとの列と誤差比をもつこと"""
        table = ConvergenceTable(
            label="orb",
            ladder=(32, 64, 128),
            eigenvalues=((0.0, 0.99), (0.0, 0.9975), (0.0, 0.999375)),
            ratios=(None, 4.0),
            extrapolated=(0.0, 1.0),
        )
        frame = convergence_frame(table)

        assert list(frame.columns) == [
            "presentation",
            "index",
            "N=32",
            "N=64",
            "N=128",
            "ratio",
            "extrapolated",
        ]
        assert frame["ratio"].isna().tolist() == [True, False]


class TestWrite:
    """write のテスト"""

    def test_default_outputs(self, writer: CsvReportWriter, report: Report, tmp_path: Path) -> None:
        """既定の出力は spectra, verdicts, report の順"""
        written = writer.write(report, tmp_path / "out", DEFAULT_OUTPUTS)
        assert written == (
            tmp_path / "out" / SPECTRA_FILENAME,
            tmp_path / "out" / VERDICTS_FILENAME,
            tmp_path / "out" / REPORT_FILENAME,
        )
        assert all(path.exists() for path in written)

    def test_deterministic_bytes(
        self, writer: CsvReportWriter, report: Report, tmp_path: Path
    ) -> None:
        """同じレポートからは同じバイト列になること"""
        first = writer.write(report, tmp_path / "a", DEFAULT_OUTPUTS)
        second = writer.write(report, tmp_path / "b", DEFAULT_OUTPUTS)
        for left, right in zip(first, second, strict=True):
            assert left.read_bytes() == right.read_bytes()

    def test_convergence_only_writes_json(
        self, writer: CsvReportWriter, report: Report, tmp_path: Path
    ) -> None:
        """収束診断は report.json に含めること"""
        written = writer.write(report, tmp_path, {OutputArtifact.CONVERGENCE})
        assert written == (tmp_path / REPORT_FILENAME,)


class TestRead:
    """read のテスト"""

    def test_round_trip(self, writer: CsvReportWriter, report: Report, tmp_path: Path) -> None:
        """report.json から同じレポートを復元できること"""
        writer.write(report, tmp_path, {OutputArtifact.REPORT})
        restored = writer.read(tmp_path / REPORT_FILENAME)

        assert restored == report
        assert restored.verdicts[0].qcodim_strata.table == report.verdicts[0].qcodim_strata.table

    def test_non_finite_values_become_null(
        self, writer: CsvReportWriter, report: Report, tmp_path: Path
    ) -> None:
        """無限大のずれは null として書き、厳密な JSON として読めること"""
        shape = CheckResult(passed=False, detail="multiplicities differ", deviation=math.inf)
        verdict = replace(report.verdicts[0], shape_spectra=shape, max_rel_gap=math.inf)
        writer.write(replace(report, verdicts=(verdict,)), tmp_path, {OutputArtifact.REPORT})

        text = (tmp_path / REPORT_FILENAME).read_text(encoding="utf-8")
        assert "Infinity" not in text

        def reject(constant: str) -> None:
            raise ValueError(constant)

        document = json.loads(text, parse_constant=reject)
        assert document["verdicts"][0]["shape_spectra"]["deviation"] is None

        restored = writer.read(tmp_path / REPORT_FILENAME)
        assert restored.verdicts[0].shape_spectra.deviation is None
        assert restored.verdicts[0].max_rel_gap == math.inf

    def test_missing_file(self, writer: CsvReportWriter, tmp_path: Path) -> None:
        """存在しないファイルは FileNotFoundError になること"""
        with pytest.raises(FileNotFoundError):
            writer.read(tmp_path / REPORT_FILENAME)

    def test_invalid_file(self, writer: CsvReportWriter, tmp_path: Path) -> None:
        """レポートでない JSON は ValueError になること"""
        path = tmp_path / REPORT_FILENAME
        path.write_text('{"spectra": []}', encoding="utf-8")
        with pytest.raises(ValueError, match="Invalid report file"):
            writer.read(path)
