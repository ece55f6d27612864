"""検証レポートと判定結果

このモジュールは、検証や定理チェックの「出力」となる値の型と、その
JSON / テキストへの書き出しを提供します。ここにある値は例外ではありません。

主な型:
    Violation / ValidationReport: 公理や前提の違反と、その証拠
    CheckResult: 1 つの開集合に対する 1 つのチェックの判定

出力形式:
    JSON: {instance, open, check, verdict, witness?, dims: {次数: 個数}} のリスト。
          キーを整列し、結果を (instance, open, check) の順に並べるので、
          同じ入力からはバイト単位で同じファイルができます。
    テキスト: rich のテーブルで描画したもの
"""

import io
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional

from rich.console import Console
from rich.table import Table

VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"
VERDICT_ISOMORPHISM = "isomorphism"
VERDICT_NOT_INJECTIVE = "not injective"
VERDICT_NOT_ISOMORPHISM = "not isomorphism"

EXPECTED_VERDICTS = {VERDICT_PASS, VERDICT_ISOMORPHISM, VERDICT_NOT_INJECTIVE}


@dataclass(frozen=True)
class Violation:
    """違反 1 件: 種類・説明・証拠"""

    kind: str
    message: str
    witness: str = ""

    def to_text(self) -> str:
        if self.witness:
            return f"[{self.kind}] {self.message}: {self.witness}"
        return f"[{self.kind}] {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    """検証結果。違反が空なら妥当"""

    subject: str
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    @property
    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def merged(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(self.subject, self.violations + other.violations)

    def lines(self) -> list[str]:
        return [v.to_text() for v in self.violations]


def report_of(subject: str, violations: Iterable[Violation]) -> ValidationReport:
    return ValidationReport(subject, tuple(violations))


@dataclass(frozen=True)
class CheckResult:
    """
    1 つの開集合に対する 1 つのチェックの判定

    Attributes:
        instance: インスタンス名
        open: 開集合名
        check: チェック名（"theorem_alg" など）
        verdict: 判定文字列（"isomorphism", "not injective", "pass", "fail" など）
        witness: 判定の証拠（正規形のテキストなど）
        dims: 次数ごとの次元（左辺側）
        reference_dims: 比較相手の次元（大域代数など）
        details: 補足の行
    """

    instance: str
    open: str
    check: str
    verdict: str
    witness: Optional[str] = None
    dims: Mapping[int, int] = field(default_factory=dict)
    reference_dims: Optional[Mapping[int, int]] = None
    details: tuple[str, ...] = ()

    def sort_key(self) -> tuple[str, str, str]:
        return (self.instance, self.open, self.check)

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "instance": self.instance,
            "open": self.open,
            "check": self.check,
            "verdict": self.verdict,
            "dims": {str(d): n for d, n in sorted(self.dims.items())},
        }
        if self.witness is not None:
            data["witness"] = self.witness
        if self.reference_dims is not None:
            data["reference_dims"] = {str(d): n for d, n in sorted(self.reference_dims.items())}
        if self.details:
            data["details"] = list(self.details)
        return data


def sorted_results(results: Iterable[CheckResult]) -> list[CheckResult]:
    return sorted(results, key=lambda r: r.sort_key())


def validation_result(instance: str, check: str, report: ValidationReport) -> CheckResult:
    """ValidationReport を pass / fail の CheckResult に変換する"""
    return CheckResult(
        instance=instance,
        open=report.subject,
        check=check,
        verdict=VERDICT_PASS if report.ok else VERDICT_FAIL,
        witness=report.violations[0].to_text() if report.violations else None,
        details=tuple(report.lines()),
    )


def results_to_json(results: Iterable[CheckResult]) -> str:
    payload = [r.to_json() for r in sorted_results(results)]
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _format_dims(dims: Optional[Mapping[int, int]]) -> str:
    if not dims:
        return "-"
    return ", ".join(str(n) for _, n in sorted(dims.items()))


def build_table(results: Sequence[CheckResult], title: str = "検証結果") -> Table:
    """判定結果を rich のテーブルにする"""
    table = Table(title=title)
    table.add_column("開集合", style="cyan", no_wrap=True)
    table.add_column("チェック", style="magenta")
    table.add_column("判定", style="bold")
    table.add_column("次元", justify="right", style="green")
    table.add_column("参照次元", justify="right", style="green")
    table.add_column("証拠")

    for r in sorted_results(results):
        verdict = r.verdict
        if verdict in EXPECTED_VERDICTS:
            verdict = f"[green]{verdict}[/green]"
        else:
            verdict = f"[red]{verdict}[/red]"
        table.add_row(
            r.open,
            r.check,
            verdict,
            _format_dims(r.dims),
            _format_dims(r.reference_dims),
            r.witness or "",
        )
    return table


def results_to_text(results: Sequence[CheckResult], title: str = "検証結果") -> str:
    """色なし・固定幅でテーブルを描画した文字列"""
    console = Console(file=io.StringIO(), record=True, width=160, color_system=None)
    console.print(build_table(results, title))
    return console.export_text()
