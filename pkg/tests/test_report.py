"""検証レポートと判定結果のテスト"""

import json

from src.report import (
    VERDICT_FAIL,
    VERDICT_ISOMORPHISM,
    VERDICT_NOT_ISOMORPHISM,
    VERDICT_PASS,
    CheckResult,
    Violation,
    report_of,
    results_to_json,
    results_to_text,
    sorted_results,
    validation_result,
)


def sample_results() -> list[CheckResult]:
    return [
        CheckResult("z12", "M", "theorem_aqft", VERDICT_ISOMORPHISM, dims={1: 12, 0: 1}),
        CheckResult("z12", "A", "theorem_aqft", VERDICT_NOT_ISOMORPHISM, witness="x0"),
        CheckResult("z12", "A", "causality", VERDICT_PASS, reference_dims={0: 1}),
    ]


class TestViolation:
    """違反と ValidationReport のテスト"""

    def test_to_text(self) -> None:
        assert Violation("unit", "合成が欠けています", "f").to_text() == "[unit] 合成が欠けています: f"
        assert Violation("unit", "合成が欠けています").to_text() == "[unit] 合成が欠けています"

    def test_report(self) -> None:
        """違反がなければ妥当"""
        empty = report_of("A", [])
        assert empty.ok
        assert bool(empty)

        bad = report_of("A", [Violation("overlap", "幅が足りません")])
        assert not bad.ok
        assert bad.kinds == {"overlap"}
        assert bad.lines() == ["[overlap] 幅が足りません"]

    def test_merged(self) -> None:
        """主体は左側のものを残す"""
        a = report_of("A", [Violation("x", "1")])
        b = report_of("B", [Violation("y", "2")])
        merged = a.merged(b)
        assert merged.subject == "A"
        assert merged.kinds == {"x", "y"}


class TestCheckResult:
    """判定結果のテスト"""

    def test_to_json(self) -> None:
        """次数のキーは文字列、省略可能な項目は値があるときだけ出力する"""
        data = sample_results()[0].to_json()
        assert data == {
            "instance": "z12",
            "open": "M",
            "check": "theorem_aqft",
            "verdict": "isomorphism",
            "dims": {"0": 1, "1": 12},
        }

    def test_to_json_optional(self) -> None:
        r = CheckResult("z12", "A", "x", VERDICT_PASS, witness="w", reference_dims={2: 3}, details=("d",))
        data = r.to_json()
        assert data["witness"] == "w"
        assert data["reference_dims"] == {"2": 3}
        assert data["details"] == ["d"]

    def test_sorted(self) -> None:
        """(インスタンス, 開集合, チェック) の順"""
        keys = [(r.open, r.check) for r in sorted_results(sample_results())]
        assert keys == [("A", "causality"), ("A", "theorem_aqft"), ("M", "theorem_aqft")]

    def test_validation_result(self) -> None:
        """ValidationReport は pass / fail になる"""
        ok = validation_result("z12", "cover", report_of("cover", []))
        assert ok.verdict == VERDICT_PASS
        assert ok.open == "cover"
        assert ok.witness is None

        bad = validation_result("z12", "cover", report_of("cover", [Violation("arc", "弧ではありません", "A")]))
        assert bad.verdict == VERDICT_FAIL
        assert bad.witness == "[arc] 弧ではありません: A"
        assert bad.details == ("[arc] 弧ではありません: A",)


class TestOutput:
    """JSON とテキストの出力のテスト"""

    def test_json_is_sorted(self) -> None:
        """入力の順序によらず同じ文字列になる"""
        text = results_to_json(sample_results())
        assert text.endswith("\n")
        assert text == results_to_json(list(reversed(sample_results())))
        payload = json.loads(text)
        assert [p["check"] for p in payload] == ["causality", "theorem_aqft", "theorem_aqft"]

    def test_text(self) -> None:
        text = results_to_text(sample_results(), title="z12")
        assert "z12" in text
        assert "not isomorphism" in text
        assert "1, 12" in text
