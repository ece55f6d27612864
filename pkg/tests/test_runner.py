"""検証パイプラインのテスト"""

from pathlib import Path
from typing import Any, Callable

import pytest

from src.exceptions import ConfigError, UsageError
from src.report import (
    VERDICT_FAIL,
    VERDICT_ISOMORPHISM,
    VERDICT_NOT_INJECTIVE,
    VERDICT_NOT_ISOMORPHISM,
    VERDICT_PASS,
    CheckResult,
    results_to_json,
)
from src.runner import GLOBAL_OPEN, InstanceRunner
from src.utils import InstanceConfig, load_config
from tests.conftest import INSTANCES

WriteJson = Callable[[str, Any], Path]


@pytest.fixture(scope="module")
def z6_config() -> InstanceConfig:
    return load_config(INSTANCES / "z6.json")


@pytest.fixture(scope="module")
def z6_results(z6_config: InstanceConfig) -> list[CheckResult]:
    return InstanceRunner(z6_config, threads=2).run_all()


class TestInitialization:
    """初期化のテスト"""

    def test_overrides(self, z6_config: InstanceConfig, tmp_path: Path) -> None:
        """コマンドラインの値が設定値より優先される"""
        runner = InstanceRunner(z6_config, degree=1, output_dir=tmp_path)
        assert runner.degree == 1
        assert runner.degree_bound == 4
        assert runner.output_dir == tmp_path

    def test_degree_bound_follows_override(self, z6_config: InstanceConfig) -> None:
        """上書きした次数から完備化の次数上限を決める"""
        assert InstanceRunner(z6_config).degree_bound == 4
        assert InstanceRunner(z6_config, degree=5).degree_bound == 6

    def test_defaults(self, z6_config: InstanceConfig) -> None:
        runner = InstanceRunner(z6_config)
        assert runner.degree == 2
        assert runner.output_dir == Path("reports")
        assert runner.name == "z6"

    def test_invalid_threads(self, z6_config: InstanceConfig) -> None:
        with pytest.raises(UsageError):
            InstanceRunner(z6_config, threads=0)

    def test_invalid_degree(self, z6_config: InstanceConfig) -> None:
        with pytest.raises(UsageError):
            InstanceRunner(z6_config, degree=-1)


class TestFragment:
    """断片と開集合のテスト"""

    def test_global_open_added(self, z6_config: InstanceConfig) -> None:
        """判定する開集合には M が入る"""
        runner = InstanceRunner(z6_config)
        assert set(runner.opens) == {GLOBAL_OPEN}
        assert set(runner.fragment.objects) == {"P", "Q", "M", "{0,1,3,4}"}

    def test_test_opens_and_intersections(self) -> None:
        runner = InstanceRunner(load_config(INSTANCES / "z12.json"))
        assert set(runner.opens) == {"A", "AB", GLOBAL_OPEN}
        objects = set(runner.fragment.objects)
        assert {"A", "B", "C", "AB", "M", "{4,5}", "{8,9}", "{0,1}"} <= objects

    def test_conflicting_name(self, write_json: WriteJson) -> None:
        """パッチ名と同じ名前の開集合が別のサイト集合を指す"""
        data = {
            "name": "clash",
            "kind": "cycle",
            "N": 6,
            "cover": {"P": [0, 1, 2, 3, 4], "Q": [3, 4, 5, 0, 1]},
            "test_opens": {"P": [0, 1]},
        }
        runner = InstanceRunner(load_config(write_json("clash.json", data)))
        with pytest.raises(ConfigError):
            _ = runner.fragment


class TestPartitionOption:
    """1 の分割の指定のテスト"""

    def test_uniform(self, z6_config: InstanceConfig) -> None:
        assert InstanceRunner(z6_config, partition="uniform").partition is None

    def test_file(self, z6_config: InstanceConfig, write_json: WriteJson) -> None:
        path = write_json("partition.json", {"P": [1, 1, 1, 1, 1, 0], "Q": [0, 0, 0, 0, 0, 1]})
        partition = InstanceRunner(z6_config, partition=str(path)).partition
        assert partition is not None
        assert partition["Q"](5) == 1


class TestStages:
    """各段階のテスト"""

    def test_validate(self, z6_config: InstanceConfig) -> None:
        results = InstanceRunner(z6_config).validate()
        assert [r.check for r in results] ==["lattice", "cover", "fragment", "probe", "descent"]
        assert all(r.verdict == VERDICT_PASS for r in results), [r.witness for r in results]

    def test_run_all(self, z6_config: InstanceConfig, z6_results: list[CheckResult]) -> None:
        """すべての判定が期待どおり"""
        runner = InstanceRunner(z6_config)
        assert runner.failures(z6_results) == []
        checks = {r.check for r in z6_results}
        assert {"theorem_alg", "theorem_aqft", "unit", "quotient_chain", "raw_model"} <= checks

    def test_theorem_alg_not_injective(self, z6_results: list[CheckResult]) -> None:
        """M を含まない被覆では素朴な貼り合わせは単射でない"""
        [alg] = [r for r in z6_results if r.check == "theorem_alg"]
        assert alg.verdict == VERDICT_NOT_INJECTIVE

    def test_theorem_aqft_isomorphism(self, z6_results: list[CheckResult]) -> None:
        [aqft] = [r for r in z6_results if r.check == "theorem_aqft"]
        assert aqft.open == GLOBAL_OPEN
        assert aqft.verdict == VERDICT_ISOMORPHISM

    def test_thread_count_does_not_change_report(self, z6_config: InstanceConfig) -> None:
        """スレッド数によらず同じレポートになる"""
        single = InstanceRunner(z6_config, degree=1, threads=1).check_aqft()
        multi = InstanceRunner(z6_config, degree=1, threads=4).check_aqft()
        assert results_to_json(single) == results_to_json(multi)

    def test_check_aqft_requires_admissible_cover(self, write_json: WriteJson) -> None:
        """重なりが細い被覆では theorem_aqft を実行しない"""
        data = {
            "name": "thin",
            "kind": "cycle",
            "N": 6,
            "cover": {"P": [0, 1, 2, 3], "Q": [3, 4, 5, 0]},
        }
        runner = InstanceRunner(load_config(write_json("thin.json", data)), degree=1)
        with pytest.raises(UsageError):
            runner.check_aqft()


class TestFailures:
    """期待と異なる判定の抽出のテスト"""

    def result(self, check: str, verdict: str) -> CheckResult:
        return CheckResult("z6", GLOBAL_OPEN, check, verdict)

    def test_expected_alg_verdict(self, z6_config: InstanceConfig) -> None:
        assert InstanceRunner(z6_config).expected_alg_verdict() == VERDICT_NOT_INJECTIVE
        with_m = InstanceRunner(load_config(INSTANCES / "z12_with_m.json"))
        assert with_m.expected_alg_verdict() == VERDICT_ISOMORPHISM

    def test_failures(self, z6_config: InstanceConfig) -> None:
        runner = InstanceRunner(z6_config)
        unexpected_alg = self.result("theorem_alg", VERDICT_ISOMORPHISM)
        failed = self.result("causality", VERDICT_FAIL)
        not_iso = self.result("theorem_aqft", VERDICT_NOT_ISOMORPHISM)
        fine = [
            self.result("theorem_alg", VERDICT_NOT_INJECTIVE),
            self.result("theorem_aqft", VERDICT_ISOMORPHISM),
            self.result("unit", VERDICT_PASS),
        ]
        results = [unexpected_alg, failed, not_iso, *fine]
        assert runner.failures(results) == [unexpected_alg, failed, not_iso]
