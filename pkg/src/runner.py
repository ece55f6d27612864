"""インスタンスの検証パイプライン

このモジュールは、インスタンス設定から格子・被覆・開集合の断片・プローブ代数・
降下データを組み立て、各段階の検証と判定を実行する中核クラスを提供します。

主要クラス:
    InstanceRunner: 1 つのインスタンスに対する検証パイプライン

段階:
    1. validate: 格子・被覆・断片・プローブ関手・降下データ・1 の分割の検証
    2. operad: 断片上のオペラド公理の検査
    3. causality: 直交する開集合の組での因果律
    4. check_alg: 素朴な貼り合わせの判定と商の連鎖
    5. check_aqft: 開集合ごとの余単位の判定（スレッドで並列）、単位、拡張・制限、形式モデル

決定性:
    開集合ごとの判定は不変な入力だけを使う純粋な計算で、結果は (インスタンス, 開集合, チェック)
    の順に並べ替えてから書き出すので、スレッド数によらずレポートは同一です。

使用例:
    runner = InstanceRunner(load_config(Path("instances/z12.json")), threads=4)
    results = runner.run_all(print_progress)
"""

import random
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional

from src.descent import (
    DescentDatum,
    Partition,
    aqft_open_check,
    data_functor,
    global_presentation,
    naive_glue,
    operadic_glue,
    quotient_chain_report,
    theorem_alg_verdict,
    unit_verdict,
    validate_datum,
)
from src.exceptions import AqftGlueError, ConfigError, UsageError
from src.lattice import (
    Cover,
    Lattice1D,
    Sites,
    antisymmetry_sweep,
    sites_text,
    validate_cover,
    validate_partition,
)
from src.operad import axiom_suite
from src.orthcat import OpenFragment, intersection_closure, open_fragment, validate
from src.probe import ProbeAQFT, build_probe, causality_check, extend_restrict, triangle_report, validate_probe
from src.rawmodel import raw_model_check
from src.report import (
    EXPECTED_VERDICTS,
    VERDICT_ISOMORPHISM,
    VERDICT_NOT_INJECTIVE,
    VERDICT_PASS,
    CheckResult,
    sorted_results,
    validation_result,
)
from src.rewrite import graded_dimensions
from src.utils import InstanceConfig, degree_bound_for, load_partition

GLOBAL_OPEN = "M"
EXHAUSTIVE_OBJECT_LIMIT = 4
OPERAD_SEED = 0

ProgressCallback = Optional[Callable[[str], None]]


class InstanceRunner:
    """インスタンスの検証パイプラインを実行するクラス"""

    def __init__(
        self,
        config: InstanceConfig,
        degree: Optional[int] = None,
        partition: Optional[str] = None,
        threads: int = 1,
        output_dir: Optional[Path] = None,
    ) -> None:
        """
        初期化

        Args:
            config: インスタンス設定
            degree: 判定する次数（設定値を上書き）
            partition: "uniform" または 1 の分割ファイルのパス（設定値を上書き）
            threads: 開集合ごとの判定に使うスレッド数
            output_dir: 出力ディレクトリ（設定値を上書き）

        Raises:
            UsageError: threads が 1 未満、または degree が負の場合
        """
        if threads < 1:
            raise UsageError(f"スレッド数は 1 以上である必要があります: {threads}")
        self.config = config
        self.degree = config.degree if degree is None else degree
        if self.degree < 0:
            raise UsageError(f"次数は 0 以上である必要があります: {self.degree}")
        self.partition_option = partition
        self.threads = threads
        self.output_dir = output_dir or Path(config.output)

    @property
    def name(self) -> str:
        return self.config.name

    @property
    def degree_bound(self) -> int:
        return degree_bound_for(self.degree)

    @cached_property
    def lattice(self) -> Lattice1D:
        try:
            return self.config.lattice()
        except AqftGlueError as e:
            raise ConfigError(f"格子を構成できません: {e.message}", self.name) from e

    @cached_property
    def cover(self) -> Cover:
        return self.config.cover_sets()

    @cached_property
    def opens(self) -> dict[str, Sites]:
        """判定する開集合（設定の test_opens と M）"""
        opens = self.config.opens()
        if self.lattice.sites not in opens.values():
            opens[GLOBAL_OPEN] = self.lattice.sites
        return opens

    @cached_property
    def fragment(self) -> OpenFragment:
        """パッチ、M、判定する開集合とそれらの共通部分からなる断片"""
        named: dict[str, Sites] = {}
        by_sites: dict[Sites, str] = {}

        def add(name: str, sites: Sites) -> None:
            if sites in by_sites:
                return
            if name in named:
                raise ConfigError(f"開集合名 {name} が異なるサイト集合に使われています", self.name)
            named[name] = sites
            by_sites[sites] = name

        for label, sites in self.cover.patches:
            add(label, sites)
        add(GLOBAL_OPEN, self.lattice.sites)
        for name, sites in sorted(self.opens.items()):
            add(name, sites)
        for sites in intersection_closure(list(named.values())):
            add(sites_text(sites), sites)
        return open_fragment(self.lattice, named)

    @cached_property
    def probe(self) -> ProbeAQFT:
        return build_probe(self.lattice, self.fragment, self.degree_bound)

    @cached_property
    def datum(self) -> DescentDatum:
        return data_functor(self.probe, self.cover)

    @cached_property
    def partition(self) -> Optional[Partition]:
        """利用者指定の 1 の分割（一様な分割なら None）"""
        option = self.partition_option
        if option == "uniform":
            return None
        if option is not None:
            return load_partition(Path(option), self.lattice)
        return self.config.partition_forms(self.lattice)

    def validate(self, progress_callback: ProgressCallback = None) -> list[CheckResult]:
        """格子・被覆・断片・プローブ関手・降下データ・1 の分割を検証する"""
        if progress_callback:
            progress_callback(f"{self.lattice.describe()} を検証しています")
        reports = [
            ("lattice", antisymmetry_sweep(self.lattice)),
            ("cover", validate_cover(self.lattice, self.cover, self.config.w_min)),
            ("fragment", validate(self.fragment)),
            ("probe", validate_probe(self.probe)),
            ("descent", validate_datum(self.datum)),
        ]
        if self.partition is not None:
            reports.append(("partition", validate_partition(self.lattice, self.cover, self.partition)))
        return [validation_result(self.name, check, report) for check, report in reports]

    def operad(self, progress_callback: ProgressCallback = None) -> CheckResult:
        """断片上のオペラド公理を検査する（対象が少なければ全数検査も行う）"""
        exhaustive = len(self.fragment.objects) <= EXHAUSTIVE_OBJECT_LIMIT
        if progress_callback:
            mode = "全数検査と乱択" if exhaustive else "乱択"
            progress_callback(f"オペラド公理を検査しています（{mode}）")
        report = axiom_suite(self.fragment, random.Random(OPERAD_SEED), exhaustive=exhaustive)
        return validation_result(self.name, "operad_axioms", report)

    def causality(self, progress_callback: ProgressCallback = None) -> CheckResult:
        if progress_callback:
            progress_callback("因果律を検査しています")
        return validation_result(self.name, "causality", causality_check(self.probe))

    def glue_alg(self, progress_callback: ProgressCallback = None) -> list[CheckResult]:
        """素朴な貼り合わせの表示を作り、大域代数と次元を並べる"""
        naive = naive_glue(self.datum, progress_callback=progress_callback)
        glob = global_presentation(self.datum)
        assert naive.rules is not None
        return [
            CheckResult(
                instance=self.name,
                open=GLOBAL_OPEN,
                check="naive_glue",
                verdict=VERDICT_PASS,
                dims=graded_dimensions(naive, self.degree),
                reference_dims=graded_dimensions(glob, self.degree),
                details=(f"rules {len(naive.rules)}",) + naive.truncation_log,
            ),
            quotient_chain_report(self.datum, self.degree, self.name),
        ]

    def glue_aqft(self, progress_callback: ProgressCallback = None) -> list[CheckResult]:
        """開集合ごとにオペラド的な貼り合わせの表示を作り、大域代数と次元を並べる"""

        def one(item: tuple[str, Sites]) -> CheckResult:
            name, region = item
            glued = operadic_glue(self.datum, region, name, progress_callback)
            rules = glued.presentation.rules or ()
            return CheckResult(
                instance=self.name,
                open=name,
                check="operadic_glue",
                verdict=VERDICT_PASS,
                dims=graded_dimensions(glued.presentation, self.degree),
                reference_dims=graded_dimensions(global_presentation(self.datum, region, name), self.degree),
                details=(
                    f"R1 {len(glued.r1)}, R2 {len(glued.r2)}, R3 {len(glued.r3)}, rules {len(rules)}",
                )
                + glued.presentation.truncation_log,
            )

        return self._per_open(one, self.opens)

    def check_alg(self, progress_callback: ProgressCallback = None) -> list[CheckResult]:
        """theorem_alg の判定"""
        pairs = list(self.config.test_pairs) or None
        return [
            theorem_alg_verdict(
                self.datum, pairs, self.degree, self.partition, self.name, progress_callback
            )
        ]

    def check_aqft(self, progress_callback: ProgressCallback = None) -> list[CheckResult]:
        """
        theorem_aqft の判定と、単位・拡張制限・形式モデルの検査

        Raises:
            UsageError: 被覆が許容でない場合
        """
        report = validate_cover(self.lattice, self.cover, self.config.w_min)
        if not report.ok:
            raise UsageError(
                f"被覆が許容ではありません。validate で確認してください: {report.lines()[0]}",
                self.name,
            )

        def one(item: tuple[str, Sites]) -> CheckResult:
            name, region = item
            if progress_callback:
                progress_callback(f"開集合 {name} で余単位を検査しています")
            return aqft_open_check(self.datum, name, region, self.degree, self.partition, self.name)

        results = self._per_open(one, self.opens)
        results.extend(unit_verdict(self.datum, self.degree, self.name))
        for name in sorted(self.opens):
            obj = self.fragment.object_for(self.opens[name])
            assert obj is not None
            er = extend_restrict(self.probe, obj)
            results.append(validation_result(self.name, "ext_res", triangle_report(self.probe, er)))
        if self.config.raw_model:
            if progress_callback:
                progress_callback("形式モデルと照合しています")
            results.append(
                raw_model_check(
                    self.datum,
                    max_degree=min(self.degree, 2),
                    instance=self.name,
                    progress_callback=progress_callback,
                )
            )
        return results

    def _per_open(
        self,
        task: Callable[[tuple[str, Sites]], CheckResult],
        opens: Mapping[str, Sites],
    ) -> list[CheckResult]:
        # 並列実行の前に共有する値を確定させる
        _ = (self.datum, self.partition)
        items = sorted(opens.items())
        if self.threads == 1:
            return [task(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(task, items))

    def run_all(self, progress_callback: ProgressCallback = None) -> list[CheckResult]:
        """すべての段階を順に実行し、並べ替えた結果を返す"""
        results = self.validate(progress_callback)
        results.append(self.operad(progress_callback))
        results.append(self.causality(progress_callback))
        results.extend(self.check_alg(progress_callback))
        results.append(quotient_chain_report(self.datum, self.degree, self.name))
        results.extend(self.check_aqft(progress_callback))
        return sorted_results(results)

    def expected_alg_verdict(self) -> str:
        """被覆が M を含むときだけ素朴な貼り合わせは同型になる"""
        return VERDICT_ISOMORPHISM if self.cover.contains_whole(self.lattice) else VERDICT_NOT_INJECTIVE

    def failures(self, results: list[CheckResult]) -> list[CheckResult]:
        """期待どおりでない判定"""
        out = []
        for r in results:
            if r.check == "theorem_alg":
                if r.verdict != self.expected_alg_verdict():
                    out.append(r)
            elif r.verdict not in EXPECTED_VERDICTS:
                out.append(r)
        return out

