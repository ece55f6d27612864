#!/usr/bin/env python3
"""AQFT 貼り合わせ検証ツールのメインプログラム

このモジュールは、1 次元格子上の CCR プローブ代数について、素朴な貼り合わせと
オペラド的な貼り合わせを比較検証する CLI ツールのメインエントリーポイントです。

主な機能:
    - validate: 格子・被覆・断片・プローブ関手・降下データの検証
    - glue-alg / glue-aqft: 貼り合わせの表示を作り、次数つき次元を表示
    - check-alg / check-aqft: 比較写像・余単位が同型かどうかの判定
    - report: すべての段階を実行して JSON とテキストのレポートを書き出す

終了コード:
    0: すべての判定が期待どおり
    1: 期待と異なる判定、または実行時エラー
    2: 設定ファイルのエラー
    3: 規則数などの上限超過（打ち切りログを表示）

使用例:
    全段階を実行:
        $ poetry run aqftglue report instances/z12.json

    次数とスレッド数を指定:
        $ poetry run aqftglue check-aqft instances/z12.json --degree 2 --threads 4

    1 の分割をファイルで指定:
        $ poetry run aqftglue check-aqft instances/z12.json --partition partition.json
"""

from pathlib import Path
from typing import Annotated, Callable, Optional

import typer
from rich.console import Console

from src.exceptions import AqftGlueError, ConfigError, ResourceError
from src.report import CheckResult, build_table, sorted_results
from src.runner import InstanceRunner
from src.utils import load_config, write_reports

app = typer.Typer(
    name="aqftglue",
    help="1 次元格子上の AQFT の貼り合わせを検証します。",
    add_completion=False,
)

console = Console(
    force_terminal=True,
    legacy_windows=False,
)

EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3

ConfigArgument = Annotated[Path, typer.Argument(help="インスタンス設定ファイル（JSON）")]
DegreeOption = Annotated[
    Optional[int], typer.Option("-d", "--degree", help="判定する次数（設定値を上書き）")
]
PartitionOption = Annotated[
    Optional[str],
    typer.Option("-p", "--partition", help="1 の分割: uniform または JSON ファイルのパス"),
]
ThreadsOption = Annotated[int, typer.Option("-t", "--threads", help="開集合ごとの判定のスレッド数")]
OutputOption = Annotated[
    Optional[Path], typer.Option("-o", "--output", help="出力ディレクトリ（設定値を上書き）")
]


def print_progress(message: str) -> None:
    """進行状況を表示する"""
    console.print(f"[blue][INFO][/blue] {message}")


def print_warning(message: str) -> None:
    """警告を表示する"""
    console.print(f"[yellow][WARN][/yellow] {message}")


def print_error(message: str) -> None:
    """エラーメッセージを表示する"""
    console.print(f"[red][ERROR][/red] {message}")


def print_success(message: str) -> None:
    """成功メッセージを表示する"""
    console.print(f"[green][SUCCESS][/green] {message}")


Stage = Callable[[InstanceRunner], list[CheckResult]]


def run_stage(
    config: Path,
    stage: Stage,
    report_name: Optional[str],
    degree: Optional[int],
    partition: Optional[str],
    threads: int,
    output: Optional[Path],
) -> None:
    """
    設定を読み込み、1 つの段階を実行して結果を表示・保存する

    Args:
        config: 設定ファイルのパス
        stage: 実行する段階
        report_name: レポートのファイル名に付ける段階名（None なら全段階のレポート）
        degree: 判定する次数
        partition: 1 の分割の指定
        threads: スレッド数
        output: 出力ディレクトリ
    """
    try:
        instance = load_config(config)
        runner = InstanceRunner(instance, degree, partition, threads, output)
        print_progress(f"インスタンス {instance.name} を読み込みました (次数 {runner.degree})")
        results = sorted_results(stage(runner))
        console.print(build_table(results, title=instance.name))

        stem = instance.name if report_name is None else f"{instance.name}.{report_name}"
        json_path, text_path = write_reports(results, runner.output_dir, stem)
        print_progress(f"レポートを書き出しました: {json_path}, {text_path}")

        failures = runner.failures(results)
        for r in failures:
            print_warning(f"期待と異なる判定: {r.open} {r.check} → {r.verdict}")
        if failures:
            raise typer.Exit(EXIT_FAILED)
        print_success("すべての判定が期待どおりです")

    except typer.Exit:
        raise
    except ConfigError as e:
        print_error(str(e))
        raise typer.Exit(EXIT_CONFIG) from None
    except ResourceError as e:
        print_error(str(e))
        for line in e.log:
            console.print(f"  {line}")
        raise typer.Exit(EXIT_RESOURCE) from None
    except AqftGlueError as e:
        print_error(str(e))
        raise typer.Exit(EXIT_FAILED) from None
    except KeyboardInterrupt:
        console.print("\n\n[yellow]ユーザーによって中断されました。[/yellow]")
        raise typer.Exit(EXIT_FAILED) from None
    except Exception as e:
        print_error(f"予期しないエラーが発生しました: {e}")
        raise typer.Exit(EXIT_FAILED) from None


@app.command()
def validate(
    config: ConfigArgument,
    degree: DegreeOption = None,
    partition: PartitionOption = None,
    threads: ThreadsOption = 1,
    output: OutputOption = None,
) -> None:
    """格子・被覆・断片・プローブ関手・降下データを検証します。"""
    run_stage(
        config,
        lambda r: r.validate(print_progress),
        "validate",
        degree,
        partition,
        threads,
        output,
    )


@app.command("glue-alg")
def glue_alg(
    config: ConfigArgument,
    degree: DegreeOption = None,
    partition: PartitionOption = None,
    threads: ThreadsOption = 1,
    output: OutputOption = None,
) -> None:
    """素朴な貼り合わせの表示を作り、大域代数と次元を比べます。"""
    run_stage(
        config,
        lambda r: r.glue_alg(print_progress),
        "glue-alg",
        degree,
        partition,
        threads,
        output,
    )


@app.command("glue-aqft")
def glue_aqft(
    config: ConfigArgument,
    degree: DegreeOption = None,
    partition: PartitionOption = None,
    threads: ThreadsOption = 1,
    output: OutputOption = None,
) -> None:
    """開集合ごとにオペラド的な貼り合わせの表示を作り、大域代数と次元を比べます。"""
    run_stage(
        config,
        lambda r: r.glue_aqft(print_progress),
        "glue-aqft",
        degree,
        partition,
        threads,
        output,
    )


@app.command("check-alg")
def check_alg(
    config: ConfigArgument,
    degree: DegreeOption = None,
    partition: PartitionOption = None,
    threads: ThreadsOption = 1,
    output: OutputOption = None,
) -> None:
    """素朴な貼り合わせの比較写像が同型かどうかを判定します。"""
    run_stage(
        config,
        lambda r: r.check_alg(print_progress),
        "check-alg",
        degree,
        partition,
        threads,
        output,
    )


@app.command("check-aqft")
def check_aqft(
    config: ConfigArgument,
    degree: DegreeOption = None,
    partition: PartitionOption = None,
    threads: ThreadsOption = 1,
    output: OutputOption = None,
) -> None:
    """開集合ごとに余単位が同型かどうかを判定します。"""
    run_stage(
        config,
        lambda r: r.check_aqft(print_progress),
        "check-aqft",
        degree,
        partition,
        threads,
        output,
    )


@app.command()
def report(
    config: ConfigArgument,
    degree: DegreeOption = None,
    partition: PartitionOption = None,
    threads: ThreadsOption = 1,
    output: OutputOption = None,
) -> None:
    """すべての段階を実行してレポートを書き出します。"""
    run_stage(
        config,
        lambda r: r.run_all(print_progress),
        None,
        degree,
        partition,
        threads,
        output,
    )


def main() -> None:
    """メインエントリーポイント"""
    app()


if __name__ == "__main__":
    main()
