"""ユーティリティ関数

このモジュールは、AQFT貼り合わせ検証ツール全体で使用される共通ユーティリティを提供します。

主な機能:
    - 設定読み込み: 必須キーの確認と pydantic による設定の検証
    - 1 の分割: 設定やファイルで指定された重みの読み込み
    - 出力: 出力ディレクトリの作成、JSON / テキストのレポート書き出し

設定ファイル:
    同梱の instance.schema.json は公開用の設定形式で、読み込みでは必須キーの一覧だけを
    使います。型・値の範囲・サイト番号の検査は pydantic のモデル InstanceConfig が行い、
    スキーマのキーとモデルのフィールドは一致させてあります。

使用例:
    config = load_config(Path("instances/z12.json"))
    lattice = config.lattice()
    write_reports(results, Path("reports"), config.name)
"""

import json
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.exceptions import ConfigError
from src.lattice import Cover, DiscreteForm, Lattice1D, Sites
from src.report import CheckResult, results_to_json, results_to_text

SCHEMA_PATH = Path(__file__).with_name("instance.schema.json")

Weight = Union[int, str]


@lru_cache(maxsize=1)
def load_schema() -> dict[str, Any]:
    """同梱の JSON スキーマを読み込む"""
    with SCHEMA_PATH.open(encoding="utf-8") as f:
        schema: dict[str, Any] = json.load(f)
    return schema


def parse_weight(value: Weight) -> Fraction:
    """
    重みを有理数に変換する

    Args:
        value: 整数、または "1/2" のような文字列

    Raises:
        ConfigError: 有理数として読めない場合
    """
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"重みを有理数として読めません: {value!r}") from e


def degree_bound_for(degree: int) -> int:
    """完備化の次数上限 D（判定次数 + 1 と 4 の大きいほう）"""
    return max(degree + 1, 4)


class InstanceConfig(BaseModel):
    """
    インスタンス設定

    Attributes:
        name: インスタンス名（レポートのファイル名にも使う）
        kind: "cycle" または "path"
        n_sites: サイト数 N
        transports: 辺ごとの平行移動 ±1（省略時はすべて +1）
        cover: パッチ名 ↦ サイトのリスト
        degree: 判定する次数の上限
        w_min: 被覆の重なり幅の下限
        test_opens: 開集合名 ↦ サイトのリスト
        test_pairs: theorem_alg で調べるサイトの組
        output: 出力ディレクトリ
        partition: パッチ名 ↦ 長さ N の重み（省略時は一様な分割）
        raw_model: 形式モデルとの照合を行うか
    """

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    name: str = Field(min_length=1)
    kind: Literal["cycle", "path"]
    n_sites: int = Field(alias="N", ge=2)
    transports: Optional[tuple[Literal[1, -1], ...]] = None
    cover: dict[str, tuple[int, ...]]
    degree: int = Field(default=3, ge=0)
    w_min: int = Field(default=2, ge=1)
    test_opens: dict[str, tuple[int, ...]] = Field(default_factory=dict)
    test_pairs: tuple[tuple[int, int], ...] = ()
    output: str = "reports"
    partition: Optional[dict[str, tuple[Weight, ...]]] = None
    raw_model: bool = False

    @model_validator(mode="after")
    def _check_ranges(self) -> "InstanceConfig":
        n = self.n_sites
        if self.kind == "cycle" and n < 3:
            raise ValueError(f"円周格子には N ≥ 3 が必要です: N={n}")
        if not self.cover:
            raise ValueError("被覆が空です")
        expected_edges = n if self.kind == "cycle" else n - 1
        if self.transports is not None and len(self.transports) != expected_edges:
            raise ValueError(f"transports の長さは {expected_edges} である必要があります")
        for group, entries in (("cover", self.cover), ("test_opens", self.test_opens)):
            for key, sites in entries.items():
                if not sites:
                    raise ValueError(f"{group}.{key} が空です")
                bad = sorted(i for i in sites if not 0 <= i < n)
                if bad:
                    raise ValueError(f"{group}.{key} に範囲外のサイトがあります: {bad}")
        for pair in self.test_pairs:
            if any(not 0 <= i < n for i in pair):
                raise ValueError(f"test_pairs に範囲外のサイトがあります: {list(pair)}")
        if self.partition is not None:
            if sorted(self.partition) != sorted(self.cover):
                raise ValueError("partition のキーが cover と一致しません")
            for key, weights in self.partition.items():
                if len(weights) != n:
                    raise ValueError(f"partition.{key} の長さは N={n} である必要があります")
        return self

    def lattice(self) -> Lattice1D:
        if self.kind == "cycle":
            return Lattice1D.cycle(self.n_sites, self.transports)
        return Lattice1D.path(self.n_sites, self.transports)

    def cover_sets(self) -> Cover:
        return Cover.from_mapping(self.cover)

    def opens(self) -> dict[str, Sites]:
        return {name: frozenset(sites) for name, sites in self.test_opens.items()}

    def partition_forms(self, lat: Lattice1D) -> Optional[dict[str, DiscreteForm]]:
        if self.partition is None:
            return None
        return {
            label: lat.form({i: parse_weight(w) for i, w in enumerate(weights)})
            for label, weights in self.partition.items()
        }


def _read_json(path: Path) -> Any:
    try:
        with path.open(encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise ConfigError(f"ファイルを読み込めません: {e}", str(path)) from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON として読めません: {e}", str(path)) from e


def load_config(path: Path) -> InstanceConfig:
    """
    インスタンス設定を読み込んで検証する

    必須キーの有無はスキーマの required で確かめ、それ以外の検査はすべて
    InstanceConfig（pydantic）に任せます。

    Args:
        path: 設定ファイルのパス

    Returns:
        InstanceConfig: 検証済みの設定

    Raises:
        ConfigError: 読み込めない、JSON が壊れている、必須キーがない、
                     モデルの検証に失敗した（型・範囲・未知のキー）場合
    """
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ConfigError("設定はオブジェクトである必要があります", str(path))
    missing = [key for key in load_schema()["required"] if key not in data]
    if missing:
        raise ConfigError(f"必須キーがありません: {', '.join(missing)}", str(path))
    try:
        return InstanceConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(p) for p in first["loc"]) or "(root)"
        raise ConfigError(f"設定が不正です: {location}: {first['msg']}", str(path)) from e


def load_partition(path: Path, lat: Lattice1D) -> dict[str, DiscreteForm]:
    """
    1 の分割をファイルから読み込む

    ファイルはパッチ名 ↦ 長さ N の重みのリストからなる JSON オブジェクトです。

    Raises:
        ConfigError: 読み込めない、または形式が不正な場合
    """
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ConfigError("1 の分割はオブジェクトである必要があります", str(path))
    forms = {}
    for label, weights in data.items():
        if not isinstance(weights, list) or len(weights) != lat.n_sites:
            raise ConfigError(f"{label} の重みは長さ {lat.n_sites} のリストである必要があります", str(path))
        forms[label] = lat.form({i: parse_weight(w) for i, w in enumerate(weights)})
    return forms


def create_output_directory(output_dir: Path) -> None:
    """
    出力ディレクトリが存在しない場合は作成する

    Args:
        output_dir: 出力ディレクトリパス
    """
    output_dir.mkdir(parents=True, exist_ok=True)


def write_reports(
    results: list[CheckResult], output_dir: Path, instance: str
) -> tuple[Path, Path]:
    """
    JSON とテキストのレポートを書き出す

    Returns:
        tuple[Path, Path]: JSON レポートとテキストレポートのパス
    """
    create_output_directory(output_dir)
    json_path = output_dir / f"{instance}.json"
    text_path = output_dir / f"{instance}.txt"
    json_path.write_text(results_to_json(results), encoding="utf-8")
    text_path.write_text(results_to_text(results, title=instance), encoding="utf-8")
    return json_path, text_path
