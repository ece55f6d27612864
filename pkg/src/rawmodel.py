"""貼り合わせの形式モデルによる照合

オペラド的な貼り合わせ glue(𝔄)(U) は、形式的な生成子
ι(o ⊗ a₁ ⊗ … ⊗ a_n)（o は U に値をとる n 項演算、a_k はパッチ代数の元）を、
オペラドの合成・Σ_n 余不変・重なりの同型で割ったものです。
このモジュールは n ≤ 2、次数 ≤ 2 の範囲でこの形式モデルを列挙し、
関係式の張る空間の階数から濾過つき次元を求めて、descent の表示と照合します。

形式的な生成子:
    - e: 0 項演算（単位元）
    - u(V, α, w): 包含 V → U と 𝔄_α(V) の PBW 語 w（昇順のサイト列）
    - b(o, α₀, α₁, x_i, x_j): 1 点集合 {i}, {j} を始域とする 2 項演算の正準代表 o と、
      次数 1 の入力の組

関係式:
    単位、1 項演算との合成による制限、同じラベルの入力の積、Σ₂ の作用、
    重なりの同型によるラベルの付け替え

使用例:
    model = build_raw_model(datum, datum.lattice.sites)
    filtered_dimensions(model, 2)
"""

import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Callable, Optional

from src.descent import DescentDatum, naive_glue, operadic_glue
from src.exactalg import ONE, ZERO, Generator, NCPoly, Scalar, sparse_rank
from src.exceptions import UsageError
from src.lattice import Sites, sites_text
from src.operad import OperadOp, Permutation, action_order, canonicalize, perm_act
from src.orthcat import OpenFragment, intersection_closure, open_fragment
from src.probe import probe_presentation, probe_sites
from src.report import VERDICT_FAIL, VERDICT_PASS, CheckResult
from src.rewrite import AlgebraPresentation, complete, graded_dimensions, normal_form

SiteWord = tuple[int, ...]
Entry = tuple[str, SiteWord]

UNIT = "e"
UNARY = "u"
BINARY = "b"


@dataclass(frozen=True)
class FormalSymbol:
    """
    形式的な生成子

    Attributes:
        kind: "e", "u", "b" のいずれか
        entries: 入力ごとの (パッチ名, サイト列)
        region: u の始域となる開集合名
        op: b の 2 項演算（正準代表）
    """

    kind: str
    entries: tuple[Entry, ...] = ()
    region: str = ""
    op: Optional[OperadOp] = None

    @property
    def degree(self) -> int:
        return sum(len(w) for _, w in self.entries)

    def to_text(self) -> str:
        inputs = ", ".join(f"{label}:{''.join(f'x{i}' for i in w) or '1'}" for label, w in self.entries)
        if self.kind == UNIT:
            return "e"
        if self.kind == UNARY:
            return f"u({self.region}; {inputs})"
        assert self.op is not None
        return f"b({self.op.to_text()}; {inputs})"


Row = dict[FormalSymbol, Scalar]


@dataclass(frozen=True)
class RawModel:
    """
    形式モデル

    Attributes:
        region: 貼り合わせる開集合 U
        fragment: U の下の開集合の断片
        symbols: 形式的な生成子（列）
        relations: 関係式（行）
    """

    region: Sites
    fragment: OpenFragment
    symbols: tuple[FormalSymbol, ...]
    relations: tuple[Row, ...]


def raw_fragment(datum: DescentDatum, region: Iterable[int]) -> OpenFragment:
    """1 点集合、2 点集合、U ∩ M_α、それらの共通部分、U からなる断片"""
    u = frozenset(region)
    if not u:
        raise UsageError("空の開集合は貼り合わせられません")
    opens: list[Sites] = [frozenset({i}) for i in u]
    opens.extend(frozenset(p) for p in itertools.combinations(sorted(u), 2))
    opens.extend(piece for piece in datum.cover.restricted_to(u).values())
    opens.append(u)
    return open_fragment(datum.lattice, intersection_closure(opens))


def _labels_containing(datum: DescentDatum, sites: Sites) -> list[str]:
    return [label for label, patch in datum.cover.patches if sites <= patch]


def _word_coefficient(datum: DescentDatum, alpha: str, beta: str, word: SiteWord) -> Scalar:
    c = ONE
    for i in word:
        c = c * datum.transition(alpha, beta, i)
    return c


def _binary_ops(fragment: OpenFragment, target: str, sites: list[int]) -> list[OperadOp]:
    ops = set()
    for a, b in itertools.product(sites, repeat=2):
        g = (
            fragment.inclusion(sites_text({a}), target),
            fragment.inclusion(sites_text({b}), target),
        )
        for perm in (Permutation.identity(2), Permutation.transposition(2, 0)):
            ops.add(canonicalize(fragment, target, perm, g))
    return sorted(ops, key=lambda o: o.to_text())


def build_raw_model(
    datum: DescentDatum,
    region: Iterable[int],
    max_degree: int = 2,
    progress_callback: Optional[Callable[[str], None]] = None,
) -> RawModel:
    """
    U 上の形式モデルを列挙する

    Args:
        datum: 降下データ
        region: 貼り合わせる開集合 U
        max_degree: 入力の次数の合計の上限（2 まで）
        progress_callback: 進行状況を通知するコールバック関数

    Raises:
        UsageError: max_degree が 0 から 2 の範囲にない場合
    """
    if not 0 <= max_degree <= 2:
        raise UsageError(f"形式モデルは次数 2 までです: {max_degree}")
    u = frozenset(region)
    lat = datum.lattice
    fragment = raw_fragment(datum, u)
    target = sites_text(u)
    sites = probe_sites(lat, u)

    algebras: dict[str, AlgebraPresentation] = {}

    def algebra(name: str) -> AlgebraPresentation:
        if name not in algebras:
            algebras[name] = complete(probe_presentation(lat, fragment.regions[name], datum.degree_bound))
        return algebras[name]

    unit = FormalSymbol(UNIT)
    symbols: dict[FormalSymbol, None] = {unit: None}

    def unary(name: str, label: str, word: SiteWord) -> FormalSymbol:
        return FormalSymbol(UNARY, ((label, word),), region=name)

    for name in fragment.objects:
        local = probe_sites(lat, fragment.regions[name])
        for label in _labels_containing(datum, fragment.regions[name]):
            for d in range(max_degree + 1):
                for word in itertools.combinations_with_replacement(local, d):
                    symbols[unary(name, label, word)] = None

    binary_ops = _binary_ops(fragment, target, sites) if max_degree >= 2 else []
    for o in binary_ops:
        a, b = (min(fragment.regions[s]) for s in o.sources())
        for la, lb in itertools.product(datum.cover.labels_at(a), datum.cover.labels_at(b)):
            symbols[FormalSymbol(BINARY, ((la, (a,)), (lb, (b,))), op=o)] = None

    relations: list[Row] = []

    def relate(lhs: FormalSymbol, rhs: Mapping[FormalSymbol, Scalar]) -> None:
        row: Row = {lhs: ONE}
        for sym, c in rhs.items():
            row[sym] = row.get(sym, ZERO) - c
        relations.append(row)

    for sym in symbols:
        if sym.kind != UNARY:
            continue
        ((label, word),) = sym.entries
        if not word:
            relate(sym, {unit: ONE})
        v = fragment.regions[sym.region]
        for m in fragment.morphisms_from(sym.region):
            larger = fragment.morphism(m).target
            if larger != sym.region and fragment.regions[larger] <= datum.cover.patch(label):
                relate(sym, {unary(larger, label, word): ONE})
        for beta in _labels_containing(datum, v):
            if beta > label:
                relate(sym, {unary(sym.region, beta, word): _word_coefficient(datum, label, beta, word)})

    swap = Permutation.transposition(2, 0)
    for sym in list(symbols):
        if sym.kind != BINARY:
            continue
        assert sym.op is not None
        o = sym.op
        (la, wa), (lb, wb) = sym.entries
        swapped = FormalSymbol(BINARY, ((lb, wb), (la, wa)), op=perm_act(o, swap))
        relate(sym, {swapped: ONE})
        for k, (label, word) in enumerate(sym.entries):
            for beta in datum.cover.labels_at(word[0]):
                if beta > label:
                    moved = list(sym.entries)
                    moved[k] = (beta, word)
                    relate(
                        sym,
                        {FormalSymbol(BINARY, tuple(moved), op=o): _word_coefficient(datum, label, beta, word)},
                    )
        if la == lb:
            v = sites_text(set(wa + wb))
            pres = algebra(v)
            table = pres.table
            xs = [NCPoly.generator(table, table.index(Generator(w[0]))) for _, w in sym.entries]
            first, second = action_order(o)
            product = normal_form(xs[first] * xs[second], pres)
            relate(
                sym,
                {
                    unary(v, la, tuple(table[g].site for g in word)): c
                    for word, c in product.terms.items()
                },
            )

    if progress_callback:
        progress_callback(f"形式モデル: 生成子 {len(symbols)} 個, 関係式 {len(relations)} 個")
    return RawModel(u, fragment, tuple(symbols), tuple(relations))


def filtered_dimensions(model: RawModel, max_degree: int = 2) -> dict[int, int]:
    """
    濾過つき次元 dim F≤k（k ≤ max_degree）

    F≤k は次数 k 以下の形式的な生成子の像で、
    dim F≤k = |W_k| + rank(R を次数 > k の列に制限したもの) − rank(R) で求めます。
    """
    total = sparse_rank(model.relations)
    out = {}
    for k in range(max_degree + 1):
        low = sum(1 for s in model.symbols if s.degree <= k)
        high = sparse_rank(
            {s: c for s, c in row.items() if s.degree > k} for row in model.relations
        )
        out[k] = low + high - total
    return out


def cumulative(dims: Mapping[int, int]) -> dict[int, int]:
    """次数つき次元から濾過つき次元へ"""
    return dict(zip(sorted(dims), itertools.accumulate(dims[d] for d in sorted(dims))))


def raw_model_check(
    datum: DescentDatum,
    region: Optional[Iterable[int]] = None,
    name: str = "M",
    max_degree: int = 2,
    instance: str = "",
    progress_callback: Optional[Callable[[str], None]] = None,
) -> CheckResult:
    """形式モデルの濾過つき次元がオペラド的な貼り合わせの表示と一致するかを検査する"""
    u = datum.lattice.sites if region is None else frozenset(region)
    model = build_raw_model(datum, u, max_degree, progress_callback)
    raw = filtered_dimensions(model, max_degree)
    glued = cumulative(graded_dimensions(operadic_glue(datum, u, name).presentation, max_degree))
    naive = cumulative(graded_dimensions(naive_glue(datum, u, name), max_degree))
    mismatch = [k for k in raw if raw[k] != glued[k]]
    return CheckResult(
        instance=instance,
        open=name,
        check="raw_model",
        verdict=VERDICT_PASS if not mismatch else VERDICT_FAIL,
        witness=f"F≤{mismatch[0]}: {raw[mismatch[0]]} ≠ {glued[mismatch[0]]}" if mismatch else None,
        dims=raw,
        reference_dims=glued,
        details=(
            f"symbols {len(model.symbols)}, relations {len(model.relations)}",
            f"naive {sorted(naive.items())}",
        ),
    )
