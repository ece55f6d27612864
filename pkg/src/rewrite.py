"""次数打ち切りつきの非可換完備化と正規形

このモジュールは、自由∗代数の両側イデアルに対するダイヤモンド補題型の完備化
（Bergman / Buchberger 型）を提供します。完備化された規則集合を使って
正規形の計算、イデアル所属判定、次数つき次元の計算を行います。

主な機能:
    - reduce: 規則による正規形（既定は最大の項から、最左の一致で書き換え）
    - reduce_with_trace: 書き換えの各手順 (c, u, 規則, v) を記録する
    - complete: 曖昧性を sugar の昇順に解消し、次数上限 D を超えるものは打ち切りログへ
    - ideal_member / graded_dimension: 次数 D − 1 以下で正しい判定・次元
    - rules_to_text / rules_from_text: 規則集合の正準テキスト形式

打ち切りの健全性:
    各関係式・規則は sugar 次数をもちます。曖昧性は sugar の昇順に処理され、
    sugar が D を超えるものは処理せずログに記録します。これは中心的な次数 1 の
    目印で斉次化してから次数 D まで完備化することに相当し、次数 D − 1 以下の
    問い合わせに対しては打ち切りなしのイデアルと同じ答えを返します。

使用例:
    pres = AlgebraPresentation(table, (relator,), star_closed=True, degree_bound=4)
    done = complete(pres, progress_callback=print)
    ideal_member(query, done)
    graded_dimension(done, 2)
"""

import heapq
import itertools
import random
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

from src.exactalg import (
    GeneratorTable,
    NCPoly,
    Scalar,
    Word,
    add_term,
    star,
    word_key,
)
from src.exceptions import ResourceError, UsageError

DEFAULT_RULE_CAP = 20000
SOUNDNESS_MARGIN = 1


@dataclass(frozen=True)
class RewriteRule:
    """書き換え規則 lhs → rhs（rhs の語はすべて lhs より小さい）"""

    lhs: Word
    rhs: NCPoly
    sugar: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        key = word_key(self.lhs)
        for w in self.rhs.terms:
            if word_key(w) >= key:
                raise UsageError(
                    f"規則の右辺に左辺以上の語があります: {self.rhs.table.word_text(w)}"
                )

    @property
    def table(self) -> GeneratorTable:
        return self.rhs.table

    def as_relator(self) -> NCPoly:
        return NCPoly.monomial(self.table, self.lhs) - self.rhs

    def to_text(self) -> str:
        return f"{self.table.word_text(self.lhs)} -> {self.rhs.to_text()}"


@dataclass(frozen=True)
class AlgebraPresentation:
    """
    生成子と関係式による∗代数の表示

    Attributes:
        table: 生成子表
        relators: 関係式（= 0 とおく多項式）
        star_closed: True のとき、各関係式の∗像も関係式として扱う
        degree_bound: 完備化の次数上限 D
        rules: 完備化済みの規則（未完備化なら None）
        truncation_log: 完備化で打ち切った曖昧性の記録
        name: ログやレポートでの表示名
    """

    table: GeneratorTable
    relators: tuple[NCPoly, ...] = ()
    star_closed: bool = True
    degree_bound: int = 4
    rules: Optional[tuple[RewriteRule, ...]] = None
    truncation_log: tuple[str, ...] = ()
    name: str = ""

    def all_relators(self) -> list[NCPoly]:
        if not self.star_closed:
            return list(self.relators)
        out = list(self.relators)
        for r in self.relators:
            s = star(r)
            if s != r:
                out.append(s)
        return out


class _RuleIndex:
    """左辺の語から規則を引くための索引"""

    def __init__(self, rules: Sequence[RewriteRule] = ()) -> None:
        self.by_lhs: dict[Word, RewriteRule] = {}
        self.lengths: list[int] = []
        for rule in rules:
            self.add(rule)

    def add(self, rule: RewriteRule) -> None:
        self.by_lhs[rule.lhs] = rule
        self._refresh()

    def remove(self, lhs: Word) -> None:
        del self.by_lhs[lhs]
        self._refresh()

    def _refresh(self) -> None:
        self.lengths = sorted({len(lhs) for lhs in self.by_lhs})

    def first_match(self, word: Word) -> Optional[tuple[int, RewriteRule]]:
        """最左の位置で（同じ位置では最短の）一致する規則を返す"""
        by_lhs = self.by_lhs
        n = len(word)
        for pos in range(n + 1):
            for length in self.lengths:
                if pos + length > n:
                    break
                rule = by_lhs.get(word[pos : pos + length])
                if rule is not None:
                    return pos, rule
        return None

    def all_matches(self, word: Word) -> list[tuple[int, RewriteRule]]:
        by_lhs = self.by_lhs
        n = len(word)
        out = []
        for pos in range(n + 1):
            for length in self.lengths:
                if pos + length > n:
                    break
                rule = by_lhs.get(word[pos : pos + length])
                if rule is not None:
                    out.append((pos, rule))
        return out

    def is_reducible(self, word: Word) -> bool:
        return self.first_match(word) is not None


@dataclass(frozen=True)
class ReductionStep:
    """書き換え 1 手: c·u·lhs·v を c·u·rhs·v に置き換えた"""

    coefficient: Scalar
    left: Word
    rule: RewriteRule
    right: Word


def _heap_key(word: Word) -> tuple[int, tuple[int, ...]]:
    # heapq は最小値を取り出すので、次数辞書式で大きい語ほど小さいキーにする
    return (-len(word), tuple(-g for g in word))


def _reduce_terms(
    terms: dict[Word, Scalar],
    index: _RuleIndex,
    trace: Optional[list[ReductionStep]] = None,
) -> dict[Word, Scalar]:
    heap = [_heap_key(w) for w in terms]
    heapq.heapify(heap)
    result: dict[Word, Scalar] = {}
    while heap:
        key = heapq.heappop(heap)
        word = tuple(-g for g in key[1])
        coef = terms.pop(word, None)
        if coef is None:
            continue
        match = index.first_match(word)
        if match is None:
            result[word] = coef
            continue
        pos, rule = match
        left, right = word[:pos], word[pos + len(rule.lhs) :]
        if trace is not None:
            trace.append(ReductionStep(coef, left, rule, right))
        for w, c in rule.rhs.terms.items():
            new_word = left + w + right
            before = new_word in terms
            add_term(terms, new_word, coef * c)
            if not before and new_word in terms:
                heapq.heappush(heap, _heap_key(new_word))
    return result


def _index_for(rules: Union[Sequence[RewriteRule], _RuleIndex]) -> _RuleIndex:
    if isinstance(rules, _RuleIndex):
        return rules
    return _RuleIndex(rules)


def reduce(
    p: NCPoly,
    rules: Union[Sequence[RewriteRule], _RuleIndex],
    rng: Optional[random.Random] = None,
) -> NCPoly:
    """
    規則集合で多項式を正規形まで書き換える

    Args:
        p: 書き換える多項式
        rules: 単項式順序に沿って向きづけられた規則
        rng: 指定した場合、書き換える項と一致位置を乱択する（合流性の検査用）

    Returns:
        NCPoly: どの左辺も部分語として含まない多項式
    """
    index = _index_for(rules)
    if rng is None:
        return NCPoly._raw(p.table, _reduce_terms(dict(p.terms), index))

    terms = dict(p.terms)
    while True:
        candidates = sorted((w for w in terms if index.is_reducible(w)), key=word_key)
        if not candidates:
            return NCPoly._raw(p.table, terms)
        word = rng.choice(candidates)
        pos, rule = rng.choice(index.all_matches(word))
        coef = terms.pop(word)
        left, right = word[:pos], word[pos + len(rule.lhs) :]
        for w, c in rule.rhs.terms.items():
            add_term(terms, left + w + right, coef * c)


def reduce_with_trace(
    p: NCPoly, rules: Sequence[RewriteRule]
) -> tuple[NCPoly, list[ReductionStep]]:
    """
    reduce と同じ正規形を計算し、書き換えの手順も返す

    p − reduce(p) = Σ c·u·(lhs − rhs)·v が手順の列から正確に復元できます。

    Returns:
        tuple[NCPoly, list[ReductionStep]]: 正規形と手順の列
    """
    trace: list[ReductionStep] = []
    normal = _reduce_terms(dict(p.terms), _index_for(rules), trace)
    return NCPoly._raw(p.table, normal), trace


def trace_difference(table: GeneratorTable, trace: Sequence[ReductionStep]) -> NCPoly:
    """手順の列から Σ c·u·(lhs − rhs)·v を組み立てる"""
    total = NCPoly.zero(table)
    for step in trace:
        u = NCPoly.monomial(table, step.left)
        v = NCPoly.monomial(table, step.right)
        total = total + (u * step.rule.as_relator() * v).scale(step.coefficient)
    return total


@dataclass(order=True)
class _Pending:
    sugar: int
    seq: int
    poly: Optional[NCPoly] = field(default=None, compare=False)
    pair: Optional[tuple[Word, Word, int]] = field(default=None, compare=False)


def _contains(word: Word, sub: Word) -> bool:
    n = len(sub)
    return any(word[i : i + n] == sub for i in range(len(word) - n + 1))


def _overlaps(a: RewriteRule, b: RewriteRule) -> Iterator[int]:
    """a の真の接尾辞と b の真の接頭辞が一致する長さ k を列挙する"""
    for k in range(1, min(len(a.lhs), len(b.lhs))):
        if a.lhs[-k:] == b.lhs[:k]:
            yield k


def complete(
    pres: AlgebraPresentation,
    rule_cap: int = DEFAULT_RULE_CAP,
    progress_callback: Optional[Callable[[str], None]] = None,
) -> AlgebraPresentation:
    """
    表示を次数上限 D まで完備化する

    曖昧性から作った S 多項式を sugar の昇順に既約化し、0 にならなければ
    新しい規則として追加します。次数 1 の関係式は sugar 1 なので最初に処理され、
    生成子の代入による消去として働きます（大きい生成子が消され、最小の
    ラベルが代表として残る）。

    Args:
        pres: 完備化する表示
        rule_cap: 規則数の上限
        progress_callback: 進行状況を通知するコールバック関数

    Returns:
        AlgebraPresentation: rules と truncation_log を埋めた表示

    Raises:
        UsageError: 関係式の次数が D を超える場合
        ResourceError: 規則数が上限を超えた場合（途中までのログつき）
    """
    bound = pres.degree_bound
    table = pres.table
    relators = [r for r in pres.all_relators() if r]
    too_high = [r for r in relators if r.degree() > bound]
    if too_high:
        raise UsageError(
            f"次数上限 D={bound} が関係式の次数 {too_high[0].degree()} より小さいです",
            pres.name or None,
        )

    if progress_callback:
        progress_callback(f"完備化を開始します: 関係式 {len(relators)} 個, 次数上限 {bound}")

    counter = itertools.count()
    queue: list[_Pending] = []
    for r in relators:
        heapq.heappush(queue, _Pending(r.degree(), next(counter), poly=r))

    index = _RuleIndex()
    log: list[str] = []
    processed = 0

    def ambiguity_text(a: Word, b: Word, k: int) -> str:
        return table.word_text(a + b[k:])

    while queue:
        item = heapq.heappop(queue)
        if item.sugar > bound:
            # 以降はすべて sugar > D
            for rest in [item] + sorted(queue):
                if rest.pair is not None:
                    a, b, k = rest.pair
                    log.append(
                        f"打ち切り: 曖昧性 {ambiguity_text(a, b, k)} (sugar {rest.sugar} > D={bound})"
                    )
            break

        if item.pair is not None:
            a_lhs, b_lhs, k = item.pair
            rule_a = index.by_lhs.get(a_lhs)
            rule_b = index.by_lhs.get(b_lhs)
            if rule_a is None or rule_b is None:
                continue
            # W = A·B·C, lhs_a = A·B, lhs_b = B·C
            prefix = a_lhs[:-k]
            suffix = b_lhs[k:]
            poly = rule_a.rhs * NCPoly.monomial(table, suffix) - NCPoly.monomial(
                table, prefix
            ) * rule_b.rhs
        else:
            assert item.poly is not None
            poly = item.poly

        processed += 1
        h = reduce(poly, index)
        if h.is_zero:
            continue

        lhs = h.leading_word()
        lead = h.coefficient(lhs)
        rhs = (NCPoly.monomial(table, lhs, lead) - h).scale(lead.inverse())
        new_rule = RewriteRule(lhs, rhs, item.sugar)

        for old in list(index.by_lhs.values()):
            if _contains(old.lhs, lhs):
                index.remove(old.lhs)
                heapq.heappush(queue, _Pending(old.sugar, next(counter), poly=old.as_relator()))
        index.add(new_rule)

        if not lhs:
            # 1 がイデアルに入った: 零代数
            log.append("関係式から 1 = 0 が導かれました")
            break

        for other in list(index.by_lhs.values()):
            pairs = [(new_rule, other), (other, new_rule)] if other is not new_rule else [
                (new_rule, new_rule)
            ]
            for a, b in pairs:
                for k in _overlaps(a, b):
                    sugar = max(a.sugar + len(b.lhs) - k, b.sugar + len(a.lhs) - k)
                    heapq.heappush(queue, _Pending(sugar, next(counter), pair=(a.lhs, b.lhs, k)))

        if len(index.by_lhs) > rule_cap:
            log.append(f"規則数が上限 {rule_cap} を超えました")
            raise ResourceError(
                f"完備化の規則数が上限 {rule_cap} を超えました", pres.name or None, log
            )
        if progress_callback and processed % 500 == 0:
            progress_callback(f"完備化中: 処理 {processed} 件, 規則 {len(index.by_lhs)} 個")

    final = _inter_reduce(list(index.by_lhs.values()))
    if progress_callback:
        progress_callback(f"完備化が完了しました: 規則 {len(final)} 個, 打ち切り {len(log)} 件")
    return replace(pres, rules=tuple(final), truncation_log=tuple(log))


def _inter_reduce(rules: list[RewriteRule]) -> list[RewriteRule]:
    """各規則の右辺を他の規則で既約にし、左辺の順に並べる"""
    index = _RuleIndex(rules)
    out = []
    for rule in sorted(rules, key=lambda r: word_key(r.lhs)):
        rhs = NCPoly._raw(rule.table, _reduce_terms(dict(rule.rhs.terms), index))
        out.append(RewriteRule(rule.lhs, rhs, rule.sugar))
    return out


def _completed(pres: AlgebraPresentation) -> tuple[RewriteRule, ...]:
    if pres.rules is None:
        pres = complete(pres)
    assert pres.rules is not None
    return pres.rules


def safe_degree(pres: AlgebraPresentation) -> int:
    """判定が正しい最大の次数 D − 1"""
    return pres.degree_bound - SOUNDNESS_MARGIN


def _check_safe(pres: AlgebraPresentation, degree: int) -> None:
    if degree > safe_degree(pres):
        raise UsageError(
            f"次数 {degree} は安全範囲外です: 次数上限 D ≥ {degree + SOUNDNESS_MARGIN} が必要です",
            pres.name or None,
        )


def normal_form(p: NCPoly, pres: AlgebraPresentation) -> NCPoly:
    """表示の完備化規則による正規形"""
    return reduce(p, _completed(pres))


def ideal_member(p: NCPoly, pres: AlgebraPresentation) -> bool:
    """
    p が関係式の生成する両側イデアルに属するか判定する

    Raises:
        UsageError: p の次数が D − 1 を超える場合
    """
    _check_safe(pres, p.degree())
    return normal_form(p, pres).is_zero


def irreducible_words(pres: AlgebraPresentation, d: int) -> list[Word]:
    """完備化規則で既約な長さ d の語（単項式基底）を辞書式順に列挙する"""
    _check_safe(pres, d)
    index = _RuleIndex(_completed(pres))
    if () in index.by_lhs:
        return []
    n = len(pres.table)
    max_len = index.lengths[-1] if index.lengths else 0
    out: list[Word] = []

    def extend(prefix: Word) -> None:
        if len(prefix) == d:
            out.append(prefix)
            return
        for g in range(n):
            word = prefix + (g,)
            # 新しい文字で終わる部分語だけを調べればよい
            tail = word[-max_len:] if max_len else ()
            if any(tail[i:] in index.by_lhs for i in range(len(tail))):
                continue
            extend(word)

    extend(())
    return out


def graded_dimension(pres: AlgebraPresentation, d: int) -> int:
    """
    次数 d の既約語の個数（付随する次数つき代数の次数 d 部分の次元）

    Raises:
        UsageError: d が D − 1 を超える場合
    """
    return len(irreducible_words(pres, d))


def graded_dimensions(pres: AlgebraPresentation, max_degree: int) -> dict[int, int]:
    return {d: graded_dimension(pres, d) for d in range(max_degree + 1)}


def is_star_closed(pres: AlgebraPresentation) -> bool:
    """すべての関係式の∗像が完備化規則で 0 に書き換わるか"""
    rules = _completed(pres)
    return all(reduce(star(r), rules).is_zero for r in pres.relators)


def rules_to_text(rules: Sequence[RewriteRule]) -> str:
    """規則集合を 1 行 1 規則の正準テキストに変換する"""
    return "\n".join(rule.to_text() for rule in sorted(rules, key=lambda r: word_key(r.lhs)))


def rules_from_text(table: GeneratorTable, text: str) -> list[RewriteRule]:
    rules = []
    for line in text.splitlines():
        if not line.strip():
            continue
        lhs_text, sep, rhs_text = line.partition(" -> ")
        if not sep:
            raise UsageError(f"規則の行に ' -> ' がありません: {line!r}")
        lhs = table.parse_word(lhs_text)
        rules.append(RewriteRule(lhs, NCPoly.from_text(table, rhs_text), len(lhs)))
    return rules
