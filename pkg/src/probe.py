"""CCR プローブ AQFT

このモジュールは、開集合の断片 O(M) 上で正準交換関係（CCR）を満たす
∗代数を割り当てる関手を構築し、因果律や拡張・制限の随伴を検査します。

主な機能:
    - probe_presentation: 開集合 U に対する表示 x_j x_i − x_i x_j − i·τ(δ_j, δ_i)（i < j）
    - probe_morphism: 包含 U ⊆ V が誘導する生成子写像 x_i ↦ x_i
    - build_probe / ProbeAQFT: 断片上の関手（各表示は完備化済み）
    - causality_check: 直交する包含の組について交換子の正規形が 0 か
    - operad_action: 演算 [τ, g̲] の観測量への作用
    - extend_restrict / triangle_report: 開集合の包含に沿った拡張・制限と単位・余単位

線分格子では端点のサイトで 0 になる形式だけを扱うので、端点のサイトには
生成子を置きません。
"""

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Callable, Optional

from src.exactalg import (
    I_UNIT,
    Generator,
    GeneratorMap,
    GeneratorTable,
    NCPoly,
)
from src.exceptions import UsageError
from src.lattice import Lattice1D, Sites, delta_tau, sites_text
from src.operad import OperadOp, action_order
from src.orthcat import OpenFragment
from src.report import ValidationReport, Violation, report_of
from src.rewrite import (
    AlgebraPresentation,
    complete,
    ideal_member,
    is_star_closed,
    normal_form,
)

EMPTY_OPEN = "∅"


def probe_sites(lat: Lattice1D, region: Iterable[int]) -> list[int]:
    """生成子を置くサイト（線分格子の端点を除く）"""
    return sorted(i for i in set(region) if lat.is_interior(lat.delta(i)))


def ccr_relator(lat: Lattice1D, table: GeneratorTable, i: int, j: int) -> NCPoly:
    """x_j x_i − x_i x_j − i·τ(δ_j, δ_i)（表の番号で i < j）"""
    gi, gj = table[i], table[j]
    xi = NCPoly.generator(table, i)
    xj = NCPoly.generator(table, j)
    return xj * xi - xi * xj - I_UNIT * delta_tau(lat, gj.site, gi.site)


def probe_presentation(
    lat: Lattice1D,
    region: Iterable[int],
    degree_bound: int = 4,
    name: Optional[str] = None,
) -> AlgebraPresentation:
    """
    開集合 U の CCR 表示

    Raises:
        UsageError: U が空の場合（空の開集合は代数ではなく番兵で表す）
    """
    sites = frozenset(region)
    if not sites:
        raise UsageError("空の開集合には表示を割り当てません", EMPTY_OPEN)
    table = GeneratorTable.build(Generator(i) for i in probe_sites(lat, sites))
    relators = tuple(
        ccr_relator(lat, table, a, b) for a, b in itertools.combinations(range(len(table)), 2)
    )
    return AlgebraPresentation(
        table, relators, star_closed=True, degree_bound=degree_bound, name=name or sites_text(sites)
    )


def initial_presentation(degree_bound: int = 4) -> AlgebraPresentation:
    """生成子のない表示（初期∗代数 ℂ）"""
    return AlgebraPresentation(GeneratorTable(()), (), True, degree_bound, (), (), EMPTY_OPEN)


def site_map(source: GeneratorTable, target: GeneratorTable) -> GeneratorMap:
    """同じサイトの生成子どうしを対応させる写像（パッチ名は無視する）"""
    by_site = {(g.site, g.fiber): k for k, g in enumerate(target)}
    images = []
    for g in source:
        k = by_site.get((g.site, g.fiber))
        if k is None:
            raise UsageError(f"終域にサイト {g.site} の生成子がありません", g.name)
        images.append(NCPoly.generator(target, k))
    return GeneratorMap(source, target, tuple(images))


def probe_morphism(
    lat: Lattice1D, source: Iterable[int], target: Iterable[int]
) -> GeneratorMap:
    """
    包含 U ⊆ V が誘導する生成子写像

    Raises:
        UsageError: U ⊄ V の場合
    """
    u, v = frozenset(source), frozenset(target)
    if not u <= v:
        raise UsageError(f"包含関係にありません: {sites_text(u)} ⊄ {sites_text(v)}")
    return site_map(
        probe_presentation(lat, u).table, probe_presentation(lat, v).table
    )


@dataclass(frozen=True)
class ProbeAQFT:
    """
    断片上の CCR プローブ関手

    Attributes:
        lattice: 格子
        fragment: 開集合の断片
        presentations: 対象 ↦ 完備化済みの表示
        maps: 射 ↦ 生成子写像
    """

    lattice: Lattice1D
    fragment: OpenFragment
    presentations: Mapping[str, AlgebraPresentation]
    maps: Mapping[str, GeneratorMap] = field(default_factory=dict)

    @property
    def degree_bound(self) -> int:
        return next(iter(self.presentations.values())).degree_bound

    def presentation(self, obj: str) -> AlgebraPresentation:
        return self.presentations[obj]

    def generator(self, obj: str, site: int) -> NCPoly:
        table = self.presentations[obj].table
        return NCPoly.generator(table, table.index(Generator(site)))


def build_probe(
    lat: Lattice1D,
    fragment: OpenFragment,
    degree_bound: int = 4,
    progress_callback: Optional[Callable[[str], None]] = None,
) -> ProbeAQFT:
    """断片のすべての対象に完備化済みの表示を、すべての射に生成子写像を割り当てる"""
    presentations = {}
    for obj in fragment.objects:
        pres = probe_presentation(lat, fragment.regions[obj], degree_bound, name=obj)
        presentations[obj] = complete(pres)
    if progress_callback:
        progress_callback(f"プローブ代数を構築しました: 開集合 {len(presentations)} 個")
    maps = {
        m.name: site_map(presentations[m.source].table, presentations[m.target].table)
        for m in fragment.morphisms
    }
    return ProbeAQFT(lat, fragment, presentations, maps)


def validate_probe(A: ProbeAQFT) -> ValidationReport:
    """関手則、関係式の像のイデアル所属、∗閉性を検査する"""
    violations = []
    frag = A.fragment
    for g, f in frag.composable_pairs():
        direct = A.maps[frag.compose(g, f)]
        via = A.maps[f].then(A.maps[g])
        if direct != via:
            violations.append(Violation("functoriality", "合成が保存されません", f"({g}, {f})"))
    for m in frag.morphisms:
        target = A.presentations[m.target]
        for r in A.presentations[m.source].relators:
            if not ideal_member(A.maps[m.name].apply(r), target):
                violations.append(
                    Violation("morphism", "関係式の像がイデアルに入りません", f"{m.name}: {r.to_text()}")
                )
    for obj, pres in A.presentations.items():
        if not is_star_closed(pres):
            violations.append(Violation("star", "表示が∗で閉じていません", obj))
    return report_of("probe", violations)


def commutator(a: NCPoly, b: NCPoly) -> NCPoly:
    return a * b - b * a


def causality_check(A: ProbeAQFT) -> ValidationReport:
    """
    直交する包含の組 (U₁ ⊆ V, U₂ ⊆ V) のすべてのデルタ生成子の組について、
    𝔄(V) での交換子の正規形が 0 であることを検査する
    """
    frag = A.fragment
    violations = []
    checked: set[tuple[str, int, int]] = set()
    for f1, f2 in sorted(frag.orthogonality):
        m1, m2 = frag.morphism(f1), frag.morphism(f2)
        if f1 > f2 and (f2, f1) in frag.orthogonality:
            continue
        target = A.presentations[m1.target]
        s1 = [g.site for g in A.presentations[m1.source].table]
        s2 = [g.site for g in A.presentations[m2.source].table]
        for i in s1:
            for j in s2:
                key = (m1.target, min(i, j), max(i, j))
                if key in checked:
                    continue
                checked.add(key)
                nf = normal_form(
                    commutator(A.generator(m1.target, i), A.generator(m1.target, j)), target
                )
                if not nf.is_zero:
                    violations.append(
                        Violation(
                            "causality",
                            f"直交する組 ({f1}, {f2}) で交換子が 0 になりません",
                            f"[x{i}, x{j}] = {nf.to_text()}",
                        )
                    )
    return report_of("causality", violations)


def operad_action(A: ProbeAQFT, o: OperadOp, observables: Sequence[NCPoly]) -> NCPoly:
    """
    演算 [τ, g̲] を観測量 a_1, …, a_n に作用させる

    各 a_i を g_i に沿って押し出し、τ⁻¹(1), …, τ⁻¹(n) の順に掛けて
    終域の代数で正規形にします。
    """
    if len(observables) != o.arity:
        raise UsageError(f"観測量の個数 {len(observables)} が項数 {o.arity} と一致しません")
    target = A.presentations[o.target]
    pushed = [A.maps[g].apply(a) for g, a in zip(o.morphisms, observables)]
    product = NCPoly.one(target.table)
    for k in action_order(o):
        product = product * pushed[k]
    return normal_form(product, target)


@dataclass(frozen=True)
class ExtensionRestriction:
    """
    開集合の包含 ι: U ⊆ U′ に沿った拡張・制限と単位・余単位

    Attributes:
        open: 包含の始域 U の対象名
        restricted: U に含まれる対象 W ↦ 𝔄(W)（ι* 𝔄）
        extended: 大きい断片の対象 V ↦ 𝔄(V ∩ U)、交わらなければ初期表示（ι_! ι* 𝔄）
        unit: W ↦ 単位成分 ι*𝔄(W) → ι* ι_! ι*𝔄(W)
        counit: V ↦ 余単位成分 ι_! ι*𝔄(V) → 𝔄(V)
    """

    open: str
    restricted: Mapping[str, AlgebraPresentation]
    extended: Mapping[str, AlgebraPresentation]
    unit: Mapping[str, GeneratorMap]
    counit: Mapping[str, GeneratorMap]
    preimage: Mapping[str, Optional[str]]


def _identity_map(pres: AlgebraPresentation) -> GeneratorMap:
    return site_map(pres.table, pres.table)


def extend_restrict(A: ProbeAQFT, open_obj: str) -> ExtensionRestriction:
    """
    断片の対象 U への制限と、それを断片全体へ拡張したもの

    Raises:
        UsageError: V ∩ U が断片にない場合
    """
    frag = A.fragment
    region: Sites = frag.regions[open_obj]
    restricted = {w: A.presentations[w] for w in frag.objects if frag.regions[w] <= region}

    extended: dict[str, AlgebraPresentation] = {}
    counit: dict[str, GeneratorMap] = {}
    preimage: dict[str, Optional[str]] = {}
    for v in frag.objects:
        inter = frag.regions[v] & region
        if not inter:
            pres = initial_presentation(A.degree_bound)
            preimage[v] = None
        else:
            w = frag.object_for(inter)
            if w is None:
                raise UsageError(f"共通部分 {sites_text(inter)} が断片にありません", v)
            pres = A.presentations[w]
            preimage[v] = w
        extended[v] = pres
        counit[v] = site_map(pres.table, A.presentations[v].table)

    unit = {w: site_map(p.table, extended[w].table) for w, p in restricted.items()}
    return ExtensionRestriction(open_obj, restricted, extended, unit, counit, preimage)


def triangle_report(A: ProbeAQFT, er: ExtensionRestriction) -> ValidationReport:
    """単位が恒等写像であること、三角等式、余単位が包含写像であることを検査する"""
    violations = []
    for w, pres in er.restricted.items():
        ident = _identity_map(pres)
        if er.unit[w] != ident:
            violations.append(Violation("unit", "単位成分が恒等写像ではありません", w))
        # ι*(ε) ∘ η = id
        if er.unit[w].then(er.counit[w]) != ident:
            violations.append(Violation("triangle", "ι*ε ∘ η ≠ id", w))
    for v, pres in er.extended.items():
        w = er.preimage[v]
        if w is None:
            if len(pres.table):
                violations.append(Violation("extension", "交わらない開集合に初期表示がありません", v))
            continue
        # ε ι_! ∘ ι_! η = id
        composite = er.unit[w].then(_identity_map(er.extended[w]))
        if composite != _identity_map(pres):
            violations.append(Violation("triangle", "ε_{ι_!} ∘ ι_! η ≠ id", v))
        inclusion = A.maps[A.fragment.inclusion(w, v)]
        if er.counit[v] != inclusion:
            violations.append(Violation("counit", "余単位成分が包含写像と一致しません", v))
    return report_of(f"ext/res {er.open}", violations)
