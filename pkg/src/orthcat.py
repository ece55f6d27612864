"""有限直交圏と直交関手

このモジュールは、有限の表で与えられる圏に、共通の終域をもつ射の組の関係 ⊥ を
載せた直交圏を扱います。離散多様体の開集合の断片 O(M) の構築もここで行います。

主な機能:
    - OrthogonalCategory: 対象・射・合成表・恒等射・⊥
    - validate: 圏の公理、⊥ の対称性・合成安定性を検査し、違反を証拠つきで報告
    - open_fragment: 開集合のリストから包含の半順序圏を作る（⊥ は格子の直交性）
    - close_orthogonality: 種となる組を含む最小の対称・合成安定な関係
    - OrthogonalFunctor / apply_functor / inclusion_functor: 直交関手
    - random_poset_category: 乱択の有限直交圏（オペラド公理の検査用）

射の名前:
    包含 U ⊆ V は "U->V"、恒等射は "id_U"。空の開集合は対象として保持せず、
    共通部分が空の組は単に現れません。
"""

import itertools
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from src.exceptions import InvariantError, UsageError
from src.lattice import Lattice1D, Sites, orthogonal, sites_text
from src.report import ValidationReport, Violation, report_of

Relation = Callable[[Sites, Sites], bool]


@dataclass(frozen=True)
class Morphism:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class OrthogonalCategory:
    """
    有限直交圏

    Attributes:
        objects: 対象の名前
        morphisms: 射
        composition: (g, f) ↦ g∘f の名前（f の終域 = g の始域）
        identities: 対象 ↦ 恒等射の名前
        orthogonality: ⊥ に入る射の順序対
    """

    objects: tuple[str, ...]
    morphisms: tuple[Morphism, ...]
    composition: Mapping[tuple[str, str], str]
    identities: Mapping[str, str]
    orthogonality: frozenset[tuple[str, str]] = frozenset()
    _by_name: dict[str, Morphism] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_name", {m.name: m for m in self.morphisms})

    def morphism(self, name: str) -> Morphism:
        try:
            return self._by_name[name]
        except KeyError:
            raise UsageError("圏にない射です", name) from None

    def has_morphism(self, name: str) -> bool:
        return name in self._by_name

    def identity(self, obj: str) -> str:
        return self.identities[obj]

    def compose(self, g: str, f: str) -> str:
        """g∘f の名前"""
        if self.morphism(f).target != self.morphism(g).source:
            raise UsageError(f"合成できない射の組です: {g} ∘ {f}")
        return self.composition[(g, f)]

    def is_orthogonal(self, f1: str, f2: str) -> bool:
        return (f1, f2) in self.orthogonality

    def hom(self, source: str, target: str) -> list[str]:
        return [m.name for m in self.morphisms if m.source == source and m.target == target]

    def morphisms_into(self, target: str) -> list[str]:
        return [m.name for m in self.morphisms if m.target == target]

    def morphisms_from(self, source: str) -> list[str]:
        return [m.name for m in self.morphisms if m.source == source]

    def composable_pairs(self) -> list[tuple[str, str]]:
        """g∘f が定義される (g, f) の組"""
        return [
            (g.name, f.name) for f in self.morphisms for g in self.morphisms if f.target == g.source
        ]

    def with_orthogonality(self, pairs: Iterable[tuple[str, str]]) -> "OrthogonalCategory":
        return OrthogonalCategory(
            self.objects, self.morphisms, self.composition, self.identities, frozenset(pairs)
        )


@dataclass(frozen=True)
class OpenFragment(OrthogonalCategory):
    """格子の開集合からなる直交圏。各対象はサイト集合をもつ"""

    lattice: Optional[Lattice1D] = None
    regions: Mapping[str, Sites] = field(default_factory=dict)

    def inclusion(self, source: str, target: str) -> str:
        if source == target:
            return self.identity(source)
        if not self.regions[source] <= self.regions[target]:
            raise UsageError(f"包含関係にありません: {source} ⊄ {target}")
        return f"{source}->{target}"

    def object_for(self, sites: Iterable[int]) -> Optional[str]:
        s = frozenset(sites)
        for name, region in self.regions.items():
            if region == s:
                return name
        return None


def validate(c: OrthogonalCategory) -> ValidationReport:
    """
    圏の公理と ⊥ の公理を検査する

    Returns:
        ValidationReport: 違反ごとに (種類, 説明, 証拠となる射の組) を含む
    """
    violations: list[Violation] = []
    objs = set(c.objects)
    by_name = {m.name: m for m in c.morphisms}

    for m in c.morphisms:
        if m.source not in objs or m.target not in objs:
            violations.append(Violation("object", "射の始域・終域が対象にありません", m.name))
    for obj in c.objects:
        ident = c.identities.get(obj)
        if ident is None or ident not in by_name:
            violations.append(Violation("identity", "恒等射がありません", obj))
    if violations:
        return report_of("category", violations)

    for f in c.morphisms:
        for side, expected in (
            ("left", c.composition.get((c.identities[f.target], f.name))),
            ("right", c.composition.get((f.name, c.identities[f.source]))),
        ):
            if expected != f.name:
                violations.append(Violation("unit", f"{side} 単位律が成り立ちません", f.name))

    for g_name, f_name in c.composable_pairs():
        gf = c.composition.get((g_name, f_name))
        f, g = by_name[f_name], by_name[g_name]
        if gf is None or gf not in by_name:
            violations.append(Violation("closure", "合成が定義されていません", f"({g_name}, {f_name})"))
            continue
        if by_name[gf].source != f.source or by_name[gf].target != g.target:
            violations.append(Violation("closure", "合成の始域・終域が不正です", f"({g_name}, {f_name})"))

    if violations:
        return report_of("category", violations)

    for f in c.morphisms:
        for g_name in c.morphisms_from(f.target):
            for h_name in c.morphisms_from(by_name[g_name].target):
                left = c.composition[(h_name, c.composition[(g_name, f.name)])]
                right = c.composition[(c.composition[(h_name, g_name)], f.name)]
                if left != right:
                    violations.append(
                        Violation("associativity", "結合律が成り立ちません", f"({h_name}, {g_name}, {f.name})")
                    )

    for f1, f2 in sorted(c.orthogonality):
        if f1 not in by_name or f2 not in by_name:
            violations.append(Violation("orthogonality", "⊥ に圏にない射があります", f"({f1}, {f2})"))
            continue
        if by_name[f1].target != by_name[f2].target:
            violations.append(Violation("orthogonality", "⊥ の組の終域が異なります", f"({f1}, {f2})"))
            continue
        if (f2, f1) not in c.orthogonality:
            violations.append(Violation("symmetry", "⊥ が対称ではありません", f"({f1}, {f2})"))
        for witness, pair in _stability_moves(c, f1, f2):
            if pair not in c.orthogonality:
                violations.append(
                    Violation("stability", "⊥ が合成で閉じていません", f"{witness} -> {pair}")
                )
    return report_of("category", violations)


def _stability_moves(
    c: OrthogonalCategory, f1: str, f2: str
) -> list[tuple[tuple[str, str, str], tuple[str, str]]]:
    """(f1, f2) ∈ ⊥ から合成安定性で要求される組を (証拠の三つ組, 組) で返す"""
    target = c.morphism(f1).target
    out = []
    for h in c.morphisms_from(target):
        out.append(((h, f1, f2), (c.compose(h, f1), c.compose(h, f2))))
    for g1 in c.morphisms_into(c.morphism(f1).source):
        out.append(((f1, g1, f2), (c.compose(f1, g1), f2)))
    for g2 in c.morphisms_into(c.morphism(f2).source):
        out.append(((f2, g2, f1), (f1, c.compose(f2, g2))))
    return out


def close_orthogonality(
    c: OrthogonalCategory, seeds: Iterable[tuple[str, str]]
) -> OrthogonalCategory:
    """種の組を含む最小の対称かつ合成安定な ⊥ をもつ圏を返す"""
    relation: set[tuple[str, str]] = set()
    todo = list(seeds)
    while todo:
        f1, f2 = todo.pop()
        if (f1, f2) in relation:
            continue
        if c.morphism(f1).target != c.morphism(f2).target:
            raise UsageError(f"終域の異なる組は ⊥ に入れられません: ({f1}, {f2})")
        relation.add((f1, f2))
        todo.append((f2, f1))
        todo.extend(pair for _, pair in _stability_moves(c, f1, f2))
    return c.with_orthogonality(relation)


def intersection_closure(opens: Iterable[Iterable[int]]) -> list[Sites]:
    """開集合のリストを空でない共通部分について閉じたリストに広げる（整列済み）"""
    result = {frozenset(u) for u in opens if u}
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(result), 2):
            inter = a & b
            if inter and inter not in result:
                result.add(inter)
                changed = True
    return sorted(result, key=lambda s: (len(s), sorted(s)))


def open_fragment(
    lat: Lattice1D,
    opens: Union[Mapping[str, Iterable[int]], Sequence[Iterable[int]]],
    relation: Optional[Relation] = None,
) -> OpenFragment:
    """
    開集合の包含からなる半順序圏を作る

    Args:
        lat: 格子
        opens: 名前 ↦ サイト集合、または名前なしのサイト集合のリスト
               （名前は "{0,1,2}" の形になる）
        relation: ⊥ を決める関係。既定は格子の直交性（距離 2 以上）

    Returns:
        OpenFragment: 検証済みの直交圏

    Raises:
        UsageError: 空の開集合、重複、範囲外、共通部分で閉じていない場合
        InvariantError: 構築した圏が検証に通らない場合
    """
    if isinstance(opens, Mapping):
        named = {name: frozenset(sites) for name, sites in opens.items()}
    else:
        named = {}
        for sites in opens:
            s = frozenset(sites)
            named[sites_text(s)] = s
    if not named:
        raise UsageError("開集合のリストが空です")

    seen: dict[Sites, str] = {}
    for name, sites in named.items():
        if not sites:
            raise UsageError("空の開集合は対象にできません", name)
        if any(not 0 <= i < lat.n_sites for i in sites):
            raise UsageError("格子の範囲外のサイトを含みます", name)
        if sites in seen:
            raise UsageError(f"同じサイト集合の開集合が重複しています: {seen[sites]}", name)
        seen[sites] = name

    for (a, sa), (b, sb) in itertools.combinations(sorted(named.items()), 2):
        inter = sa & sb
        if inter and inter not in seen:
            raise UsageError(
                f"共通部分 {a} ∩ {b} = {sites_text(inter)} がリストにありません", f"{a}, {b}"
            )

    rel = relation or (lambda u, v: orthogonal(lat, u, v))
    objects = tuple(sorted(named))
    identities = {u: f"id_{u}" for u in objects}

    def arrow(u: str, v: str) -> str:
        return identities[u] if u == v else f"{u}->{v}"

    morphisms = []
    for u in objects:
        for v in objects:
            if named[u] <= named[v]:
                morphisms.append(Morphism(arrow(u, v), u, v))

    composition: dict[tuple[str, str], str] = {}
    for f in morphisms:
        for g in morphisms:
            if f.target == g.source:
                composition[(g.name, f.name)] = arrow(f.source, g.target)

    perp = set()
    for f1 in morphisms:
        for f2 in morphisms:
            if f1.target == f2.target and rel(named[f1.source], named[f2.source]):
                perp.add((f1.name, f2.name))

    fragment = OpenFragment(
        objects,
        tuple(morphisms),
        composition,
        identities,
        frozenset(perp),
        lattice=lat,
        regions=named,
    )
    report = validate(fragment)
    if not report.ok:
        raise InvariantError(f"開集合の断片が直交圏になっていません: {report.lines()[0]}")
    return fragment


@dataclass(frozen=True)
class OrthogonalFunctor:
    """直交関手。構築時に関手性と ⊥ の保存を検査する"""

    source: OrthogonalCategory
    target: OrthogonalCategory
    object_map: Mapping[str, str]
    morphism_map: Mapping[str, str]

    def __post_init__(self) -> None:
        for obj in self.source.objects:
            image = self.object_map.get(obj)
            if image is None or image not in self.target.objects:
                raise InvariantError("対象の像が終域の圏にありません", obj)
            if self.morphism_map.get(self.source.identity(obj)) != self.target.identity(image):
                raise InvariantError("恒等射が恒等射に移りません", obj)
        for m in self.source.morphisms:
            image = self.morphism_map.get(m.name)
            if image is None or not self.target.has_morphism(image):
                raise InvariantError("射の像が終域の圏にありません", m.name)
            im = self.target.morphism(image)
            if (im.source, im.target) != (self.object_map[m.source], self.object_map[m.target]):
                raise InvariantError("射の像の始域・終域が対象の像と一致しません", m.name)
        for g, f in self.source.composable_pairs():
            lhs = self.morphism_map[self.source.compose(g, f)]
            rhs = self.target.compose(self.morphism_map[g], self.morphism_map[f])
            if lhs != rhs:
                raise InvariantError("合成が保存されません", f"({g}, {f})")
        for f1, f2 in self.source.orthogonality:
            if not self.target.is_orthogonal(self.morphism_map[f1], self.morphism_map[f2]):
                raise InvariantError("⊥ が保存されません", f"({f1}, {f2})")


def apply_functor(functor: OrthogonalFunctor, f: str) -> str:
    """射の像"""
    if not functor.source.has_morphism(f):
        raise UsageError("関手の始域の圏にない射です", f)
    return functor.morphism_map[f]


def inclusion_functor(small: OpenFragment, large: OpenFragment) -> OrthogonalFunctor:
    """同じ格子上の断片の間の包含関手 ι（対象はサイト集合で対応させる）"""
    object_map = {}
    for obj in small.objects:
        image = large.object_for(small.regions[obj])
        if image is None:
            raise UsageError("大きい断片に対応する開集合がありません", obj)
        object_map[obj] = image
    morphism_map = {
        m.name: large.inclusion(object_map[m.source], object_map[m.target])
        for m in small.morphisms
    }
    return OrthogonalFunctor(small, large, object_map, morphism_map)


def random_poset_category(
    rng: random.Random, n_objects: int, n_seeds: int = 2
) -> OrthogonalCategory:
    """乱択の有限半順序圏に、乱択の種から閉包した ⊥ を載せる"""
    objects = tuple(f"o{i}" for i in range(n_objects))
    order = {(i, i) for i in range(n_objects)}
    for i, j in itertools.combinations(range(n_objects), 2):
        if rng.random() < 0.5:
            order.add((i, j))
    # 推移閉包
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(order), repeat=2):
            if b == c and (a, d) not in order:
                order.add((a, d))
                changed = True

    def arrow(i: int, j: int) -> str:
        return f"id_o{i}" if i == j else f"o{i}->o{j}"

    morphisms = tuple(Morphism(arrow(i, j), f"o{i}", f"o{j}") for i, j in sorted(order))
    composition = {
        (arrow(b, d), arrow(a, b)): arrow(a, d)
        for (a, b) in order
        for (c, d) in order
        if b == c
    }
    identities = {f"o{i}": arrow(i, i) for i in range(n_objects)}
    category = OrthogonalCategory(objects, morphisms, composition, identities)

    candidates = [
        (f.name, g.name)
        for f in morphisms
        for g in morphisms
        if f.target == g.target and f.name < g.name
    ]
    seeds = rng.sample(candidates, min(n_seeds, len(candidates)))
    return close_orthogonality(category, seeds)
