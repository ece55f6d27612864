"""AQFT 彩色∗オペラド

このモジュールは、有限直交圏 C̄ = (C, ⊥) 上の AQFT オペラドの演算を扱います。
n 項の演算は組 (τ, g̲)（τ ∈ Σ_n、g̲ は共通の終域 t をもつ n 本の射）の
同値類で、隣り合う直交した射の入れ替えで生成される同値 ∼⊥ で割ったものです。

主な機能:
    - Permutation: 置換（恒等・反転 ρ_n・ブロック置換・ブロック和）
    - canonicalize: 同値類の代表（軌道内で τ の像が辞書式最小のもの）
    - compose / perm_act / star_op / identity_op: オペラドの構造
    - multifunctor_apply: 直交関手が誘導する∗マルチ関手
    - action_order: 演算が観測量を掛ける順序 τ⁻¹(1), …, τ⁻¹(n)
    - axiom_suite: 単位律・結合律・同変性・∗両立性などの実行可能な検査

規約:
    置換は 0 始まりの像のタプルで、(στ)(i) = σ(τ(i))。射のタプルへは右から
    (g̲σ)_i = g_{σ(i)} で作用します。テキスト形式は "[τ の像 | g1,...,gn -> t]" です。
"""

import itertools
import random
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

from src.exceptions import ResourceError, UsageError
from src.orthcat import OrthogonalCategory, OrthogonalFunctor
from src.report import ValidationReport, Violation, report_of

DEFAULT_ORBIT_CAP = 10080


@dataclass(frozen=True)
class Permutation:
    """置換 i ↦ images[i]"""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            raise UsageError(f"全単射ではありません: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def reversal(cls, n: int) -> "Permutation":
        """ρ_n"""
        return cls(tuple(range(n - 1, -1, -1)))

    @classmethod
    def transposition(cls, n: int, k: int) -> "Permutation":
        """k と k+1 の互換"""
        images = list(range(n))
        images[k], images[k + 1] = images[k + 1], images[k]
        return cls(tuple(images))

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if len(self) != len(other):
            raise UsageError(f"大きさの異なる置換の積です: {len(self)} と {len(other)}")
        return Permutation(tuple(self.images[other.images[i]] for i in range(len(other))))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def act(self, items: Sequence[str]) -> tuple[str, ...]:
        """右作用 (g̲σ)_i = g_{σ(i)}"""
        return tuple(items[self.images[i]] for i in range(len(self.images)))

    def block(self, sizes: Sequence[int]) -> "Permutation":
        """
        ブロック置換 σ⟨k_1, …, k_m⟩

        sizes[j] 個ずつのブロックを σ に従って並べ替える置換で、
        ブロック σ(0), σ(1), … の順に元の位置を並べたものを像とします。
        """
        if len(sizes) != len(self):
            raise UsageError("ブロックの個数が置換の大きさと一致しません")
        offsets = list(itertools.accumulate([0] + list(sizes[:-1])))
        images: list[int] = []
        for j in range(len(self)):
            b = self.images[j]
            images.extend(offsets[b] + r for r in range(sizes[b]))
        return Permutation(tuple(images))

    @staticmethod
    def block_sum(perms: Sequence["Permutation"]) -> "Permutation":
        """σ_1 ⊕ … ⊕ σ_m"""
        images: list[int] = []
        offset = 0
        for p in perms:
            images.extend(offset + i for i in p.images)
            offset += len(p)
        return Permutation(tuple(images))

    def to_text(self) -> str:
        return " ".join(str(i) for i in self.images)


@dataclass(frozen=True)
class OperadOp:
    """
    演算 [τ, g̲] の正準代表

    Attributes:
        target: 終域の対象 t
        perm: 置換 τ
        morphisms: 終域 t をもつ射のタプル g̲
        orbit_size: ∼⊥ 軌道の大きさ
        category: 演算が属する直交圏
    """

    target: str
    perm: Permutation
    morphisms: tuple[str, ...]
    orbit_size: int = field(default=1, compare=False)
    category: Optional[OrthogonalCategory] = field(
        default=None, compare=False, hash=False, repr=False
    )

    @property
    def arity(self) -> int:
        return len(self.morphisms)

    def sources(self) -> tuple[str, ...]:
        assert self.category is not None
        return tuple(self.category.morphism(g).source for g in self.morphisms)

    def to_text(self) -> str:
        return f"[{self.perm.to_text()} | {','.join(self.morphisms)} -> {self.target}]"

    def _cat(self) -> OrthogonalCategory:
        if self.category is None:
            raise UsageError("圏をもたない演算です", self.to_text())
        return self.category


def _orbit(
    category: OrthogonalCategory,
    perm: Permutation,
    morphisms: tuple[str, ...],
    orbit_cap: int,
) -> list[Permutation]:
    """τ⁻¹ で並べた射の隣り合う直交な組を入れ替える操作で到達できる τ の集合"""
    n = len(morphisms)
    # 掛ける順序 h = τ⁻¹ の像で探索する
    start = perm.inverse().images
    seen = {start}
    queue = deque([start])
    while queue:
        order = queue.popleft()
        for k in range(n - 1):
            if category.is_orthogonal(morphisms[order[k]], morphisms[order[k + 1]]):
                nxt = list(order)
                nxt[k], nxt[k + 1] = nxt[k + 1], nxt[k]
                t = tuple(nxt)
                if t not in seen:
                    seen.add(t)
                    if len(seen) > orbit_cap:
                        raise ResourceError(
                            f"∼⊥ 軌道の大きさが上限 {orbit_cap} を超えました",
                            f"[{' '.join(map(str, perm.images))} | {','.join(morphisms)}]",
                        )
                    queue.append(t)
    return [Permutation(order).inverse() for order in seen]


def canonicalize(
    category: OrthogonalCategory,
    target: str,
    perm: Permutation,
    morphisms: Sequence[str],
    orbit_cap: int = DEFAULT_ORBIT_CAP,
) -> OperadOp:
    """
    [τ, g̲] の正準代表を返す

    Raises:
        UsageError: 射の終域が t でない、または置換の大きさが合わない場合
        ResourceError: 軌道が orbit_cap を超えた場合
    """
    g = tuple(morphisms)
    if len(perm) != len(g):
        raise UsageError(f"置換の大きさ {len(perm)} と射の個数 {len(g)} が一致しません")
    for i, name in enumerate(g):
        if category.morphism(name).target != target:
            raise UsageError(f"{i} 番目の射の終域が {target} ではありません", name)
    orbit = _orbit(category, perm, g, orbit_cap)
    best = min(orbit, key=lambda p: p.images)
    return OperadOp(target, best, g, len(orbit), category)


def orbit_of(o: OperadOp, orbit_cap: int = DEFAULT_ORBIT_CAP) -> list[Permutation]:
    """o の同値類に属する τ をすべて返す（像の辞書式順）"""
    return sorted(_orbit(o._cat(), o.perm, o.morphisms, orbit_cap), key=lambda p: p.images)


def identity_op(category: OrthogonalCategory, t: str) -> OperadOp:
    """1 項の恒等演算 [id_1, (id_t)]"""
    return OperadOp(t, Permutation.identity(1), (category.identity(t),), 1, category)


def unit_op(category: OrthogonalCategory, t: str) -> OperadOp:
    """0 項の演算（単位元）"""
    return OperadOp(t, Permutation.identity(0), (), 1, category)


def action_order(o: OperadOp) -> tuple[int, ...]:
    """観測量を掛ける順序 τ⁻¹(0), …, τ⁻¹(n−1)"""
    return o.perm.inverse().images


def compose(o: OperadOp, inner: Sequence[OperadOp]) -> OperadOp:
    """
    オペラドの合成 o ∘ (o_1, …, o_m)

    Raises:
        UsageError: 個数や色（対象）が一致しない場合。位置を含む
    """
    category = o._cat()
    if len(inner) != o.arity:
        raise UsageError(f"内側の演算の個数 {len(inner)} が項数 {o.arity} と一致しません", o.to_text())
    sources = o.sources()
    for j, x in enumerate(inner):
        if x.target != sources[j]:
            raise UsageError(
                f"{j} 番目の色が一致しません: {x.target} ≠ {sources[j]}", o.to_text()
            )

    offsets = list(itertools.accumulate([0] + [x.arity for x in inner[:-1]]))
    morphisms: list[str] = []
    for j, x in enumerate(inner):
        morphisms.extend(category.compose(o.morphisms[j], f) for f in x.morphisms)
    order: list[int] = []
    for j in action_order(o):
        order.extend(offsets[j] + r for r in action_order(inner[j]))
    perm = Permutation(tuple(order)).inverse()
    return canonicalize(category, o.target, perm, morphisms)


def perm_act(o: OperadOp, sigma: Permutation) -> OperadOp:
    """右作用 [τσ, g̲σ]"""
    if len(sigma) != o.arity:
        raise UsageError(f"置換の大きさ {len(sigma)} が項数 {o.arity} と一致しません", o.to_text())
    return canonicalize(o._cat(), o.target, o.perm * sigma, sigma.act(o.morphisms))


def star_op(o: OperadOp) -> OperadOp:
    """∗-対合 [ρ_n τ, g̲]"""
    return canonicalize(o._cat(), o.target, Permutation.reversal(o.arity) * o.perm, o.morphisms)


def multifunctor_apply(functor: OrthogonalFunctor, o: OperadOp) -> OperadOp:
    """直交関手 F の像 [τ, Fg̲]"""
    if o.category is not None and o.category != functor.source:
        raise UsageError("関手の始域の圏の演算ではありません", o.to_text())
    return canonicalize(
        functor.target,
        functor.object_map[o.target],
        o.perm,
        tuple(functor.morphism_map[g] for g in o.morphisms),
    )


def random_op(
    category: OrthogonalCategory,
    rng: random.Random,
    arity: int,
    target: Optional[str] = None,
) -> OperadOp:
    t = target if target is not None else rng.choice(sorted(category.objects))
    into = sorted(category.morphisms_into(t))
    morphisms = [rng.choice(into) for _ in range(arity)]
    images = list(range(arity))
    rng.shuffle(images)
    return canonicalize(category, t, Permutation(tuple(images)), morphisms)


def _perturbed(o: OperadOp, rng: random.Random) -> OperadOp:
    """同じ同値類の別の代表（正準でなくてよい）"""
    perm = rng.choice(orbit_of(o))
    return OperadOp(o.target, perm, o.morphisms, o.orbit_size, o.category)


def all_ops(category: OrthogonalCategory, max_arity: int) -> list[OperadOp]:
    """項数 max_arity 以下のすべての同値類"""
    found: dict[OperadOp, None] = {}
    for t in sorted(category.objects):
        into = sorted(category.morphisms_into(t))
        for n in range(max_arity + 1):
            for morphisms in itertools.product(into, repeat=n):
                for images in itertools.permutations(range(n)):
                    found.setdefault(canonicalize(category, t, Permutation(images), morphisms))
    return list(found)


def _random_inner(
    category: OrthogonalCategory, rng: random.Random, sources: Sequence[str], max_arity: int
) -> list[OperadOp]:
    return [random_op(category, rng, rng.randint(0, max_arity), target=s) for s in sources]


def axiom_suite(
    category: OrthogonalCategory,
    rng: Optional[random.Random] = None,
    max_arity: int = 3,
    random_composites: int = 200,
    exhaustive: bool = True,
) -> ValidationReport:
    """
    オペラドの公理を実行して検査する

    Args:
        category: 直交圏
        rng: 乱数生成器（既定はシード 0）
        max_arity: 全数検査する演算の最大項数
        random_composites: 乱択の合成の検査回数
        exhaustive: False のとき全数検査を省き、乱択の検査だけを行う

    Returns:
        ValidationReport: 破れた公理を証拠つきで列挙したもの
    """
    rng = rng or random.Random(0)
    violations: list[Violation] = []

    def check(kind: str, ok: bool, witness: str) -> None:
        if not ok:
            violations.append(Violation(kind, f"{kind} が成り立ちません", witness))

    ops = all_ops(category, max_arity) if exhaustive else []
    for o in ops:
        w = o.to_text()
        check("star involution", star_op(star_op(o)) == o, w)
        check("left unit", compose(identity_op(category, o.target), [o]) == o, w)
        units = [identity_op(category, s) for s in o.sources()]
        check("right unit", compose(o, units) == o, w)
        check("action identity", perm_act(o, Permutation.identity(o.arity)) == o, w)
        for images in itertools.permutations(range(o.arity)):
            sigma = Permutation(images)
            check("action inverse", perm_act(perm_act(o, sigma), sigma.inverse()) == o, w)

    objects = sorted(category.objects)
    for _ in range(random_composites):
        t = rng.choice(objects)
        o = random_op(category, rng, rng.randint(1, max_arity), target=t)
        inner = _random_inner(category, rng, o.sources(), 2)
        outer = compose(o, inner)
        w = f"{o.to_text()} ∘ ({', '.join(x.to_text() for x in inner)})"

        leaves = _random_inner(category, rng, outer.sources(), 1)
        grouped = []
        pos = 0
        for x in inner:
            grouped.append(compose(x, leaves[pos : pos + x.arity]))
            pos += x.arity
        check("associativity", compose(outer, leaves) == compose(o, grouped), w)

        images = list(range(o.arity))
        rng.shuffle(images)
        sigma = Permutation(tuple(images))
        sizes = [x.arity for x in inner]
        lhs = compose(perm_act(o, sigma), [inner[sigma(j)] for j in range(o.arity)])
        check("equivariance (outer)", lhs == perm_act(outer, sigma.block(sizes)), w)

        inner_perms = []
        for x in inner:
            imgs = list(range(x.arity))
            rng.shuffle(imgs)
            inner_perms.append(Permutation(tuple(imgs)))
        lhs = compose(o, [perm_act(x, p) for x, p in zip(inner, inner_perms)])
        check("equivariance (inner)", lhs == perm_act(outer, Permutation.block_sum(inner_perms)), w)

        check("star compatibility", star_op(outer) == compose(star_op(o), [star_op(x) for x in inner]), w)
        check("star involution", star_op(star_op(outer)) == outer, w)

        perturbed = compose(_perturbed(o, rng), [_perturbed(x, rng) for x in inner])
        check("congruence", perturbed == outer, w)

    return report_of("operad", violations)
