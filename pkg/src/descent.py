"""降下データと貼り合わせ

このモジュールは、被覆に従属した降下データと、それを貼り合わせる 2 つの方法
（∗代数としての素朴な貼り合わせと、AQFT としてのオペラド的な貼り合わせ）を扱い、
大域的なプローブ代数との比較写像が同型かどうかを次数ごとに判定します。

主な機能:
    - DescentDatum / data_functor / validate_datum: パッチごとの代数と重なりの同型
    - naive_glue: パッチごとの CCR（R1）と重なりの同一視（R2）だけの表示
    - operadic_glue: R1・R2 に直交する生成子の交換関係（R3）を加えた表示
    - comparison_G / H_map: 素朴な貼り合わせから大域代数への比較写像とその切断
    - counit_L / L_inverse: オペラド的な貼り合わせの余単位とその逆
    - theorem_alg_verdict / theorem_aqft_verdict / unit_verdict: 次数つきの判定

生成子:
    貼り合わせの表示の生成子はラベルつき (α, i)（i ∈ U ∩ M_α）で、生成子表では
    パッチ名 α をもつ Generator として表します。ラベルの順は生成子の順序でもあるので、
    重なりの同一視を消去すると最小のラベルが代表として残ります。

使用例:
    datum = data_functor(probe, cover)
    naive = naive_glue(datum)
    result = theorem_alg_verdict(datum, [(3, 7)], degree=3)
"""

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from src.exactalg import (
    I_UNIT,
    ONE,
    Generator,
    GeneratorMap,
    GeneratorTable,
    NCPoly,
    Scalar,
    span_rank,
)
from src.exceptions import InvariantError, UsageError
from src.lattice import (
    Cover,
    DiscreteForm,
    Lattice1D,
    Sites,
    delta_tau,
    multiply,
    orthogonal,
    partition_of_unity,
    sites_text,
    tau,
    validate_cover,
    validate_partition,
)
from src.orthcat import open_fragment
from src.probe import ProbeAQFT, probe_presentation, probe_sites
from src.report import (
    VERDICT_FAIL,
    VERDICT_ISOMORPHISM,
    VERDICT_NOT_INJECTIVE,
    VERDICT_NOT_ISOMORPHISM,
    VERDICT_PASS,
    CheckResult,
    ValidationReport,
    Violation,
    report_of,
)
from src.rewrite import (
    AlgebraPresentation,
    complete,
    graded_dimensions,
    ideal_member,
    irreducible_words,
    normal_form,
)

Transitions = Mapping[tuple[str, str], Mapping[int, Scalar]]
Partition = Mapping[str, DiscreteForm]
ProgressCallback = Optional[Callable[[str], None]]


@dataclass(frozen=True)
class DescentDatum:
    """
    降下データ ({𝔄_α}, {𝔞_αβ})

    Attributes:
        lattice: 格子
        cover: 被覆
        patches: パッチ名 ↦ パッチの断片に制限したプローブ関手
        transitions: (α, β) ↦ 重なりのサイト i ↦ 𝔞_αβ(x_i) = c·x_i の係数 c
        degree_bound: 貼り合わせの表示の完備化次数 D
    """

    lattice: Lattice1D
    cover: Cover
    patches: Mapping[str, ProbeAQFT]
    transitions: Transitions = field(default_factory=dict)
    degree_bound: int = 4

    def overlap(self, alpha: str, beta: str) -> Sites:
        return self.cover.patch(alpha) & self.cover.patch(beta)

    def transition(self, alpha: str, beta: str, site: int) -> Scalar:
        """𝔞_αβ の x_i での係数（指定がなければ 1）"""
        return self.transitions.get((alpha, beta), {}).get(site, ONE)

    def with_transitions(self, transitions: Transitions) -> "DescentDatum":
        """重なりの同型を差し替えたデータ（検証は validate_datum で行う）"""
        return replace(self, transitions=transitions)

    def trivialization(self, alpha: str, site: int) -> Scalar:
        """
        s_α(i): 最小ラベルで 1 とし、(α, i) = c_αβ(i)·(β, i) と両立するように決めた符号

        (α, i) ↦ s_α(i)·x_i が重なりの同一視と両立します。
        """
        labels = self.cover.labels_at(site)
        base = labels[0]
        if alpha == base:
            return ONE
        return self.transition(base, alpha, site).inverse()


def restrict_probe(A: ProbeAQFT, region: Iterable[int]) -> ProbeAQFT:
    """断片のうち region に含まれる対象だけに制限したプローブ関手"""
    r = frozenset(region)
    frag = A.fragment
    names = {obj: frag.regions[obj] for obj in frag.objects if frag.regions[obj] <= r}
    if not names:
        raise UsageError(f"{sites_text(r)} に含まれる開集合が断片にありません")
    sub = open_fragment(A.lattice, names)
    return ProbeAQFT(
        A.lattice,
        sub,
        {obj: A.presentations[obj] for obj in sub.objects},
        {m.name: A.maps[m.name] for m in sub.morphisms},
    )


def data_functor(A: ProbeAQFT, cover: Cover) -> DescentDatum:
    """
    大域的な AQFT から、パッチへの制限と恒等な重なりの同型からなる降下データを作る

    Raises:
        UsageError: パッチが断片の対象にない場合
        InvariantError: 作ったデータが検証に通らない場合
    """
    patches = {}
    for label in cover.labels:
        if A.fragment.object_for(cover.patch(label)) is None:
            raise UsageError("パッチが開集合の断片にありません", label)
        patches[label] = restrict_probe(A, cover.patch(label))
    transitions = {}
    for alpha, beta in itertools.product(cover.labels, repeat=2):
        overlap = cover.patch(alpha) & cover.patch(beta)
        if overlap:
            transitions[(alpha, beta)] = {i: ONE for i in sorted(overlap)}
    datum = DescentDatum(A.lattice, cover, patches, transitions, A.degree_bound)
    report = validate_datum(datum)
    if not report.ok:
        raise InvariantError(f"降下データが不正です: {report.lines()[0]}")
    return datum


def validate_datum(datum: DescentDatum) -> ValidationReport:
    """
    𝔞_αα = id、コサイクル条件、可逆性、各 𝔞_αβ が∗代数の射であることを検査する
    """
    violations = []
    labels = datum.cover.labels
    lat = datum.lattice
    for (alpha, beta), coeffs in sorted(datum.transitions.items()):
        overlap = datum.overlap(alpha, beta)
        extra = sorted(set(coeffs) - overlap)
        if extra:
            violations.append(
                Violation("domain", f"𝔞_{alpha}{beta} が重なりの外で定義されています", str(extra))
            )
        for i, c in sorted(coeffs.items()):
            if not c.is_real:
                violations.append(
                    Violation("star", f"𝔞_{alpha}{beta} が∗を保ちません", f"x{i} ↦ {c}")
                )
    for alpha in labels:
        for i in sorted(datum.cover.patch(alpha)):
            if datum.transition(alpha, alpha, i) != ONE:
                violations.append(Violation("identity", f"𝔞_{alpha}{alpha} ≠ id", f"x{i}"))
    for alpha, beta in itertools.permutations(labels, 2):
        for i in sorted(datum.overlap(alpha, beta)):
            c = datum.transition(alpha, beta, i)
            if not c or datum.transition(beta, alpha, i) * c != ONE:
                violations.append(
                    Violation("inverse", f"𝔞_{beta}{alpha} が 𝔞_{alpha}{beta} の逆ではありません", f"x{i}")
                )
    for alpha, beta, gamma in itertools.permutations(labels, 3):
        triple = datum.overlap(alpha, beta) & datum.cover.patch(gamma)
        for i in sorted(triple):
            lhs = datum.transition(beta, gamma, i) * datum.transition(alpha, beta, i)
            if lhs != datum.transition(alpha, gamma, i):
                violations.append(
                    Violation("cocycle", f"𝔞_{beta}{gamma}∘𝔞_{alpha}{beta} ≠ 𝔞_{alpha}{gamma}", f"x{i}")
                )
    if violations:
        return report_of("descent datum", violations)

    for alpha, beta in itertools.permutations(labels, 2):
        overlap = datum.overlap(alpha, beta)
        if not probe_sites(lat, overlap):
            continue
        pres = complete(probe_presentation(lat, overlap, datum.degree_bound))
        table = pres.table
        images = tuple(
            NCPoly.generator(table, k).scale(datum.transition(alpha, beta, g.site))
            for k, g in enumerate(table)
        )
        twist = GeneratorMap(table, table, images)
        for r in pres.relators:
            if not ideal_member(twist.apply(r), pres):
                violations.append(
                    Violation("morphism", f"𝔞_{alpha}{beta} が関係式を保ちません", r.to_text())
                )
                break
    return report_of("descent datum", violations)


def labeled_table(datum: DescentDatum, region: Iterable[int]) -> GeneratorTable:
    """ラベルつき生成子 (α, i)（i ∈ U ∩ M_α）の表"""
    r = frozenset(region)
    gens = []
    for label, sites in datum.cover.patches:
        gens.extend(Generator(i, patch=label) for i in probe_sites(datum.lattice, sites & r))
    return GeneratorTable.build(gens)


def _label_gen(table: GeneratorTable, label: str, site: int) -> NCPoly:
    return NCPoly.generator(table, table.index(Generator(site, patch=label)))


def patchwise_ccr(datum: DescentDatum, table: GeneratorTable, region: Sites) -> list[NCPoly]:
    """R1: 各パッチ内の CCR"""
    out = []
    for label, sites in datum.cover.patches:
        local = probe_sites(datum.lattice, sites & region)
        for i, j in itertools.combinations(local, 2):
            xi, xj = _label_gen(table, label, i), _label_gen(table, label, j)
            out.append(xj * xi - xi * xj - I_UNIT * delta_tau(datum.lattice, j, i))
    return out


def overlap_identifications(
    datum: DescentDatum, table: GeneratorTable, region: Sites
) -> list[NCPoly]:
    """R2: (α, i) − c_αβ(i)·(β, i)（α < β、i ∈ U ∩ M_αβ）"""
    out = []
    for alpha, beta in itertools.combinations(datum.cover.labels, 2):
        for i in probe_sites(datum.lattice, datum.overlap(alpha, beta) & region):
            c = datum.transition(alpha, beta, i)
            out.append(_label_gen(table, alpha, i) - _label_gen(table, beta, i).scale(c))
    return out


def orthogonal_commutators(datum: DescentDatum, table: GeneratorTable) -> list[NCPoly]:
    """R3: 直交するサイトをもつラベルつき生成子の交換子"""
    out = []
    lat = datum.lattice
    for a, b in itertools.combinations(range(len(table)), 2):
        ga, gb = table[a], table[b]
        if orthogonal(lat, {ga.site}, {gb.site}):
            xa, xb = NCPoly.generator(table, a), NCPoly.generator(table, b)
            out.append(xb * xa - xa * xb)
    return out


def _region(datum: DescentDatum, region: Optional[Iterable[int]]) -> Sites:
    return datum.lattice.sites if region is None else frozenset(region)


def naive_glue(
    datum: DescentDatum,
    region: Optional[Iterable[int]] = None,
    name: str = "M",
    progress_callback: ProgressCallback = None,
) -> AlgebraPresentation:
    """
    ∗代数としての素朴な貼り合わせ A[ℳ]（R1 と R2 だけ）

    Returns:
        AlgebraPresentation: 完備化済みの表示
    """
    r = _region(datum, region)
    table = labeled_table(datum, r)
    relators = patchwise_ccr(datum, table, r) + overlap_identifications(datum, table, r)
    pres = AlgebraPresentation(
        table, tuple(relators), True, datum.degree_bound, name=f"naive({name})"
    )
    return complete(pres, progress_callback=progress_callback)


@dataclass(frozen=True)
class GluedPresentation:
    """
    オペラド的な貼り合わせ glue(𝔄)(U) の表示

    Attributes:
        name: 開集合名
        region: 開集合のサイト
        presentation: R1 ∪ R2 ∪ R3 を完備化した表示
        r1 / r2 / r3: 関係式の族ごとのリスト
    """

    name: str
    region: Sites
    presentation: AlgebraPresentation
    r1: tuple[NCPoly, ...]
    r2: tuple[NCPoly, ...]
    r3: tuple[NCPoly, ...]

    @property
    def table(self) -> GeneratorTable:
        return self.presentation.table


def operadic_glue(
    datum: DescentDatum,
    region: Optional[Iterable[int]] = None,
    name: str = "M",
    progress_callback: ProgressCallback = None,
) -> GluedPresentation:
    """AQFT としての貼り合わせ glue(𝔄)(U) の表示（R1 ∪ R2 ∪ R3）"""
    r = _region(datum, region)
    table = labeled_table(datum, r)
    r1 = tuple(patchwise_ccr(datum, table, r))
    r2 = tuple(overlap_identifications(datum, table, r))
    r3 = tuple(orthogonal_commutators(datum, table))
    pres = AlgebraPresentation(
        table, r1 + r2 + r3, True, datum.degree_bound, name=f"glue({name})"
    )
    return GluedPresentation(name, r, complete(pres, progress_callback=progress_callback), r1, r2, r3)


def global_presentation(
    datum: DescentDatum, region: Optional[Iterable[int]] = None, name: str = "M"
) -> AlgebraPresentation:
    """大域的なプローブ代数 𝔄(U) の完備化済み表示"""
    return complete(probe_presentation(datum.lattice, _region(datum, region), datum.degree_bound, name))


def _partition(datum: DescentDatum, partition: Optional[Partition]) -> Partition:
    if partition is None:
        return partition_of_unity(datum.lattice, datum.cover)
    report = validate_partition(datum.lattice, datum.cover, partition)
    if not report.ok:
        raise UsageError(f"1 の分割が不正です: {report.lines()[0]}")
    return partition


def labeled_to_global(datum: DescentDatum, source: GeneratorTable, target: GeneratorTable) -> GeneratorMap:
    """G / L: (α, i) ↦ s_α(i)·x_i"""
    by_site = {g.site: k for k, g in enumerate(target)}
    images = []
    for g in source:
        assert g.patch is not None
        images.append(
            NCPoly.generator(target, by_site[g.site]).scale(datum.trivialization(g.patch, g.site))
        )
    return GeneratorMap(source, target, tuple(images))


def global_to_labeled(
    datum: DescentDatum,
    source: GeneratorTable,
    target: GeneratorTable,
    partition: Optional[Partition] = None,
) -> GeneratorMap:
    """H / L⁻¹: x_i ↦ Σ_α χ_α(i)·s_α(i)·(α, i)"""
    chis = _partition(datum, partition)
    images = []
    for g in source:
        image = NCPoly.zero(target)
        for label in datum.cover.labels_at(g.site):
            weight = chis[label](g.site)
            if weight:
                coef = weight * datum.trivialization(label, g.site)
                image = image + _label_gen(target, label, g.site).scale(coef)
        images.append(image)
    return GeneratorMap(source, target, tuple(images))


def _form_image(
    datum: DescentDatum, phi: DiscreteForm, target: GeneratorTable, partition: Optional[Partition]
) -> NCPoly:
    chis = _partition(datum, partition)
    out = NCPoly.zero(target)
    for label in datum.cover.labels:
        for i, value in multiply(chis[label], phi).nonzero_items():
            if Generator(i, patch=label) in target:
                coef = value * datum.trivialization(label, i)
                out = out + _label_gen(target, label, i).scale(coef)
    return out


def H_map(
    datum: DescentDatum,
    phi: DiscreteForm,
    naive: AlgebraPresentation,
    partition: Optional[Partition] = None,
) -> NCPoly:
    """H(φ) = Σ_α ι_α(χ_α φ)（素朴な貼り合わせの元、正規形にはしない）"""
    return _form_image(datum, phi, naive.table, partition)


def comparison_G(
    datum: DescentDatum, x: NCPoly, global_pres: AlgebraPresentation
) -> NCPoly:
    """比較写像 G: ι_α x_i ↦ x_i を適用し、大域代数での正規形を返す"""
    g = labeled_to_global(datum, x.table, global_pres.table)
    return normal_form(g.apply(x), global_pres)


def counit_L(
    datum: DescentDatum, glued: GluedPresentation, x: NCPoly, global_pres: AlgebraPresentation
) -> NCPoly:
    """余単位 L: (α, i) ↦ x_i を適用し、𝔄(U) での正規形を返す"""
    if x.table != glued.table:
        raise UsageError("貼り合わせの表示の元ではありません", glued.name)
    return comparison_G(datum, x, global_pres)


def L_inverse(
    datum: DescentDatum,
    glued: GluedPresentation,
    phi: DiscreteForm,
    partition: Optional[Partition] = None,
) -> NCPoly:
    """L⁻¹(φ) = Σ_α (α, χ_α φ) を貼り合わせの表示での正規形で返す"""
    return normal_form(_form_image(datum, phi, glued.table, partition), glued.presentation)


def common_patch(cover: Cover, i: int, j: int) -> bool:
    return bool(set(cover.labels_at(i)) & set(cover.labels_at(j)))


def theorem_alg_verdict(
    datum: DescentDatum,
    test_pairs: Optional[Sequence[tuple[int, int]]] = None,
    degree: int = 3,
    partition: Optional[Partition] = None,
    instance: str = "",
    progress_callback: ProgressCallback = None,
) -> CheckResult:
    """
    素朴な貼り合わせの比較写像 G: A[ℳ] → 𝔄(M) が単射かどうかを判定する

    共通のパッチをもたないテスト組 (δ_a, δ_b) について
    w = H(δ_a)H(δ_b) − H(δ_b)H(δ_a) − iτ(δ_a, δ_b) の正規形を求めます。
    G(w) = 0 なので、w ≠ 0 なら G は単射ではありません。

    Returns:
        CheckResult: verdict は "not injective" または "isomorphism"
    """
    lat = datum.lattice
    if progress_callback:
        progress_callback("素朴な貼り合わせを完備化しています")
    naive = naive_glue(datum, progress_callback=progress_callback)
    global_pres = global_presentation(datum)
    sites = probe_sites(lat, lat.sites)
    if test_pairs is None:
        test_pairs = [
            (a, b) for a, b in itertools.combinations(sites, 2) if not common_patch(datum.cover, a, b)
        ]

    witnesses = []
    details = []
    for a, b in test_pairs:
        if common_patch(datum.cover, a, b):
            continue
        phi, psi = lat.delta(a), lat.delta(b)
        ha = H_map(datum, phi, naive, partition)
        hb = H_map(datum, psi, naive, partition)
        w = ha * hb - hb * ha - I_UNIT * tau(lat, phi, psi)
        nf = normal_form(w, naive)
        if not comparison_G(datum, w, global_pres).is_zero:
            details.append(f"G(w) ≠ 0 for ({a}, {b})")
        if not nf.is_zero:
            witnesses.append(f"({a}, {b}): {nf.to_text()}")

    naive_dims = graded_dimensions(naive, degree)
    global_dims = graded_dimensions(global_pres, degree)
    excess = any(naive_dims[d] > global_dims[d] for d in naive_dims)
    if witnesses or excess:
        verdict = VERDICT_NOT_INJECTIVE
    elif naive_dims == global_dims:
        verdict = VERDICT_ISOMORPHISM
    else:
        verdict = VERDICT_NOT_ISOMORPHISM
    details.extend(witnesses[1:])
    details.extend(naive.truncation_log)
    return CheckResult(
        instance=instance,
        open="M",
        check="theorem_alg",
        verdict=verdict,
        witness=witnesses[0] if witnesses else None,
        dims=naive_dims,
        reference_dims=global_dims,
        details=tuple(details),
    )


def aqft_open_check(
    datum: DescentDatum,
    name: str,
    region: Iterable[int],
    degree: int = 3,
    partition: Optional[Partition] = None,
    instance: str = "",
    progress_callback: ProgressCallback = None,
) -> CheckResult:
    """
    1 つの開集合 U で余単位 L_U が次数 degree まで同型かを判定する

    検査内容:
        (a) L⁻¹ の well-definedness: CCR 関係式の像が 0 に簡約される
        (b) L∘L⁻¹ = id（デルタ生成子）
        (c) L⁻¹∘L = id（貼り合わせの既約語基底、次数 degree まで）
        (d) 次数つき次元の一致
        (e) L の well-definedness: R1・R2・R3 の像が 𝔄(U) のイデアルに入る
    """
    r = frozenset(region)
    glued = operadic_glue(datum, r, name, progress_callback)
    global_pres = global_presentation(datum, r, name)
    gp = glued.presentation
    L = labeled_to_global(datum, glued.table, global_pres.table)
    L_inv = global_to_labeled(datum, global_pres.table, glued.table, partition)
    failures: list[str] = []

    for rel in global_pres.relators:
        image = normal_form(L_inv.apply(rel), gp)
        if not image.is_zero:
            failures.append(f"(a) L⁻¹({rel.to_text()}) = {image.to_text()}")
            break

    for k, g in enumerate(global_pres.table):
        x = NCPoly.generator(global_pres.table, k)
        back = normal_form(L.apply(L_inv.apply(x)), global_pres)
        if back != normal_form(x, global_pres):
            failures.append(f"(b) L(L⁻¹({g.name})) = {back.to_text()}")
            break

    basis_ok = True
    for d in range(degree + 1):
        for word in irreducible_words(gp, d):
            w = NCPoly.monomial(glued.table, word)
            back = normal_form(L_inv.apply(L.apply(w)), gp)
            if back != w:
                failures.append(f"(c) L⁻¹(L({glued.table.word_text(word)})) = {back.to_text()}")
                basis_ok = False
                break
        if not basis_ok:
            break

    glued_dims = graded_dimensions(gp, degree)
    global_dims = graded_dimensions(global_pres, degree)
    if glued_dims != global_dims:
        failures.append(f"(d) dims {glued_dims} ≠ {global_dims}")

    for rel in glued.r1 + glued.r2 + glued.r3:
        if not ideal_member(L.apply(rel), global_pres):
            failures.append(f"(e) L({rel.to_text()}) ∉ ideal")
            break

    return CheckResult(
        instance=instance,
        open=name,
        check="theorem_aqft",
        verdict=VERDICT_ISOMORPHISM if not failures else VERDICT_NOT_ISOMORPHISM,
        witness=failures[0] if failures else None,
        dims=glued_dims,
        reference_dims=global_dims,
        details=tuple(failures[1:]) + gp.truncation_log,
    )


def theorem_aqft_verdict(
    datum: DescentDatum,
    opens: Mapping[str, Iterable[int]],
    degree: int = 3,
    partition: Optional[Partition] = None,
    w_min: int = 2,
    instance: str = "",
    progress_callback: ProgressCallback = None,
) -> list[CheckResult]:
    """
    各開集合で余単位 L が同型かを判定する

    Raises:
        UsageError: 被覆が許容でない場合（validate_cover を参照）
    """
    report = validate_cover(datum.lattice, datum.cover, w_min)
    if not report.ok:
        raise UsageError(
            f"被覆が許容ではありません。validate_cover の結果を確認してください: {report.lines()[0]}"
        )
    results = []
    for name in sorted(opens):
        if progress_callback:
            progress_callback(f"開集合 {name} で余単位を検査しています")
        results.append(
            aqft_open_check(datum, name, opens[name], degree, partition, instance, progress_callback)
        )
    return results


def _filtered_basis(pres: AlgebraPresentation, degree: int) -> list[NCPoly]:
    return [
        NCPoly.monomial(pres.table, w)
        for d in range(degree + 1)
        for w in irreducible_words(pres, d)
    ]


def unit_patch_check(
    datum: DescentDatum, label: str, degree: int = 2, instance: str = ""
) -> CheckResult:
    """パッチ α で単位 𝔄_α(M_α) → glue(𝔄)(M_α)（x_i ↦ (α, i)）が次数 degree まで同型か"""
    region = datum.cover.patch(label)
    probe = datum.patches[label]
    obj = probe.fragment.object_for(region)
    assert obj is not None
    source = probe.presentations[obj]
    glued = operadic_glue(datum, region, label)
    gp = glued.presentation
    eta = GeneratorMap(
        source.table,
        glued.table,
        tuple(_label_gen(glued.table, label, g.site) for g in source.table),
    )
    source_dims = graded_dimensions(source, degree)
    glued_dims = graded_dimensions(gp, degree)
    failures = []
    for d in range(degree + 1):
        images = [normal_form(eta.apply(b), gp) for b in _filtered_basis(source, d)]
        rank = span_rank(images)
        if rank != sum(source_dims[k] for k in range(d + 1)):
            failures.append(f"次数 {d} 以下で単射ではありません: rank {rank}")
        if rank != sum(glued_dims[k] for k in range(d + 1)):
            failures.append(f"次数 {d} 以下で全射ではありません: rank {rank}")
    for rel in source.relators:
        if not ideal_member(eta.apply(rel), gp):
            failures.append(f"関係式の像がイデアルに入りません: {rel.to_text()}")
            break
    return CheckResult(
        instance=instance,
        open=label,
        check="unit",
        verdict=VERDICT_ISOMORPHISM if not failures else VERDICT_NOT_ISOMORPHISM,
        witness=failures[0] if failures else None,
        dims=source_dims,
        reference_dims=glued_dims,
        details=tuple(failures[1:]),
    )


def unit_verdict(datum: DescentDatum, degree: int = 2, instance: str = "") -> list[CheckResult]:
    """各パッチで単位成分が次数 degree まで同型かを判定する"""
    return [unit_patch_check(datum, label, degree, instance) for label in datum.cover.labels]


def quotient_chain(
    datum: DescentDatum, region: Optional[Iterable[int]] = None, degree: int = 3
) -> tuple[dict[int, int], dict[int, int], dict[int, int]]:
    """素朴 → オペラド的 → 大域 の次数つき次元（各次数で弱単調減少するはず）"""
    r = _region(datum, region)
    naive = graded_dimensions(naive_glue(datum, r), degree)
    glued = graded_dimensions(operadic_glue(datum, r).presentation, degree)
    glob = graded_dimensions(global_presentation(datum, r), degree)
    return naive, glued, glob


def quotient_chain_report(
    datum: DescentDatum, degree: int = 3, instance: str = ""
) -> CheckResult:
    naive, glued, glob = quotient_chain(datum, None, degree)
    bad = [d for d in naive if not naive[d] >= glued[d] >= glob[d]]
    return CheckResult(
        instance=instance,
        open="M",
        check="quotient_chain",
        verdict=VERDICT_PASS if not bad else VERDICT_FAIL,
        witness=f"degree {bad[0]}: {naive[bad[0]]}, {glued[bad[0]]}, {glob[bad[0]]}" if bad else None,
        dims=naive,
        reference_dims=glob,
        details=(f"glued {sorted(glued.items())}",),
    )


