"""
挠群链上的自同构扩张

G₀ ≤ G₁ ≤ … ≤ G_m 每一步的 Sylow p-部分只允许三种变化：不变、多一个 ℤ_p 因子、ℤ₂ 长成 ℤ₄。
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Optional

from ..config import TORSION_EXHAUSTIVE_LIMIT
from ..errors import InvalidInputError, PreconditionError, VerificationError
from .abelian import Element, FiniteAbelianGroup, GroupAutomorphism, GroupHom

logger = logging.getLogger(__name__)


def _p_part_moduli(G: FiniteAbelianGroup, p: int) -> list[int]:
    return [G.moduli[i] for i in G.prime_part(p)]


def _supported_part(moduli: list[int], p: int) -> bool:
    """初等交换，或者是单个 ℤ₄"""
    return all(m == p for m in moduli) or (p == 2 and moduli == [4])


def _p_elements(G: FiniteAbelianGroup, p: int) -> list[Element]:
    coords = G.prime_part(p)
    result = []
    for values in itertools.product(*(range(G.moduli[i]) for i in coords)):
        e = [0] * G.rank
        for i, v in zip(coords, values):
            e[i] = v
        result.append(tuple(e))
    return result


@dataclass(frozen=True)
class AbelianChain:
    """有限交换群链，embeddings[i] 是 G_i → G_{i+1} 的单射"""

    groups: tuple[FiniteAbelianGroup, ...]
    embeddings: tuple[GroupHom, ...]

    def __post_init__(self):
        if not self.groups:
            raise InvalidInputError("群链不能为空")
        if len(self.embeddings) != len(self.groups) - 1:
            raise InvalidInputError("嵌入个数必须比群的个数少 1")
        for G in self.groups:
            if not G.is_primary():
                raise InvalidInputError("群必须以准素分解给出", {"moduli": list(G.moduli)})
            for p in G.primes():
                if not _supported_part(_p_part_moduli(G, p), p):
                    raise PreconditionError(f"Sylow {p}-子群既不是初等交换群也不是 ℤ₄",
                                            {"prime": p, "moduli": list(G.moduli)})
        for i, emb in enumerate(self.embeddings):
            if emb.source != self.groups[i] or emb.target != self.groups[i + 1]:
                raise InvalidInputError(f"第 {i} 个嵌入的源或目标与群链不符")
            if not emb.is_injective():
                raise InvalidInputError(f"第 {i} 个嵌入不是单射")

    @classmethod
    def build(cls, moduli: Iterable[Iterable[int]],
              embeddings: Iterable[Iterable[Iterable[int]]]) -> "AbelianChain":
        groups = tuple(FiniteAbelianGroup(tuple(m)) for m in moduli)
        embs = tuple(GroupHom(groups[i], groups[i + 1], tuple(tuple(x) for x in images))
                     for i, images in enumerate(embeddings))
        return cls(groups, embs)

    @property
    def length(self) -> int:
        return len(self.groups) - 1

    def embedding(self, j: int, i: int) -> GroupHom:
        """复合嵌入 G_j → G_i（j ≤ i）"""
        if not 0 <= j <= i <= self.length:
            raise InvalidInputError(f"非法的下标 j={j}, i={i}")
        hom = GroupHom(self.groups[j], self.groups[j], tuple(self.groups[j].generators()))
        for step in range(j, i):
            hom = self.embeddings[step].compose(hom)
        return hom

    def to_json(self) -> dict:
        return {"groups": [list(G.moduli) for G in self.groups],
                "embeddings": [[list(x) for x in e.images] for e in self.embeddings]}


def _growth(prev: FiniteAbelianGroup, curr: FiniteAbelianGroup, p: int) -> str:
    before, after = _p_part_moduli(prev, p), _p_part_moduli(curr, p)
    size_before = 1
    for m in before:
        size_before *= m
    size_after = 1
    for m in after:
        size_after *= m
    if size_before == size_after:
        return "same"
    if all(m == p for m in before + after) and size_after == size_before * p:
        return "elementary"
    if p == 2 and before == [2] and after == [4]:
        return "z2_to_z4"
    raise PreconditionError(f"素数 {p} 处的增长方式不受支持",
                            {"prime": p, "before": before, "after": after})


def extend_automorphism(embedding: GroupHom, alpha: GroupAutomorphism) -> GroupAutomorphism:
    """
    把 G_{i−1} 的自同构扩张到 G_i

    对每个素数 p 分别处理：
    p-部分不变时沿嵌入搬运；多一个 ℤ_p 因子时新因子取恒等；ℤ₂ 长成 ℤ₄ 时取恒等。

    Raises:
        PreconditionError: 链步的增长方式不受支持（detail 中带有出错的素数）
    """
    prev, curr = embedding.source, embedding.target
    if alpha.group != prev:
        raise InvalidInputError("自同构与嵌入的源群不符")
    images: dict[int, Element] = {}
    for p in sorted(set(prev.primes()) | set(curr.primes())):
        mode = _growth(prev, curr, p)
        coords = curr.prime_part(p)
        if mode == "z2_to_z4":
            for i in coords:
                images[i] = curr.generators()[i]
            continue
        # 把 P_i 的每个元素写成 ι(g) + c·h
        pulled = {embedding(g): g for g in _p_elements(prev, p)}
        if mode == "same":
            for i in coords:
                images[i] = embedding(alpha(pulled[curr.generators()[i]]))
            continue
        h = next(curr.generators()[i] for i in coords if curr.generators()[i] not in pulled)
        decompose = {}
        for g_img, g in pulled.items():
            for c in range(p):
                decompose[curr.add(g_img, curr.scale(c, h))] = (g, c)
        for i in coords:
            g, c = decompose[curr.generators()[i]]
            images[i] = curr.add(embedding(alpha(g)), curr.scale(c, h))
    result = GroupAutomorphism(curr, tuple(images[i] for i in range(curr.rank)))
    for g in prev.generators():
        if result(embedding(g)) != embedding(alpha(g)):
            raise VerificationError("扩张后的自同构限制到 G_{i−1} 不等于原自同构")
    return result


def restrict(alpha: GroupAutomorphism, chain: AbelianChain, j: int) -> GroupAutomorphism:
    """α ∈ Aut(G_m) 限制到 G_j（要求 α 保持 G_j 的像）"""
    iota = chain.embedding(j, chain.length)
    pulled = {iota(g): g for g in chain.groups[j].elements()}
    images = []
    for gen in chain.groups[j].generators():
        img = alpha(iota(gen))
        if img not in pulled:
            raise PreconditionError(f"α 不保持 G_{j}", {"stage": j})
        images.append(pulled[img])
    return GroupAutomorphism(chain.groups[j], tuple(images))


def is_automorphism_exhaustive(alpha: GroupAutomorphism) -> bool:
    """逐对检查 α(x + y) = α(x) + α(y) 以及双射性"""
    G = alpha.group
    table = alpha.table()
    if len(set(table.values())) != G.order:
        return False
    elements = G.elements()
    return all(table[G.add(x, y)] == G.add(table[x], table[y]) for x in elements for y in elements)


@dataclass(frozen=True)
class ChainExtension:
    """chain_extend 的结果：每一阶段的自同构"""

    chain: AbelianChain
    stages: tuple[GroupAutomorphism, ...]
    verified: bool

    @property
    def final(self) -> GroupAutomorphism:
        return self.stages[-1]

    def to_json(self) -> dict:
        return {"chain": self.chain, "stages": [a.to_json() for a in self.stages],
                "final": self.final.to_json(), "verified": self.verified}


def chain_extend(chain: AbelianChain, alpha0: GroupAutomorphism,
                 S: Optional[Iterable] = None, S_prime: Optional[Iterable] = None) -> ChainExtension:
    """
    沿整条链扩张 α₀

    Args:
        chain: 群链
        alpha0: G₀ 的自同构
        S, S_prime: 可选的 G₀ 子集，要求 α₀(S) = S′

    Returns:
        ChainExtension；阶不超过 TORSION_EXHAUSTIVE_LIMIT 时逐元素验证
    """
    G0 = chain.groups[0]
    if alpha0.group != G0:
        raise InvalidInputError("α₀ 不是 G₀ 的自同构")
    source = target = None
    if S is not None or S_prime is not None:
        if S is None or S_prime is None:
            raise InvalidInputError("S 与 S′ 必须同时给出")
        source = frozenset(G0.element(x) for x in S)
        target = frozenset(G0.element(x) for x in S_prime)
        if alpha0.apply_set(source) != target:
            raise PreconditionError("α₀(S) ≠ S′")

    stages = [alpha0]
    for emb in chain.embeddings:
        stages.append(extend_automorphism(emb, stages[-1]))
    final = stages[-1]
    last = chain.groups[-1]

    verified = False
    if last.order <= TORSION_EXHAUSTIVE_LIMIT:
        if not is_automorphism_exhaustive(final):
            raise VerificationError("最终映射不是自同构")
        for j, stage in enumerate(stages):
            if restrict(final, chain, j) != stage:
                raise VerificationError(f"限制到 G_{j} 与第 {j} 阶段不一致")
        verified = True
    else:
        logger.info("G_m 的阶 %d 超过穷举上限，跳过逐元素验证", last.order)
    if source is not None:
        iota = chain.embedding(0, chain.length)
        if final.apply_set(iota.apply_set(source)) != iota.apply_set(target):
            raise VerificationError("扩张后的自同构不再把 S 映到 S′")
    return ChainExtension(chain, tuple(stages), verified)
