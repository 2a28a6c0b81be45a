"""
有限交换群 - 元素表示、子集规范化与自同构
"""
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

from sympy import factorint

from ..algebra.intlin import IntMatrix, snf
from ..errors import InvalidInputError, PreconditionError

logger = logging.getLogger(__name__)

Element = tuple[int, ...]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """
    ℤ_{m_1} × … × ℤ_{m_t}

    moduli 既可以是不变因子，也可以是素数幂（准素分解）；
    元素是各坐标取值在 [0, m_i) 的元组。
    """

    moduli: tuple[int, ...]

    def __post_init__(self):
        for m in self.moduli:
            if isinstance(m, bool) or not isinstance(m, int) or m < 2:
                raise InvalidInputError(f"循环因子的阶必须是不小于 2 的整数: {m!r}")

    @classmethod
    def cyclic(cls, m: int) -> "FiniteAbelianGroup":
        return cls((m,))

    @classmethod
    def of(cls, *moduli: int) -> "FiniteAbelianGroup":
        return cls(tuple(moduli))

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @cached_property
    def order(self) -> int:
        result = 1
        for m in self.moduli:
            result *= m
        return result

    def __len__(self) -> int:
        return self.order

    @property
    def zero(self) -> Element:
        return tuple(0 for _ in self.moduli)

    def generators(self) -> list[Element]:
        return [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]

    def elements(self) -> list[Element]:
        return list(itertools.product(*(range(m) for m in self.moduli)))

    def element(self, x: Union[int, Sequence[int]]) -> Element:
        """把整数（循环群）或序列规范化为元素"""
        if isinstance(x, int) and not isinstance(x, bool):
            if self.rank != 1:
                raise InvalidInputError(f"整数 {x} 只能表示循环群的元素")
            return (x % self.moduli[0],)
        x = tuple(x)
        if len(x) != self.rank:
            raise InvalidInputError(f"元素 {list(x)} 的长度不是 {self.rank}")
        return tuple(a % m for a, m in zip(x, self.moduli))

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def neg(self, a: Element) -> Element:
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    def scale(self, c: int, a: Element) -> Element:
        return tuple((c * x) % m for x, m in zip(a, self.moduli))

    def element_order(self, a: Element) -> int:
        result, x = 1, a
        while x != self.zero:
            x = self.add(x, a)
            result += 1
        return result

    def invariant_factors(self) -> list[int]:
        """ℤ_{d_1} × … 中 d_i | d_{i+1} 的不变因子（去掉 1）"""
        if not self.moduli:
            return []
        return [d for d in snf(IntMatrix.diagonal(list(self.moduli))).diagonal if d > 1]

    def primary_factors(self) -> list[int]:
        """准素分解的素数幂，升序"""
        powers = []
        for m in self.moduli:
            powers.extend(p ** e for p, e in factorint(m).items())
        return sorted(powers)

    def is_isomorphic(self, other: "FiniteAbelianGroup") -> bool:
        return self.primary_factors() == other.primary_factors()

    def prime_part(self, p: int) -> list[int]:
        """模为 p 的幂的坐标下标（准素形式下即 Sylow p-子群的坐标）"""
        return [i for i, m in enumerate(self.moduli) if set(factorint(m)) == {p}]

    def is_primary(self) -> bool:
        return all(len(factorint(m)) == 1 for m in self.moduli)

    def primes(self) -> list[int]:
        return sorted({p for m in self.moduli for p in factorint(m)})

    def subset(self, items: Iterable, symmetric: bool = False) -> frozenset:
        """规范化连接集：不得含 0，symmetric 时补全逆元"""
        result = set()
        for x in items:
            e = self.element(x)
            if e == self.zero:
                raise InvalidInputError("连接集不能包含单位元")
            result.add(e)
            if symmetric:
                result.add(self.neg(e))
        return frozenset(result)

    def complement(self, S: Iterable) -> frozenset:
        """G ∖ (S ∪ {0})"""
        S = {self.element(x) for x in S}
        return frozenset(e for e in self.elements() if e != self.zero and e not in S)

    def to_json(self) -> dict:
        return {"moduli": list(self.moduli), "order": self.order}


@dataclass(frozen=True)
class GroupHom:
    """由生成元的像给出的同态 source → target"""

    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    images: tuple[Element, ...]

    def __post_init__(self):
        if len(self.images) != self.source.rank:
            raise InvalidInputError("生成元的像的个数与源群的秩不符")
        images = tuple(self.target.element(x) for x in self.images)
        object.__setattr__(self, "images", images)
        for m, img in zip(self.source.moduli, images):
            if self.target.scale(m, img) != self.target.zero:
                raise InvalidInputError("生成元的像的阶不整除生成元的阶", {"image": list(img)})

    def __call__(self, x: Sequence[int]) -> Element:
        result = self.target.zero
        for c, img in zip(x, self.images):
            result = self.target.add(result, self.target.scale(c, img))
        return result

    def apply_set(self, S: Iterable[Element]) -> frozenset:
        return frozenset(self(x) for x in S)

    def is_injective(self) -> bool:
        return len({self(x) for x in self.source.elements()}) == self.source.order

    def compose(self, other: "GroupHom") -> "GroupHom":
        """先作用 other 再作用 self"""
        if other.target != self.source:
            raise InvalidInputError("同态不能复合：中间群不一致")
        return GroupHom(other.source, self.target, tuple(self(img) for img in other.images))

    def to_json(self) -> dict:
        return {"source": self.source, "target": self.target,
                "images": [list(x) for x in self.images]}


@dataclass(frozen=True)
class GroupAutomorphism:
    """有限交换群的自同构（生成元的像）"""

    group: FiniteAbelianGroup
    images: tuple[Element, ...]

    def __post_init__(self):
        hom = GroupHom(self.group, self.group, self.images)
        object.__setattr__(self, "images", hom.images)
        if not hom.is_injective():
            raise InvalidInputError("不是双射", {"images": [list(x) for x in hom.images]})

    @classmethod
    def identity(cls, group: FiniteAbelianGroup) -> "GroupAutomorphism":
        return cls(group, tuple(group.generators()))

    @classmethod
    def negation(cls, group: FiniteAbelianGroup) -> "GroupAutomorphism":
        return cls(group, tuple(group.neg(g) for g in group.generators()))

    @property
    def hom(self) -> GroupHom:
        return GroupHom(self.group, self.group, self.images)

    def __call__(self, x: Sequence[int]) -> Element:
        return self.hom(x)

    def __matmul__(self, other: "GroupAutomorphism") -> "GroupAutomorphism":
        return GroupAutomorphism(self.group, tuple(self(img) for img in other.images))

    def apply_set(self, S: Iterable[Element]) -> frozenset:
        return frozenset(self(x) for x in S)

    def table(self) -> dict:
        return {x: self(x) for x in self.group.elements()}

    def to_json(self) -> list[list[int]]:
        return [list(x) for x in self.images]


def aut_group_elements(group: FiniteAbelianGroup, limit: int = 256) -> list[GroupAutomorphism]:
    """
    枚举全部自同构

    每个生成元的像取遍阶整除其阶的元素，再筛选双射。
    """
    if group.order > limit:
        raise PreconditionError(f"群的阶 {group.order} 超过枚举上限 {limit}")
    candidates = []
    for m in group.moduli:
        candidates.append([x for x in group.elements() if group.scale(m, x) == group.zero])
    result = []
    for images in itertools.product(*candidates):
        hom = GroupHom(group, group, tuple(images))
        if hom.is_injective():
            result.append(GroupAutomorphism(group, hom.images))
    logger.debug("|Aut(G)| = %d（G = %s）", len(result), group.moduli)
    return sorted(result, key=lambda a: a.images)