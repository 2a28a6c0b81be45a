"""
格模块 - ℤⁿ 的有限秩子群：生成、指数、同时基与标准化自同构
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

from .intlin import IntMatrix, Vector, det, hnf, inverse_unimodular, snf, solve_integer
from ..errors import InvalidInputError, PreconditionError, VerificationError
from ..utils.helpers import is_squarefree

logger = logging.getLogger(__name__)


class Cardinality(Enum):
    """指数或分支数的无限取值"""

    INFINITE = "INFINITE"

    def to_json(self) -> str:
        return self.value


INFINITE = Cardinality.INFINITE
IndexValue = Union[int, Cardinality]


@dataclass(frozen=True)
class Lattice:
    """
    ℤⁿ 的子格 H

    basis 为 n×r 矩阵，每列一个基向量；总是以 Hermite 标准形存储，
    所以两个格相等当且仅当 basis 逐元素相等。
    """

    ambient_dim: int
    basis: IntMatrix

    def __post_init__(self):
        if self.basis.rows != self.ambient_dim:
            raise InvalidInputError(
                f"基矩阵行数 {self.basis.rows} 与环境维数 {self.ambient_dim} 不符"
            )
        if self.basis.cols > self.ambient_dim:
            raise InvalidInputError("基向量个数超过环境维数")
        if snf(self.basis).rank != self.basis.cols:
            raise InvalidInputError("基向量在有理数上线性相关")

    @property
    def n(self) -> int:
        return self.ambient_dim

    @property
    def rank(self) -> int:
        return self.basis.cols

    def columns(self) -> list[Vector]:
        return self.basis.columns()

    def contains(self, v: Sequence[int]) -> bool:
        return coordinates(self, v) is not None

    def image(self, M: IntMatrix) -> "Lattice":
        """在环境矩阵 M 下的像"""
        return span([M.apply(c) for c in self.columns()], self.n)

    def saturation(self) -> "Lattice":
        """ℤⁿ ∩ span_Q(H)"""
        Y, a = simultaneous_basis(self)
        return span([Y.col(i) for i in range(len(a))], self.n)

    def index_in(self, other: "Lattice") -> IndexValue:
        """|other : self|，要求 self ≤ other"""
        coords = []
        for c in self.columns():
            x = coordinates(other, c)
            if x is None:
                raise PreconditionError("不是子格", {"vector": list(c)})
            coords.append(x)
        if self.rank < other.rank:
            return INFINITE
        return abs(det(IntMatrix.from_columns(coords)))

    @classmethod
    def standard(cls, n: int, k: int) -> "Lattice":
        """kℤ × ℤⁿ⁻¹"""
        return span([tuple(k if i == j == 0 else int(i == j) for i in range(n))
                     for j in range(n)], n)

    def to_json(self) -> dict:
        return {"n": self.n, "rank": self.rank, "basis": [list(c) for c in self.columns()]}


def span(vectors: Sequence[Sequence[int]], n: int) -> Lattice:
    """
    由向量组生成的格

    Args:
        vectors: 长度为 n 的整数向量
        n: 环境维数

    Returns:
        以 Hermite 标准形为基的 Lattice
    """
    rows = [tuple(v) for v in vectors]
    if not rows:
        raise InvalidInputError("向量组为空")
    for v in rows:
        if len(v) != n:
            raise InvalidInputError(f"向量 {v} 的长度不是 {n}")
    if all(x == 0 for v in rows for x in v):
        raise InvalidInputError("全零向量组不生成非零格")
    H, _ = hnf(IntMatrix.from_rows(rows))
    nonzero = [H.row(i) for i in range(H.rows) if any(H.row(i))]
    return Lattice(n, IntMatrix.from_columns(nonzero))


def index(L: Lattice) -> IndexValue:
    """|ℤⁿ : L|；秩不满时为 INFINITE"""
    if L.rank < L.n:
        return INFINITE
    return abs(det(L.basis))


def simultaneous_basis(L: Lattice) -> tuple[IntMatrix, list[int]]:
    """
    同时基

    Returns:
        (Y, a)：Y 的列 y_1..y_n 是 ℤⁿ 的基，a_i | a_{i+1}，
        {a_i y_i : i ≤ r} 是 L 的基
    """
    dec = snf(L.basis)
    Y = inverse_unimodular(dec.U)
    a = dec.diagonal
    check = span([tuple(ai * x for x in Y.col(i)) for i, ai in enumerate(a)], L.n)
    if check != L:
        raise VerificationError("同时基未能重建原格", {"a": a})
    return Y, a


def standardize(L: Lattice) -> IntMatrix:
    """
    标准化自同构 σ

    要求指数 k 有限且无平方因子；此时不变因子只能是 (1, …, 1, k)。
    σ 把 y_n 送到 e_1，y_1 送到 e_n，其余 y_i 送到 e_i，于是 σ(L) = kℤ × ℤⁿ⁻¹。
    """
    n = L.n
    if n < 2:
        raise PreconditionError("标准化要求 n > 1", {"n": n})
    k = index(L)
    if k is INFINITE:
        raise PreconditionError("格的指数无限，无法标准化", {"index": "INFINITE"})
    if not is_squarefree(k):
        raise PreconditionError("格的指数不是无平方因子数", {"index": k})
    Y, a = simultaneous_basis(L)
    U = inverse_unimodular(Y)
    target = list(range(n))
    target[0], target[n - 1] = n - 1, 0
    # P 把 e_i 送到 e_{target[i]}
    P = IntMatrix.from_columns([tuple(int(r == target[i]) for r in range(n)) for i in range(n)])
    sigma = P @ U
    if L.image(sigma) != Lattice.standard(n, k):
        raise VerificationError("σ(L) 不等于 kℤ×ℤⁿ⁻¹", {"index": k})
    logger.debug("标准化完成: k=%s, a=%s", k, a)
    return sigma


def coordinates(L: Lattice, v: Sequence[int]) -> Optional[Vector]:
    """v 在 L 的基下的整数坐标；v ∉ L 时返回 None"""
    if len(v) != L.n:
        raise InvalidInputError(f"向量长度 {len(v)} 与环境维数 {L.n} 不符")
    return solve_integer(L.basis, tuple(v))
