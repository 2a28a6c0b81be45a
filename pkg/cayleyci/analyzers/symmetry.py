"""
对称性分析器 - 连接集的集合稳定子、格之间的传递映射与环境扩张
"""
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from ..algebra.intlin import (
    IntMatrix, Vector, integral_vector, inverse_unimodular, is_unimodular,
    left_inverse, rank, rational_apply,
)
from ..algebra.lattice import Lattice, coordinates, simultaneous_basis, span
from ..config import MAX_TRANSPORTER_CANDIDATES
from ..errors import InvalidInputError, PreconditionError, SearchCancelled, VerificationError
from ..graphs.cayley import ConnectionSet
from ..utils.cancel import CancelToken, check
from ..utils.helpers import format_duration

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HAut:
    """格 H 的自同构，以 H 的存储基下的坐标矩阵表示"""

    matrix: IntMatrix

    def __post_init__(self):
        if not self.matrix.is_square or not is_unimodular(self.matrix):
            raise InvalidInputError("HAut 必须是幺模方阵", {"matrix": self.matrix.to_rows()})

    @property
    def rank(self) -> int:
        return self.matrix.rows

    def __matmul__(self, other: "HAut") -> "HAut":
        return HAut(self.matrix @ other.matrix)

    def inverse(self) -> "HAut":
        return HAut(inverse_unimodular(self.matrix))

    def is_identity(self) -> bool:
        return self.matrix.is_identity()

    def to_json(self) -> list[list[int]]:
        return self.matrix.to_rows()


@dataclass(frozen=True)
class SymmetryGroup:
    """Stab_{Aut(H)}(S)：元素按矩阵元素字典序排列"""

    lattice: Lattice
    elements: tuple[HAut, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, tau: HAut) -> bool:
        return tau in set(self.elements)

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice,
            "order": self.order,
            "elements": [t.to_json() for t in self.elements],
        }


def _negate(v: Vector) -> Vector:
    return tuple(-x for x in v)


def independent_subset(vectors: Sequence[Vector]) -> list[Vector]:
    """按给定顺序贪心选取有理无关的极大子集"""
    chosen: list[Vector] = []
    for v in vectors:
        if rank(IntMatrix.from_columns(chosen + [v])) == len(chosen) + 1:
            chosen.append(v)
    return chosen


class LinearMapSearch:
    """
    枚举把有限集 S 映满 S′ 的线性同构（在 span_Q(S) 上单射）

    取 S 中有理无关的极大子集 B，映射由 B 的像唯一确定。
    逐个为 B 的元素选择 S′ 中的像，只依赖已选像的 s 会被立即检查，
    不合格的部分赋值直接剪枝。
    """

    def __init__(self, source: Sequence[Vector], token: Optional[CancelToken] = None):
        self.source = tuple(sorted(set(source)))
        self.token = token
        self.basis = independent_subset(self.source)
        members = set(self.source)
        self.symmetric = all(_negate(s) in members for s in self.source)
        self.r = len(self.basis)
        self._pinv = left_inverse(IntMatrix.from_columns(self.basis))
        self._coeffs = {s: rational_apply(self._pinv, s) for s in self.source}
        # 按坐标支撑的最大下标分层：选好前 j+1 个像后即可检查第 j 层
        self._levels: list[list[Vector]] = [[] for _ in range(self.r)]
        for s in self.source:
            top = max(i for i, c in enumerate(self._coeffs[s]) if c != 0)
            self._levels[top].append(s)
        self.candidates = 0

    def coefficients(self, v: Sequence[int]) -> list[Fraction]:
        """v ∈ span_Q(S) 在 B 下的有理坐标"""
        return rational_apply(self._pinv, v)

    def evaluate(self, images: Sequence[Vector], v: Sequence[int]) -> list[Fraction]:
        """由 B 的像确定的线性映射在 v 处的值"""
        n = len(images[0])
        coeffs = self.coefficients(v)
        return [sum((c * img[i] for c, img in zip(coeffs, images)), Fraction(0)) for i in range(n)]

    def maps(self, target: Sequence[Vector]) -> Iterator[tuple[Vector, ...]]:
        """
        逐个给出满足 f(S) = S′ 的映射（以 B 的像表示）

        Raises:
            SearchCancelled: 令牌被取消或候选数超过上限
        """
        target = tuple(sorted(set(target)))
        if len(target) != len(self.source):
            return
        self.candidates = 0
        yield from self._extend([], set(target), target)

    def _extend(self, images: list[Vector], target_set: set, target: tuple) -> Iterator[tuple]:
        j = len(images)
        if j == self.r:
            mapped = {self._image_of(images, s) for s in self.source}
            if mapped == target_set:
                yield tuple(images)
            return
        negated = {_negate(t) for t in images}
        for t in target:
            check(self.token)
            # 同构把 −b_i 映到 −t_i，B 中其余向量的像不能再取 ±t_i
            if t in images or t in negated:
                continue
            if self.symmetric and _negate(t) not in target_set:
                continue
            self.candidates += 1
            if self.candidates > MAX_TRANSPORTER_CANDIDATES:
                raise SearchCancelled("候选映射数超过上限", {"limit": MAX_TRANSPORTER_CANDIDATES})
            images.append(t)
            if all(self._image_of(images, s) in target_set for s in self._levels[j]):
                yield from self._extend(images, target_set, target)
            images.pop()

    def _image_of(self, images: Sequence[Vector], s: Vector) -> Optional[Vector]:
        coeffs = self._coeffs[s]
        n = len(images[0])
        value = [sum((c * img[i] for c, img in zip(coeffs, images)), Fraction(0)) for i in range(n)]
        return integral_vector(value)


def _check_span(L: Lattice, S: ConnectionSet, name: str = "S"):
    if S.n != L.n:
        raise InvalidInputError(f"{name} 的维数 {S.n} 与格的维数 {L.n} 不符")
    if S.span() != L:
        raise PreconditionError(f"span({name}) 不等于给定的格", {"lattice": L.to_json()})


def _lattice_matrix(L: Lattice, L2: Lattice, search: LinearMapSearch,
                    images: Sequence[Vector]) -> Optional[IntMatrix]:
    """把映射写成从 L 的基坐标到 L2 的基坐标的矩阵"""
    cols = []
    for b in L.columns():
        value = integral_vector(search.evaluate(images, b))
        if value is None:
            return None
        x = coordinates(L2, value)
        if x is None:
            return None
        cols.append(x)
    M = IntMatrix.from_columns(cols)
    return M if is_unimodular(M) else None


def lattice_transporters(L: Lattice, S: ConnectionSet, L2: Lattice, S2: ConnectionSet,
                         token: Optional[CancelToken] = None) -> Iterator[IntMatrix]:
    """枚举全部满足 τ(S) = S′ 的同构 L → L′（坐标矩阵）"""
    _check_span(L, S)
    _check_span(L2, S2, "S′")
    if L.rank != L2.rank or len(S) != len(S2):
        return
    search = LinearMapSearch(S.vectors, token)
    for images in search.maps(S2.vectors):
        M = _lattice_matrix(L, L2, search, images)
        if M is not None:
            yield M


def lattice_transporter(L: Lattice, S: ConnectionSet, L2: Lattice, S2: ConnectionSet,
                        token: Optional[CancelToken] = None) -> Optional[IntMatrix]:
    """任取一个满足 τ(S) = S′ 的格同构 L → L′，不存在时返回 None"""
    return next(lattice_transporters(L, S, L2, S2, token), None)


def set_stabilizer(L: Lattice, S: ConnectionSet,
                   token: Optional[CancelToken] = None) -> SymmetryGroup:
    """
    计算集合稳定子 {τ ∈ Aut(L) : τ(S) = S}

    Args:
        L: 满足 span(S) = L 的格
        S: 连接集
        token: 取消令牌

    Returns:
        SymmetryGroup，元素经过封闭性自检
    """
    started = time.monotonic()
    logger.info("正在枚举稳定子: |S|=%d, rank=%d", len(S), L.rank)
    found = {HAut(M) for M in lattice_transporters(L, S, L, S, token)}
    elements = tuple(sorted(found, key=lambda t: t.matrix.entries))
    for a in elements:
        if a.inverse() not in found:
            raise VerificationError("稳定子对取逆不封闭")
        for b in elements:
            if a @ b not in found:
                raise VerificationError("稳定子对复合不封闭")
    logger.info("✓ 稳定子阶为 %d，耗时 %s", len(elements), format_duration(time.monotonic() - started))
    return SymmetryGroup(L, elements)


def transporter(L: Lattice, S: ConnectionSet, S2: ConnectionSet,
                token: Optional[CancelToken] = None) -> Optional[HAut]:
    """τ ∈ Aut(L) 使 τ(S) = S′；不存在时返回 None"""
    M = lattice_transporter(L, S, L, S2, token)
    return HAut(M) if M is not None else None


def apply_on_span(L: Lattice, tau: HAut, v: Sequence[int]) -> list[Fraction]:
    """τ 诱导的有理映射 B·τ·B⁺ 在 v ∈ span_Q(L) 处的值"""
    x = rational_apply(left_inverse(L.basis), v)
    y = [sum((tau.matrix[i, j] * x[j] for j in range(L.rank)), Fraction(0)) for i in range(L.rank)]
    return [sum((L.basis[row, i] * y[i] for i in range(L.rank)), Fraction(0)) for row in range(L.n)]


def _extend_from_saturation(Y: IntMatrix, r: int, images: Sequence[Vector],
                            complement: Sequence[Vector]) -> IntMatrix:
    """把 y_i ↦ images[i]（i < r）补成环境矩阵 [images | complement]·Y⁻¹"""
    cols = list(images) + list(complement)
    return IntMatrix.from_columns(cols) @ inverse_unimodular(Y)


def extends_to_ambient(L: Lattice, tau: HAut) -> Optional[IntMatrix]:
    """
    判断 τ 能否扩张为 ℤⁿ 的自同构

    满秩时扩张唯一，就是 B·τ·B⁻¹；秩不满时，τ 可扩张当且仅当诱导的有理映射
    把 L 的饱和格映满自身，此时用同时基补全其余方向。

    Returns:
        扩张得到的幺模矩阵，不能扩张时返回 None
    """
    if tau.rank != L.rank:
        raise InvalidInputError("τ 的阶数与格的秩不符")
    Y, _ = simultaneous_basis(L)
    r = L.rank
    images = []
    for i in range(r):
        value = integral_vector(apply_on_span(L, tau, Y.col(i)))
        if value is None:
            return None
        images.append(value)
    saturation = span([Y.col(i) for i in range(r)], L.n)
    if span(images, L.n) != saturation:
        return None
    M = _extend_from_saturation(Y, r, images, [Y.col(i) for i in range(r, L.n)])
    if not is_unimodular(M):
        return None
    for b, col in zip(L.columns(), tau.matrix.columns()):
        if M.apply(b) != L.basis.apply(col):
            raise VerificationError("环境扩张在 L 上与 τ 不一致")
    return M


def ambient_transporters(S: ConnectionSet, S2: ConnectionSet,
                         token: Optional[CancelToken] = None) -> Iterator[IntMatrix]:
    """枚举满足 M(S) = S′ 的幺模矩阵（每个 S 上的线性映射至多给出一个）"""
    if S.n != S2.n:
        raise InvalidInputError(f"维数不同: {S.n} 与 {S2.n}")
    if len(S) != len(S2):
        return
    L, L2 = S.span(), S2.span()
    if L.rank != L2.rank:
        return
    Y, _ = simultaneous_basis(L)
    Y2, _ = simultaneous_basis(L2)
    r = L.rank
    saturation2 = L2.saturation()
    complement = [Y2.col(i) for i in range(r, S.n)]
    search = LinearMapSearch(S.vectors, token)
    for images in search.maps(S2.vectors):
        sat_images = [integral_vector(search.evaluate(images, Y.col(i))) for i in range(r)]
        if any(v is None for v in sat_images):
            continue
        if span(sat_images, S.n) != saturation2:
            continue
        M = _extend_from_saturation(Y, r, sat_images, complement)
        if is_unimodular(M) and S.apply(M) == S2:
            yield M


def ambient_transporter(S: ConnectionSet, S2: ConnectionSet,
                        token: Optional[CancelToken] = None) -> Optional[IntMatrix]:
    """任取一个满足 M(S) = S′ 的 ℤⁿ 自同构，不存在时返回 None"""
    return next(ambient_transporters(S, S2, token), None)
