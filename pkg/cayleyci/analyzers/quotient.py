"""
同余商分析器 - GL(n, ℤ_k) 中的可扩张像、乘积条件与覆盖证书
"""
import itertools
import logging
import time
from collections import Counter, deque
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Optional

from ..algebra.intlin import IntMatrix, det, inverse_unimodular, xgcd
from ..algebra.lattice import INFINITE, Lattice, coordinates, index, standardize
from ..config import CONGRUENCE_DESK_CHECK_MAX, MAX_QUOTIENT_ORDER
from ..errors import InvalidInputError, PreconditionError, SearchCancelled, VerificationError
from ..graphs.cayley import ConnectionSet, validate
from ..utils.cancel import CancelToken, check
from ..utils.helpers import format_duration, is_squarefree, prime_factors
from .symmetry import HAut, SymmetryGroup, set_stabilizer

logger = logging.getLogger(__name__)

# 模 k 矩阵用行优先元组表示
ModMatrix = tuple[int, ...]


def mat_mul_mod(a: ModMatrix, b: ModMatrix, n: int, k: int) -> ModMatrix:
    return tuple(
        sum(a[i * n + l] * b[l * n + j] for l in range(n)) % k
        for i in range(n) for j in range(n)
    )


def identity_mod(n: int, k: int) -> ModMatrix:
    return tuple(int(i == j) % k for i in range(n) for j in range(n))


def det_mod(a: ModMatrix, n: int, k: int) -> int:
    return det(IntMatrix(n, n, a)) % k


def units_mod(k: int) -> list[int]:
    return [u for u in range(1, k) if gcd(u, k) == 1]


@dataclass(frozen=True)
class QuotientGroup:
    """GL(n, ℤ_k) 中以显式元素集合给出的子群"""

    n: int
    k: int
    elements: frozenset
    uncertain: bool = False

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, m) -> bool:
        if isinstance(m, IntMatrix):
            m = m.reduce_mod(self.k)
        return m in self.elements

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "order": self.order, "uncertain": self.uncertain}


def _validate_nk(n: int, k: int):
    if n < 2:
        raise InvalidInputError(f"要求 n ≥ 2: {n}")
    if k < 2 or not is_squarefree(k):
        raise InvalidInputError(f"k 必须是不小于 2 的无平方因子数: {k}")


def quotient_order(n: int, k: int) -> int:
    """|{M ∈ GL(n, ℤ_k) : det ≡ ±1}|（k 无平方因子）"""
    if k < 1 or not is_squarefree(k):
        raise InvalidInputError(f"k 必须是无平方因子的正整数: {k}")
    order = 1
    for p in prime_factors(k):
        order *= p ** (n * (n - 1) // 2)
        for i in range(2, n + 1):
            order *= p ** i - 1
    return order * 2 if k > 2 else order


def _block_det_histogram(size: int, k: int) -> Counter:
    """全部 size×size 模 k 矩阵的行列式分布"""
    if size == 0:
        return Counter({1 % k: 1})
    if k ** (size * size) > MAX_QUOTIENT_ORDER:
        raise PreconditionError("子块枚举规模过大", {"size": size, "k": k})
    hist = Counter()
    for entries in itertools.product(range(k), repeat=size * size):
        hist[det(IntMatrix(size, size, entries)) % k] += 1
    return hist


def congruence_described_order(n: int, k: int) -> int:
    """|{M : det ≡ ±1, m_i1 ≡ 0 (i ≥ 2)}|"""
    _validate_nk(n, k)
    hist = _block_det_histogram(n - 1, k)
    total = 0
    for u in units_mod(k):
        inv = pow(u, -1, k)
        targets = {inv % k, (-inv) % k}
        total += sum(hist[t] for t in targets)
    return k ** (n - 1) * total


def is_congruence_described(m: ModMatrix, n: int, k: int) -> bool:
    """第一列在对角线以下全为 0 且 det ≡ ±1"""
    if any(m[i * n] % k for i in range(1, n)):
        return False
    return det_mod(m, n, k) in {1 % k, (-1) % k}


def extendable_generators(n: int, k: int) -> list[IntMatrix]:
    """
    标准化坐标下可扩张子群的生成元（整数矩阵）

    包括 E_1j(1)、E_ij(1)（i, j ≥ 2）、各坐标的符号翻转、坐标 2..n 的相邻对换，
    以及每个单位 u 的提升 [[u, b], [k, d]]（ud − bk = 1）。
    """
    gens = []

    def elementary(i, j):
        data = list(IntMatrix.identity(n).entries)
        data[i * n + j] = 1
        return IntMatrix(n, n, tuple(data))

    for j in range(1, n):
        gens.append(elementary(0, j))
    for i in range(1, n):
        for j in range(1, n):
            if i != j:
                gens.append(elementary(i, j))
    for i in range(n):
        gens.append(IntMatrix.diagonal([-1 if t == i else 1 for t in range(n)]))
    for i in range(1, n - 1):
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        gens.append(IntMatrix.from_rows([[int(perm[r] == c) for c in range(n)] for r in range(n)]))
    for u in units_mod(k):
        x, y, _ = xgcd(u, k)
        data = list(IntMatrix.identity(n).entries)
        data[0], data[1], data[n], data[n + 1] = u, -y, k, x
        lift = IntMatrix(n, n, tuple(data))
        if not lift.is_identity():
            gens.append(lift)
    return gens


def generate_subgroup(generators: Iterable[ModMatrix], n: int, k: int,
                      token: Optional[CancelToken] = None) -> frozenset:
    """模 k 下由生成元生成的子群（BFS 闭包）"""
    gens = list(dict.fromkeys(generators))
    start = identity_mod(n, k)
    seen = {start}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for g in gens:
            check(token)
            b = mat_mul_mod(a, g, n, k)
            if b not in seen:
                seen.add(b)
                if len(seen) > MAX_QUOTIENT_ORDER:
                    raise SearchCancelled("商群元素数超过上限", {"limit": MAX_QUOTIENT_ORDER})
                queue.append(b)
    return frozenset(seen)


def enumerate_described(n: int, k: int) -> frozenset:
    """穷举满足同余描述的全部矩阵（桌面规模）"""
    return frozenset(m for m in itertools.product(range(k), repeat=n * n)
                     if is_congruence_described(m, n, k))


def enumerate_quotient(n: int, k: int) -> frozenset:
    """穷举 {M : det ≡ ±1}（桌面规模）"""
    return frozenset(m for m in itertools.product(range(k), repeat=n * n)
                     if det_mod(m, n, k) in {1 % k, (-1) % k})


def congruence_image(n: int, k: int, token: Optional[CancelToken] = None) -> QuotientGroup:
    """
    可扩张自同构群在 GL(n, ℤ_k) 中的像 Ā

    由 extendable_generators 的约化生成；与同余描述的集合比较阶数，
    小规模时再逐元素比较。不一致时返回生成的子群并标记 uncertain。
    """
    _validate_nk(n, k)
    elements = generate_subgroup((g.reduce_mod(k) for g in extendable_generators(n, k)), n, k, token)
    uncertain = False
    expected = congruence_described_order(n, k)
    if len(elements) != expected:
        uncertain = True
    elif k ** (n * n) <= CONGRUENCE_DESK_CHECK_MAX and elements != enumerate_described(n, k):
        uncertain = True
    if uncertain:
        logger.warning("生成的同余像与同余描述不一致: n=%d, k=%d, |Ā|=%d, 期望 %d",
                       n, k, len(elements), expected)
    return QuotientGroup(n, k, elements, uncertain)


@dataclass(frozen=True)
class ProductCertificate:
    """乘积条件 Aut(H) = Aut(H)_{ℤⁿ}·Stab(S) 的判定证书"""

    holds: bool
    k: int
    a_order: int
    b_order: int
    intersection: int
    q_order: int
    stabilizer_order: int
    uncertain: bool = False
    # 失败时：未被覆盖的陪集代表（标准化坐标下的整数提升）及其在 L 坐标下的形式
    uncovered: Optional[IntMatrix] = None
    uncovered_tau: Optional[HAut] = None
    b_elements: frozenset = field(default=frozenset(), compare=False)

    @property
    def product(self) -> int:
        return self.a_order * self.b_order // self.intersection

    def to_json(self) -> dict:
        data = {
            "holds": self.holds,
            "k": self.k,
            "A_order": self.a_order,
            "B_order": self.b_order,
            "intersection": self.intersection,
            "product": self.product,
            "Q_order": self.q_order,
            "stabilizer_order": self.stabilizer_order,
            "uncertain": self.uncertain,
        }
        if self.uncovered is not None:
            data["uncovered"] = self.uncovered
            data["uncovered_tau"] = self.uncovered_tau
        return data


class QuotientAnalyzer:
    """把稳定子换到标准化坐标并在模 k 商中检验乘积条件"""

    def __init__(self, L: Lattice, token: Optional[CancelToken] = None):
        self.lattice = L
        self.token = token
        self.n = L.n
        self.k = index(L)
        if self.k is INFINITE or not is_squarefree(self.k):
            raise PreconditionError("乘积条件要求指数有限且无平方因子", {"index": self.k})
        self.sigma = standardize(L)
        # P = C⁻¹·σ·B，C = diag(k, 1, …, 1)：L 坐标到标准化 H 坐标
        sb = (self.sigma @ L.basis).to_rows()
        if any(x % self.k for x in sb[0]):
            raise VerificationError("σ(L) 的第一坐标不被 k 整除")
        sb[0] = [x // self.k for x in sb[0]]
        self.P = IntMatrix.from_rows(sb)
        self.P_inv = inverse_unimodular(self.P)

    def to_standard(self, tau: HAut) -> IntMatrix:
        return self.P @ tau.matrix @ self.P_inv

    def from_standard(self, M: IntMatrix) -> HAut:
        return HAut(self.P_inv @ M @ self.P)

    def reduce_stabilizer(self, stab: SymmetryGroup) -> frozenset:
        """B̄：稳定子在标准化坐标下模 k 的像"""
        return frozenset(self.to_standard(t).reduce_mod(self.k) for t in stab)

    def uncovered_lift(self, a_elements: frozenset, b_elements: frozenset) -> Optional[IntMatrix]:
        """
        在 Q̄ 中找一个不属于 Ā·B̄ 的元素，返回其整数幺模提升

        沿 GL(n, ℤ) 的初等生成元做 BFS，同时携带整数提升。
        """
        n, k = self.n, self.k
        covered = {mat_mul_mod(a, b, n, k) for a in a_elements for b in b_elements}
        gens = []
        for i in range(n):
            for j in range(n):
                if i != j:
                    data = list(IntMatrix.identity(n).entries)
                    data[i * n + j] = 1
                    gens.append(IntMatrix(n, n, tuple(data)))
        gens.append(IntMatrix.diagonal([-1] + [1] * (n - 1)))
        start = IntMatrix.identity(n)
        seen = {start.reduce_mod(k)}
        queue = deque([start])
        while queue:
            lift = queue.popleft()
            if lift.reduce_mod(k) not in covered:
                return lift
            for g in gens:
                check(self.token)
                nxt = lift @ g
                key = nxt.reduce_mod(k)
                if key not in seen:
                    seen.add(key)
                    queue.append(nxt)
        return None


def product_condition(L: Lattice, S: ConnectionSet,
                      token: Optional[CancelToken] = None,
                      stab: Optional[SymmetryGroup] = None) -> ProductCertificate:
    """
    判定 Aut(H) = Aut(H)_{ℤⁿ}·Stab_{Aut(H)}(S)

    在模 k 商中比较 |Ā|·|B̄|/|Ā∩B̄| 与 |Q̄|；失败时给出未被覆盖的陪集代表。

    Args:
        L: span(S)，指数 k 有限且无平方因子
        S: 连接集
        token: 取消令牌
        stab: 已算好的稳定子（可选）
    """
    if S.n != L.n or S.span() != L:
        raise PreconditionError("span(S) 不等于给定的格", {"lattice": L.to_json()})
    if L.n < 2:
        raise PreconditionError("乘积条件要求 n ≥ 2", {"n": L.n})
    k = index(L)
    if k is INFINITE or not is_squarefree(k):
        raise PreconditionError("乘积条件要求指数有限且无平方因子",
                                {"index": "INFINITE" if k is INFINITE else k})
    if stab is None:
        stab = set_stabilizer(L, S, token)
    if k == 1:
        return ProductCertificate(True, 1, 1, 1, 1, 1, stab.order)

    started = time.monotonic()
    analyzer = QuotientAnalyzer(L, token)
    b_elements = analyzer.reduce_stabilizer(stab)
    a_group = congruence_image(L.n, k, token)
    intersection = len(b_elements & a_group.elements)
    q_order = quotient_order(L.n, k)
    product = a_group.order * len(b_elements) // intersection
    holds = product == q_order
    uncovered = uncovered_tau = None
    if not holds:
        uncovered = analyzer.uncovered_lift(a_group.elements, b_elements)
        if uncovered is None:
            raise VerificationError("乘积条件失败但找不到未覆盖的陪集代表")
        uncovered_tau = analyzer.from_standard(uncovered)
    logger.info("乘积条件 k=%d: |Ā|=%d, |B̄|=%d, |Ā∩B̄|=%d, |Q̄|=%d → %s（%s）",
                k, a_group.order, len(b_elements), intersection, q_order,
                "成立" if holds else "不成立", format_duration(time.monotonic() - started))
    return ProductCertificate(
        holds=holds, k=k, a_order=a_group.order, b_order=len(b_elements),
        intersection=intersection, q_order=q_order, stabilizer_order=stab.order,
        uncertain=a_group.uncertain, uncovered=uncovered, uncovered_tau=uncovered_tau,
        b_elements=b_elements,
    )


def coset_coverage(n: int, k: int, b_elements: frozenset) -> bool:
    """
    直接的陪集覆盖检验

    把 Q̄ 划分为同余描述子群 D 的右陪集 D·q，检查每个陪集都与 B̄ 相交。
    """
    described = enumerate_described(n, k)
    remaining = set(enumerate_quotient(n, k))
    while remaining:
        q = min(remaining)
        coset = {mat_mul_mod(d, q, n, k) for d in described}
        if not coset & b_elements:
            return False
        remaining -= coset
    return True


def transport_set(L: Lattice, S: ConnectionSet, tau: HAut) -> ConnectionSet:
    """τ(S)：按 L 坐标作用后回到 ℤⁿ"""
    images = []
    for s in S.vectors:
        x = coordinates(L, s)
        if x is None:
            raise PreconditionError("S 的元素不在格中", {"vector": list(s)})
        images.append(L.basis.apply(tau.matrix.apply(x)))
    return validate(images, S.n, S.mode)
