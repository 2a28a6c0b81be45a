"""
判定分析器 - CI/DCI 判定、非 CI 证据与同构判定
"""
import logging
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional

from ..algebra.intlin import IntMatrix, Vector, integral_vector, inverse_unimodular, is_unimodular, solve_integer
from ..algebra.lattice import INFINITE, IndexValue, Lattice, coordinates, simultaneous_basis
from ..config import DEFAULT_SEED
from ..errors import InvalidInputError, PreconditionError
from ..graphs.cayley import ConnectionSet, ball, component_count, torus, validate
from ..oracle.isomorphism import Permutation, automorphisms_fixing
from ..utils.cancel import CancelToken
from ..utils.helpers import format_duration, is_squarefree, square_prime
from .quotient import (
    ProductCertificate, congruence_described_order, product_condition, quotient_order, transport_set,
)
from .symmetry import (
    LinearMapSearch, ambient_transporter, independent_subset, lattice_transporter, set_stabilizer,
)

logger = logging.getLogger(__name__)

UNCERTAIN = "UNCERTAIN"


class Reason(Enum):
    """判定理由"""

    N1_RIGIDITY = "N1_RIGIDITY"
    COMPONENTS_INFINITE = "COMPONENTS_INFINITE"
    COMPONENTS_NOT_SQUAREFREE = "COMPONENTS_NOT_SQUAREFREE"
    INDEX_OBSTRUCTION = "INDEX_OBSTRUCTION"
    PRODUCT_CONDITION_HOLDS = "PRODUCT_CONDITION_HOLDS"
    PRODUCT_CONDITION_FAILS = "PRODUCT_CONDITION_FAILS"

    @property
    def is_ci(self) -> bool:
        return self in (Reason.N1_RIGIDITY, Reason.PRODUCT_CONDITION_HOLDS)

    def to_json(self) -> str:
        return self.value


class IsoKind(Enum):
    AMBIENT_AUTOMORPHISM = "AMBIENT_AUTOMORPHISM"
    COMPONENTWISE = "COMPONENTWISE"
    NONE = "NONE"

    def to_json(self) -> str:
        return self.value


@dataclass(frozen=True)
class Witness:
    """非 CI 证据：S′ 以及从 span(S) 到 span(S′) 的坐标同构"""

    connection_set: ConnectionSet
    lattice_map: IntMatrix

    def to_json(self) -> dict:
        return {"set": self.connection_set, "map": self.lattice_map}


@dataclass(frozen=True)
class CiVerdict:
    """CI 判定结果"""

    connection_set: ConnectionSet
    is_ci: bool
    reason: Reason
    components: IndexValue
    certificate: Optional[ProductCertificate] = None
    witness: Optional[Witness] = None
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.is_ci != self.reason.is_ci:
            raise InvalidInputError(f"判定结果与理由不一致: {self.reason.value}")

    @property
    def uncertain(self) -> bool:
        return UNCERTAIN in self.flags

    def to_json(self) -> dict:
        return {
            "is_ci": self.is_ci,
            "reason": self.reason,
            "n": self.connection_set.n,
            "k": self.components,
            "set": self.connection_set,
            "certificate": self.certificate,
            "witness": self.witness,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class IsoWitness:
    """
    同构证据

    AMBIENT_AUTOMORPHISM 时 matrix 是 ℤⁿ 的幺模矩阵；
    COMPONENTWISE 时 matrix 是 span(S) 的基坐标到 span(S′) 的基坐标的同构。
    """

    kind: IsoKind
    source: ConnectionSet
    target: ConnectionSet
    matrix: Optional[IntMatrix] = None
    components: Optional[IndexValue] = None

    def __bool__(self) -> bool:
        return self.kind is not IsoKind.NONE

    def lattice_matrix(self) -> IntMatrix:
        """两种证据统一成分支格之间的坐标矩阵"""
        if self.kind is IsoKind.COMPONENTWISE:
            return self.matrix
        if self.kind is IsoKind.NONE:
            raise PreconditionError("NONE 没有对应的映射")
        L, L2 = self.source.span(), self.target.span()
        return IntMatrix.from_columns([coordinates(L2, self.matrix.apply(b)) for b in L.columns()])

    def inverse(self) -> "IsoWitness":
        if self.kind is IsoKind.NONE:
            return IsoWitness(IsoKind.NONE, self.target, self.source)
        return IsoWitness(self.kind, self.target, self.source,
                          inverse_unimodular(self.matrix), self.components)

    def then(self, other: "IsoWitness") -> "IsoWitness":
        """先作用 self 再作用 other"""
        if other.source != self.target:
            raise PreconditionError("证据不能复合：中间连接集不一致")
        if not self or not other:
            return IsoWitness(IsoKind.NONE, self.source, other.target)
        if self.kind is other.kind is IsoKind.AMBIENT_AUTOMORPHISM:
            return IsoWitness(IsoKind.AMBIENT_AUTOMORPHISM, self.source, other.target,
                              other.matrix @ self.matrix, self.components)
        return IsoWitness(IsoKind.COMPONENTWISE, self.source, other.target,
                          other.lattice_matrix() @ self.lattice_matrix(), self.components)

    def verify(self) -> bool:
        """重新检查映射确实把 S 映满 S′"""
        if self.kind is IsoKind.NONE:
            return True
        if not is_unimodular(self.matrix):
            return False
        if self.kind is IsoKind.AMBIENT_AUTOMORPHISM:
            return self.source.apply(self.matrix) == self.target
        return maps_onto(self.source, self.target, self.matrix) and \
            component_count(self.source) == component_count(self.target)

    def to_json(self) -> dict:
        return {"kind": self.kind, "matrix": self.matrix, "components": self.components}


class Linearity(Enum):
    """verify_linearity 的结果"""

    LINEAR = "LINEAR"
    NOT_LINEAR = "NOT_LINEAR"
    NOT_DETERMINED = "NOT_DETERMINED"

    def __bool__(self) -> bool:
        return self is Linearity.LINEAR

    def to_json(self) -> str:
        return self.value


def maps_onto(S: ConnectionSet, S2: ConnectionSet, tau: IntMatrix) -> bool:
    """坐标矩阵 τ: span(S) → span(S′) 是否把 S 映满 S′"""
    L, L2 = S.span(), S2.span()
    if tau.rows != L2.rank or tau.cols != L.rank:
        return False
    image = set()
    for s in S.vectors:
        image.add(L2.basis.apply(tau.apply(coordinates(L, s))))
    return image == S2.as_set()


def _verify_witness(S: ConnectionSet, S2: ConnectionSet,
                    token: Optional[CancelToken] = None) -> Optional[IntMatrix]:
    """逐分支同构存在且不存在环境传递映射时，返回分支格之间的同构"""
    if component_count(S) != component_count(S2):
        return None
    tau = lattice_transporter(S.span(), S, S2.span(), S2, token)
    if tau is None:
        return None
    if ambient_transporter(S, S2, token) is not None:
        return None
    return tau


def _doubling_witness(S: ConnectionSet) -> ConnectionSet:
    """把同时基的 y₁ 方向加倍"""
    L = S.span()
    Y, _ = simultaneous_basis(L)
    psi = Y @ IntMatrix.diagonal([2] + [1] * (S.n - 1)) @ inverse_unimodular(Y)
    return S.apply(psi)


def _reembedding_witness(S: ConnectionSet, k: int) -> ConnectionSet:
    """在不变因子之间挪动一个因子 p，使 ℤⁿ/H 的 p-部分改变同构型"""
    p = square_prime(k)
    L = S.span()
    Y, a = simultaneous_basis(L)
    n = S.n
    new = list(a)
    if a[n - 2] % p:
        new[n - 2] *= p
        new[n - 1] //= p
    else:
        new[n - 2] //= p
        new[n - 1] *= p
    D = IntMatrix.from_columns([tuple(ai * x for x in Y.col(i)) for i, ai in enumerate(a)])
    D2 = IntMatrix.from_columns([tuple(ai * x for x in Y.col(i)) for i, ai in enumerate(new)])
    return validate([D2.apply(solve_integer(D, s)) for s in S.vectors], n, S.mode)


def non_ci_witness(S: ConnectionSet, reason: Reason,
                   certificate: Optional[ProductCertificate] = None,
                   token: Optional[CancelToken] = None) -> Optional[ConnectionSet]:
    """
    构造非 CI 证据 S′

    Cay(ℤⁿ;S′) ≅ Cay(ℤⁿ;S)，但没有 ℤⁿ 的自同构把 S 映到 S′。
    每个候选都重新验证，验证失败时返回 None。
    """
    found = _witness(S, reason, certificate, token)
    return found.connection_set if found is not None else None


def _witness(S: ConnectionSet, reason: Reason, certificate: Optional[ProductCertificate],
             token: Optional[CancelToken]) -> Optional[Witness]:
    if reason is Reason.COMPONENTS_INFINITE:
        candidate = _doubling_witness(S)
    elif reason is Reason.COMPONENTS_NOT_SQUAREFREE:
        candidate = _reembedding_witness(S, component_count(S))
    elif reason in (Reason.PRODUCT_CONDITION_FAILS, Reason.INDEX_OBSTRUCTION):
        if certificate is None or certificate.uncovered_tau is None:
            raise PreconditionError("需要带有未覆盖陪集代表的乘积条件证书")
        candidate = transport_set(S.span(), S, certificate.uncovered_tau)
    else:
        raise PreconditionError(f"{reason.value} 不是否定判定")
    tau = _verify_witness(S, candidate, token)
    if tau is None:
        logger.error("❌ 非 CI 证据未通过验证: %s", [list(v) for v in candidate.vectors])
        return None
    return Witness(candidate, tau)


def index_bound(n: int, k: int) -> int:
    """[Q̄ : Ā]，按同余描述的阶计算"""
    return quotient_order(n, k) // congruence_described_order(n, k)


def decide_ci(S: ConnectionSet, token: Optional[CancelToken] = None) -> CiVerdict:
    """
    判定 Cay(ℤⁿ;S) 是否为 (D)CI 图

    Args:
        S: 非空连接集
        token: 取消令牌

    Returns:
        CiVerdict，否定结论附带经过验证的 S′
    """
    if not len(S):
        raise InvalidInputError("连接集不能为空")
    started = time.monotonic()
    k = component_count(S)
    if S.n == 1:
        return CiVerdict(S, True, Reason.N1_RIGIDITY, k)

    if k is INFINITE:
        reason = Reason.COMPONENTS_INFINITE
    elif not is_squarefree(k):
        reason = Reason.COMPONENTS_NOT_SQUAREFREE
    else:
        reason = None
    if reason is not None:
        logger.info("分支数 %s 不满足条件: %s", k, reason.value)
        return CiVerdict(S, False, reason, k, witness=_witness(S, reason, None, token))

    L = S.span()
    stab = set_stabilizer(L, S, token)
    obstructed = k > 1 and stab.order < index_bound(S.n, k)
    cert = product_condition(L, S, token, stab)
    flags = (UNCERTAIN,) if cert.uncertain else ()
    if obstructed:
        reason = Reason.INDEX_OBSTRUCTION
    elif cert.holds:
        reason = Reason.PRODUCT_CONDITION_HOLDS
    else:
        reason = Reason.PRODUCT_CONDITION_FAILS
    witness = None if reason.is_ci else _witness(S, reason, cert, token)
    logger.info("判定完成: %s（%s）", reason.value, format_duration(time.monotonic() - started))
    return CiVerdict(S, reason.is_ci, reason, k, cert, witness, flags)


def are_isomorphic(S: ConnectionSet, S2: ConnectionSet,
                   token: Optional[CancelToken] = None) -> IsoWitness:
    """
    判定 Cay(ℤⁿ;S) ≅ Cay(ℤⁿ;S′)

    分支都同构于 Cay(H;S)，而分支之间的同构都是群同构，
    所以只需要在 span(S) 与 span(S′) 之间搜索线性映射。
    """
    if S.n != S2.n:
        raise InvalidInputError(f"维数不同: {S.n} 与 {S2.n}")
    if S.mode is not S2.mode:
        raise InvalidInputError("有向与无向连接集不能比较")
    k, k2 = component_count(S), component_count(S2)
    none = IsoWitness(IsoKind.NONE, S, S2)
    if len(S) != len(S2):
        return none
    L, L2 = S.span(), S2.span()
    if L.rank != L2.rank:
        return none
    M = ambient_transporter(S, S2, token)
    if M is not None:
        return IsoWitness(IsoKind.AMBIENT_AUTOMORPHISM, S, S2, M, k)
    if k != k2:
        return none
    tau = lattice_transporter(L, S, L2, S2, token)
    if tau is None:
        return none
    return IsoWitness(IsoKind.COMPONENTWISE, S, S2, tau, k)


def z_iso_decide(S: Iterable[int], S2: Iterable[int]) -> Optional[int]:
    """ℤ 上的有限连接集：S′ = S 返回 +1，S′ = −S 返回 −1，否则 None"""
    a, b = frozenset(S), frozenset(S2)
    if 0 in a or 0 in b:
        raise InvalidInputError("连接集不能包含 0")
    if not a or not b:
        raise InvalidInputError("连接集不能为空")
    if a == b:
        return 1
    if b == frozenset(-x for x in a):
        return -1
    return None


def verify_linearity(S: ConnectionSet, phi: Mapping[Vector, Vector], r: int) -> Linearity:
    """
    检查球上的顶点双射 φ 是否与其在 S 上确定的线性映射一致

    φ 必须是 ball(S, r) 上保持弧的双射；线性性在内层球 ball(S, r−1) 上检查。
    """
    if r < 2:
        raise PreconditionError("半径必须至少为 2", {"radius": r})
    origin = tuple([0] * S.n)
    outer = ball(S, r)
    labels = set(outer.vertices)
    if set(phi) != labels:
        raise PreconditionError("φ 必须恰好定义在 ball(S, r) 上")
    if tuple(phi[origin]) != origin:
        raise PreconditionError("φ 必须固定 0", {"image": list(phi[origin])})
    images = {tuple(v) for v in phi.values()}
    if images != labels:
        return Linearity.NOT_LINEAR
    arcs = {(outer.vertices[i], outer.vertices[j]) for i, j in outer.arcs}
    if any((tuple(phi[a]), tuple(phi[b])) not in arcs for a, b in arcs):
        return Linearity.NOT_LINEAR

    search = LinearMapSearch(S.vectors)
    basis_images = [tuple(phi[b]) for b in search.basis]
    if len(independent_subset(basis_images)) != len(basis_images):
        return Linearity.NOT_DETERMINED
    for x in ball(S, r - 1).vertices:
        value = integral_vector(search.evaluate(basis_images, x))
        if value != tuple(phi[x]):
            return Linearity.NOT_LINEAR
    return Linearity.LINEAR


@dataclass(frozen=True)
class NormalityReport:
    """环面商上固定 0 的自同构与稳定子约化的比较"""

    modulus: int
    automorphisms: int
    stabilizer: int
    coincide: bool
    extra: tuple = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "automorphisms_fixing_zero": self.automorphisms,
            "stabilizer_order": self.stabilizer,
            "coincide": self.coincide,
        }


def torus_normality(S: ConnectionSet, m: int, token: Optional[CancelToken] = None) -> NormalityReport:
    """
    桌面规模的正规性检查

    对连通的 S，torus(S, m) 中固定 0 的自同构应恰好是 set_stabilizer 元素的模 m 约化。
    """
    if component_count(S) != 1:
        raise PreconditionError("正规性检查要求 Cay(ℤⁿ;S) 连通")
    graph = torus(S, m)
    position = graph.index_of()
    autos = set(automorphisms_fixing(graph, position[tuple([0] * S.n)], token))
    L = S.span()
    stab = set_stabilizer(L, S, token)
    reduced = set()
    for tau in stab:
        # span(S) = ℤⁿ 时 HNF 基为单位阵，τ 即环境矩阵
        M = L.basis @ tau.matrix @ inverse_unimodular(L.basis)
        reduced.add(Permutation(tuple(
            position[tuple(x % m for x in M.apply(v))] for v in graph.vertices
        )))
    extra = tuple(sorted(p.images for p in autos - reduced))
    return NormalityReport(m, len(autos), len(reduced), autos == reduced, extra)


def random_unimodular(rng: random.Random, n: int, bound: int = 3,
                      max_tries: int = 10000) -> IntMatrix:
    """元素取自 [−bound, bound] 的随机幺模矩阵（拒绝采样）"""
    for _ in range(max_tries):
        M = IntMatrix(n, n, tuple(rng.randint(-bound, bound) for _ in range(n * n)))
        if is_unimodular(M):
            return M
    raise PreconditionError("随机幺模矩阵采样失败", {"n": n, "bound": bound})


def _stabilizer_conjugate(L: Lattice, alpha: IntMatrix, stab) -> set:
    """α·Stab·α⁻¹，换到 α(L) 的存储基坐标"""
    L2 = L.image(alpha)
    U = IntMatrix.from_columns([coordinates(L2, alpha.apply(b)) for b in L.columns()])
    U_inv = inverse_unimodular(U)
    return {U @ tau.matrix @ U_inv for tau in stab}


@dataclass(frozen=True)
class EquivarianceReport:
    """随机 α 下判定与稳定子的不变性检查"""

    seed: int
    trials: int
    reason: Reason
    mismatches: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {"seed": self.seed, "trials": self.trials, "reason": self.reason,
                "passed": self.passed, "mismatches": list(self.mismatches)}


def equivariance_check(S: ConnectionSet, trials: int = 50, seed: Optional[int] = None,
                       token: Optional[CancelToken] = None) -> EquivarianceReport:
    """
    decide_ci(α(S)) 与 decide_ci(S) 的结论和理由应当一致，
    Stab(α(S)) 应当等于 α·Stab(S)·α⁻¹

    Args:
        S: 连接集
        trials: 随机 α 的个数
        seed: 随机种子，默认取配置
        token: 取消令牌
    """
    seed = DEFAULT_SEED if seed is None else seed
    rng = random.Random(seed)
    base = decide_ci(S, token)
    L = S.span()
    stab = set_stabilizer(L, S, token)
    mismatches = []
    for trial in range(trials):
        alpha = random_unimodular(rng, S.n)
        image = S.apply(alpha)
        verdict = decide_ci(image, token)
        if (verdict.is_ci, verdict.reason) != (base.is_ci, base.reason):
            mismatches.append({"trial": trial, "alpha": alpha, "reason": verdict.reason})
            continue
        expected = _stabilizer_conjugate(L, alpha, stab)
        actual = {tau.matrix for tau in set_stabilizer(image.span(), image, token)}
        if expected != actual:
            mismatches.append({"trial": trial, "alpha": alpha, "stabilizer_order": len(actual)})
    if mismatches:
        logger.error("❌ 不变性检查失败 %d 次", len(mismatches))
    else:
        logger.info("✓ 不变性检查通过（%d 个随机 α）", trials)
    return EquivarianceReport(seed, trials, base.reason, tuple(mismatches))
