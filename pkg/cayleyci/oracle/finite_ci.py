"""
有限 CI 检验 - 正则子群共轭、有限群扫描与 ℤ 上的模 5 演示
"""
import itertools
import logging
import time
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from ..config import FINITE_SCAN_MAX_ORDER, SCAN_WORKERS
from ..errors import PreconditionError, VerificationError
from ..graphs.cayley import FiniteGraph, Mode, ResidueSet, residue_window
from ..groups.abelian import FiniteAbelianGroup, GroupAutomorphism, aut_group_elements
from ..utils.cancel import CancelToken, check
from ..utils.helpers import format_duration
from .isomorphism import Permutation, graph_iso, is_isomorphism

logger = logging.getLogger(__name__)


def cayley_graph(G: FiniteAbelianGroup, S: Iterable, mode=Mode.UNDIRECTED) -> FiniteGraph:
    """Cay(G;S)：弧 g → g + s；无向时 S 先补全逆元"""
    mode = Mode.parse(mode)
    S = G.subset(S, symmetric=mode is Mode.UNDIRECTED)
    vertices = tuple(G.elements())
    position = {v: i for i, v in enumerate(vertices)}
    arcs = frozenset((position[g], position[G.add(g, s)]) for g in vertices for s in S)
    return FiniteGraph(vertices, arcs)


def complement_set(G: FiniteAbelianGroup, S: Iterable) -> frozenset:
    """G ∖ (S ∪ {0})，对应补图的连接集"""
    return G.complement(S)


def translations(G: FiniteAbelianGroup, graph: FiniteGraph) -> frozenset:
    """右正则表示 {x ↦ x + h}"""
    position = graph.index_of()
    return frozenset(
        Permutation(tuple(position[G.add(v, h)] for v in graph.vertices)) for h in G.elements()
    )


def _as_permutation(alpha: GroupAutomorphism, graph: FiniteGraph) -> Permutation:
    position = graph.index_of()
    return Permutation(tuple(position[alpha(v)] for v in graph.vertices))


def _conjugate(a: Permutation, R: frozenset) -> frozenset:
    inv = a.inverse()
    return frozenset(a @ r @ inv for r in R)


@dataclass(frozen=True)
class RegularCopy:
    """
    Aut(Γ) 中的正则子群 R = f T f⁻¹

    f 是 Cay(G;S′) → Γ 的同构，T 是平移子群；S′ 是 R 诱导的连接集。
    """

    connection_set: frozenset
    labeling: Permutation
    elements: frozenset


def _walk_profile(G: FiniteAbelianGroup, S: frozenset) -> tuple:
    """顶点 0 出发的 2 步路数目按终点分布（同构不变量）"""
    walks = Counter(G.add(s, t) for s in S for t in S)
    return tuple(sorted((walks[g], g in S, g == G.zero) for g in walks))


def _candidate_sets(G: FiniteAbelianGroup, size: int, mode: Mode) -> Iterator[frozenset]:
    """与 S 同样大小的全部连接集；无向时只取逆元封闭的"""
    nonzero = [e for e in G.elements() if e != G.zero]
    if mode is Mode.DIRECTED:
        for combo in itertools.combinations(nonzero, size):
            yield frozenset(combo)
        return
    involutions = [e for e in nonzero if G.neg(e) == e]
    pairs = sorted({frozenset([e, G.neg(e)]) for e in nonzero if G.neg(e) != e}, key=sorted)
    for count in range(size % 2, min(len(involutions), size) + 1, 2):
        for singles in itertools.combinations(involutions, count):
            for chosen in itertools.combinations(pairs, (size - count) // 2):
                yield frozenset(singles).union(*chosen)


class RegularCopyAnalyzer:
    """
    逐个检查 Aut(Cay(G;S)) 中同构于 G 的正则子群是否与平移子群共轭

    每个这样的正则子群连同一个同构 G → R 对应一个标号 f，
    f 是某个 Cay(G;S′) → Γ 的同构；枚举 S′ 即枚举全部正则子群。
    S′ 落在 Aut(G)·S 中时 R 与 T 共轭，其余情形搜索共轭自同构。
    """

    def __init__(self, G: FiniteAbelianGroup, S: Iterable, mode=Mode.UNDIRECTED,
                 token: Optional[CancelToken] = None):
        self.G = G
        self.mode = Mode.parse(mode)
        self.token = token
        S = G.subset(S, symmetric=self.mode is Mode.UNDIRECTED)
        # 补图的自同构群相同；取较小的一侧枚举
        self.flipped = 2 * len(S) > G.order - 1
        self.S = G.complement(S) if self.flipped else S
        self.graph = cayley_graph(G, self.S, self.mode)
        self.autos = aut_group_elements(G)
        self.orbit = {alpha.apply_set(self.S) for alpha in self.autos}
        self.base = translations(G, self.graph)
        self.checked = 0

    def regular_copy(self, S2: frozenset, labeling: Permutation) -> RegularCopy:
        """R = f T f⁻¹，并复查 R ≤ Aut(Γ) 且正则"""
        R = _conjugate(labeling, self.base)
        origin = self.graph.index_of()[self.G.zero]
        if len({r(origin) for r in R}) != self.G.order:
            raise VerificationError("诱导的子群不是正则的")
        if not all(is_isomorphism(self.graph, self.graph, r) for r in R):
            raise VerificationError("诱导的子群不在 Aut(Γ) 中")
        original = self.G.complement(S2) if self.flipped else S2
        return RegularCopy(original, labeling, R)

    def conjugator(self, copy: RegularCopy) -> Optional[Permutation]:
        """寻找 a ∈ Aut(Γ) 使 a T a⁻¹ = R；候选为 f∘α，α ∈ Aut(G) 且 α(S) = S′"""
        target = self.G.complement(copy.connection_set) if self.flipped else copy.connection_set
        for alpha in self.autos:
            check(self.token)
            if alpha.apply_set(self.S) != target:
                continue
            a = copy.labeling @ _as_permutation(alpha, self.graph)
            if is_isomorphism(self.graph, self.graph, a) and _conjugate(a, self.base) == copy.elements:
                return a
        return None

    def find_non_conjugate(self) -> Optional[RegularCopy]:
        """返回第一个不与 T 共轭的正则子群；全部共轭时返回 None"""
        profile = _walk_profile(self.G, self.S)
        for S2 in _candidate_sets(self.G, len(self.S), self.mode):
            check(self.token)
            if S2 in self.orbit or _walk_profile(self.G, S2) != profile:
                continue
            self.checked += 1
            labeling = graph_iso(cayley_graph(self.G, S2, self.mode), self.graph, self.token)
            if labeling is None:
                continue
            copy = self.regular_copy(S2, labeling)
            if self.conjugator(copy) is None:
                return copy
        return None


def ci_check_finite(G: FiniteAbelianGroup, S: Iterable, mode=Mode.UNDIRECTED,
                    token: Optional[CancelToken] = None) -> bool:
    """
    判定 Cay(G;S) 是否为 CI 图

    Aut(Γ) 中同构于 G 的正则子群全部共轭时为 CI 图。
    """
    analyzer = RegularCopyAnalyzer(G, S, mode, token)
    copy = analyzer.find_non_conjugate()
    logger.info("G=%s: Aut(G)·S 含 %d 个连接集, 图同构检查 %d 次",
                G.moduli, len(analyzer.orbit), analyzer.checked)
    if copy is not None:
        logger.info("❌ 正则子群不与平移子群共轭，诱导连接集 %s", sorted(copy.connection_set))
        return False
    return True


def _canonical(S: frozenset, autos) -> tuple:
    """Aut(G)-轨道中字典序最小的代表"""
    return min(tuple(sorted(alpha.apply_set(S))) for alpha in autos)


def _connection_sets(G: FiniteAbelianGroup, mode: Mode) -> list[frozenset]:
    nonzero = [e for e in G.elements() if e != G.zero]
    if mode is Mode.DIRECTED:
        blocks = [frozenset([e]) for e in nonzero]
    else:
        blocks = sorted({frozenset([e, G.neg(e)]) for e in nonzero}, key=sorted)
    result = []
    for size in range(1, len(blocks) + 1):
        for combo in itertools.combinations(blocks, size):
            result.append(frozenset().union(*combo))
    return result


def _bucket_key(G: FiniteAbelianGroup, S: tuple, mode: Mode) -> tuple:
    graph = cayley_graph(G, S, mode)
    out = graph.out_neighbours()
    triangles = sum(1 for j in out[0] for l in out[j] if 0 in out[l])
    return len(S), graph.component_count(), triangles


def _scan_bucket(moduli: tuple, mode_value: str, bucket: list) -> list:
    """桶内两两比较；不同 Aut(G)-轨道的代表之间的同构即为非 CI 对"""
    G = FiniteAbelianGroup(moduli)
    mode = Mode(mode_value)
    graphs = [cayley_graph(G, S, mode) for S in bucket]
    pairs = []
    for i, j in itertools.combinations(range(len(bucket)), 2):
        if graph_iso(graphs[i], graphs[j]) is not None:
            pairs.append((bucket[i], bucket[j]))
    return pairs


@dataclass(frozen=True)
class NonCIPair:
    """Cay(G;S) ≅ Cay(G;S′) 但没有 G 的自同构把 S 映到 S′"""

    first: tuple
    second: tuple
    isomorphism: Permutation

    def to_json(self) -> dict:
        return {"S": [list(x) for x in self.first], "S_prime": [list(x) for x in self.second],
                "isomorphism": self.isomorphism}


def finite_ci_group_scan(G: FiniteAbelianGroup, mode=Mode.UNDIRECTED,
                         token: Optional[CancelToken] = None,
                         workers: Optional[int] = None) -> list[NonCIPair]:
    """
    扫描 G 上全部连接集（按 Aut(G) 等价去重），返回非 CI 对

    Args:
        G: 阶不超过 FINITE_SCAN_MAX_ORDER 的有限交换群
        mode: 无向（CI）或有向（DCI）
        token: 取消令牌（只在单进程时检查）
        workers: 进程数，默认取配置
    """
    mode = Mode.parse(mode)
    if G.order > FINITE_SCAN_MAX_ORDER:
        raise PreconditionError(f"群的阶 {G.order} 超过扫描上限 {FINITE_SCAN_MAX_ORDER}")
    workers = workers or SCAN_WORKERS
    started = time.monotonic()
    autos = aut_group_elements(G)
    reps = set()
    for S in _connection_sets(G, mode):
        check(token)
        reps.add(_canonical(S, autos))
    buckets = defaultdict(list)
    for S in sorted(reps):
        buckets[_bucket_key(G, S, mode)].append(S)
    logger.info("扫描 G=%s（%s）: %d 个轨道代表, %d 个桶",
                G.moduli, mode.value, len(reps), len(buckets))

    jobs = [sorted(b) for _, b in sorted(buckets.items()) if len(b) > 1]
    raw = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for pairs in pool.map(_scan_bucket, [G.moduli] * len(jobs), [mode.value] * len(jobs), jobs):
                raw.extend(pairs)
    else:
        for bucket in jobs:
            check(token)
            raw.extend(_scan_bucket(G.moduli, mode.value, bucket))

    result = []
    for S, S2 in sorted(raw):
        g1, g2 = cayley_graph(G, S, mode), cayley_graph(G, S2, mode)
        perm = graph_iso(g1, g2, token)
        if perm is None or not is_isomorphism(g1, g2, perm):
            raise VerificationError("非 CI 对的同构未通过复查")
        target = frozenset(S2)
        if any(alpha.apply_set(S) == target for alpha in autos):
            raise VerificationError("非 CI 对之间存在群自同构")
        result.append(NonCIPair(S, S2, perm))
    logger.info("✓ 扫描完成: %d 个非 CI 对（%s）", len(result), format_duration(time.monotonic() - started))
    return result


# ℤ 上的五种情形：i ≡ 0, 1, 2, 3, 4 (mod 5) 时分别加 0, 1, 2, −2, −1
_MOD5_SHIFT = (0, 1, 2, -2, -1)
MOD5_S = ResidueSet(5, frozenset({1, 4}))
MOD5_S_PRIME = ResidueSet(5, frozenset({2, 3}))


def mod5_map(i: int) -> int:
    return i + _MOD5_SHIFT[i % 5]


@dataclass(frozen=True)
class Mod5Report:
    window: int
    verified: bool
    checked_pairs: int
    residues_differ: bool

    def to_json(self) -> dict:
        return {"N": self.window, "verified": self.verified,
                "checked_pairs": self.checked_pairs, "residues_differ": self.residues_differ}


def mod5_demo(N: int) -> Mod5Report:
    """
    验证 φ 是 Cay(ℤ; i ≡ ±1) 到 Cay(ℤ; i ≡ ±2) 的同构（在窗口内）

    只检查 [−N+2, N−2]，这样 φ 的像仍落在窗口 [−N, N] 中。
    """
    if N < 10:
        raise PreconditionError("窗口 N 至少为 10", {"N": N})
    g1 = residue_window(MOD5_S, N)
    g2 = residue_window(MOD5_S_PRIME, N)
    pos1, pos2 = g1.index_of(), g2.index_of()
    inner = range(-N + 2, N - 1)
    images = [mod5_map(i) for i in inner]
    ok = len(set(images)) == len(images)
    checked = 0
    for i in inner:
        a, fa = pos1[(i,)], pos2[(mod5_map(i),)]
        for j in inner:
            if i == j:
                continue
            checked += 1
            if ((a, pos1[(j,)]) in g1.arcs) != ((fa, pos2[(mod5_map(j),)]) in g2.arcs):
                ok = False
    differ = MOD5_S_PRIME.classes not in (MOD5_S.classes, MOD5_S.negated().classes)
    return Mod5Report(N, ok and differ, checked, differ)
