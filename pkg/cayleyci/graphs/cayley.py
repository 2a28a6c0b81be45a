"""
Cayley 图模块 - 连接集、有限截断（球、环面商）与 ℤ 上的剩余类连接集
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterable, Optional, Sequence

import networkx as nx

from ..algebra.intlin import IntMatrix, Vector
from ..algebra.lattice import IndexValue, Lattice, index, span
from ..errors import InvalidInputError, PreconditionError
from ..utils.helpers import parse_json_int, sign_closure

logger = logging.getLogger(__name__)


class Mode(Enum):
    """有向 / 无向"""

    DIRECTED = "directed"
    UNDIRECTED = "undirected"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, Mode):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidInputError(f"未知的模式: {value!r}（应为 directed 或 undirected）")

    def to_json(self) -> str:
        return self.value


@dataclass(frozen=True)
class ConnectionSet:
    """
    连接集 S ⊂ ℤⁿ∖{0}

    vectors 去重并按字典序排列；无向模式下总是对取负封闭。
    """

    n: int
    mode: Mode
    vectors: tuple[Vector, ...]

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __contains__(self, v) -> bool:
        return tuple(v) in self.as_set()

    def as_set(self) -> frozenset:
        return frozenset(self.vectors)

    @property
    def directed(self) -> bool:
        return self.mode is Mode.DIRECTED

    def underlying(self) -> tuple[Vector, ...]:
        """S ∪ −S（底图的连接集）"""
        return tuple(sorted(sign_closure(self.vectors)))

    def max_abs(self) -> int:
        return max(abs(x) for v in self.vectors for x in v)

    def span(self) -> Lattice:
        return span(self.vectors, self.n)

    def apply(self, M: IntMatrix) -> "ConnectionSet":
        """α(S)，α 为 n×n 整数矩阵"""
        return validate([M.apply(v) for v in self.vectors], self.n, self.mode)

    def to_json(self) -> dict:
        return {"n": self.n, "mode": self.mode.value, "set": [list(v) for v in self.vectors]}

    @classmethod
    def from_json(cls, value) -> "ConnectionSet":
        """{"n": int, "mode": "directed"|"undirected", "set": [[int, …], …]}"""
        if not isinstance(value, dict):
            raise InvalidInputError("连接集必须是 JSON 对象")
        missing = {"n", "set"} - set(value)
        if missing:
            raise InvalidInputError(f"连接集缺少字段: {sorted(missing)}")
        raw = value["set"]
        if not isinstance(raw, list) or not all(isinstance(v, list) for v in raw):
            raise InvalidInputError("set 必须是整数向量的列表")
        try:
            vectors = [[parse_json_int(x) for x in v] for v in raw]
            n = parse_json_int(value["n"])
        except ValueError as e:
            raise InvalidInputError(str(e))
        return validate(vectors, n, value.get("mode", Mode.UNDIRECTED.value))


@dataclass(frozen=True)
class FiniteGraph:
    """有限（有向）图：顶点为标签列表，弧为下标对"""

    vertices: tuple[Hashable, ...]
    arcs: frozenset
    arc_labels: Optional[dict] = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        count = len(self.vertices)
        for i, j in self.arcs:
            if not (0 <= i < count and 0 <= j < count):
                raise InvalidInputError(f"弧 ({i}, {j}) 引用了不存在的顶点")

    @property
    def order(self) -> int:
        return len(self.vertices)

    def index_of(self) -> dict:
        return {label: i for i, label in enumerate(self.vertices)}

    def out_neighbours(self) -> list[set]:
        out = [set() for _ in self.vertices]
        for i, j in self.arcs:
            out[i].add(j)
        return out

    def in_neighbours(self) -> list[set]:
        inc = [set() for _ in self.vertices]
        for i, j in self.arcs:
            inc[j].add(i)
        return inc

    def is_symmetric(self) -> bool:
        return all((j, i) in self.arcs for i, j in self.arcs)

    def has_arc(self, a: Hashable, b: Hashable) -> bool:
        idx = self.index_of()
        return a in idx and b in idx and (idx[a], idx[b]) in self.arcs

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.order))
        g.add_edges_from(self.arcs)
        return g

    def component_count(self) -> int:
        """底图的连通分支数"""
        return nx.number_weakly_connected_components(self.to_networkx())

    def induced(self, labels: Iterable[Hashable]) -> "FiniteGraph":
        """在给定顶点集上的诱导子图（保持原顶点顺序）"""
        keep = set(labels)
        old = [i for i, v in enumerate(self.vertices) if v in keep]
        remap = {i: k for k, i in enumerate(old)}
        arcs = frozenset((remap[i], remap[j]) for i, j in self.arcs if i in remap and j in remap)
        labels_out = None
        if self.arc_labels is not None:
            labels_out = {(remap[i], remap[j]): s for (i, j), s in self.arc_labels.items()
                          if i in remap and j in remap}
        return FiniteGraph(tuple(self.vertices[i] for i in old), arcs, labels_out)


@dataclass(frozen=True)
class ResidueSet:
    """ℤ 上的剩余类连接集 {i : i mod m ∈ classes}"""

    modulus: int
    classes: frozenset
    mode: Mode = Mode.UNDIRECTED

    def __post_init__(self):
        if self.modulus < 2:
            raise InvalidInputError(f"模数必须至少为 2: {self.modulus}")
        if not self.classes:
            raise InvalidInputError("剩余类集合不能为空")
        for c in self.classes:
            if not 0 < c < self.modulus:
                raise InvalidInputError(f"剩余类 {c} 不在 1..{self.modulus - 1} 中（0 类会产生自环）")
        if self.mode is Mode.UNDIRECTED:
            closed = {c % self.modulus for c in self.classes} | {(-c) % self.modulus for c in self.classes}
            object.__setattr__(self, "classes", frozenset(closed))

    def contains(self, i: int) -> bool:
        return i % self.modulus in self.classes

    def negated(self) -> "ResidueSet":
        return ResidueSet(self.modulus, frozenset((-c) % self.modulus for c in self.classes), self.mode)

    def to_json(self) -> dict:
        return {"modulus": self.modulus, "classes": sorted(self.classes), "mode": self.mode.value}


def validate(raw: Iterable[Sequence[int]], n: int, mode) -> ConnectionSet:
    """
    校验并规范化连接集

    无向模式下自动补全负向量，因此输入可以每对 ± 只列一个代表。

    Raises:
        InvalidInputError: 零向量、空集、长度不符或非整数坐标
    """
    mode = Mode.parse(mode)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidInputError(f"环境维数必须是正整数: {n!r}")
    vectors = set()
    for v in raw:
        v = tuple(v)
        if len(v) != n:
            raise InvalidInputError(f"向量 {list(v)} 的长度不是 {n}")
        if any(isinstance(x, bool) or not isinstance(x, int) for x in v):
            raise InvalidInputError(f"向量 {list(v)} 含非整数坐标")
        if not any(v):
            raise InvalidInputError("连接集不能包含零向量")
        vectors.add(v)
    if mode is Mode.UNDIRECTED:
        vectors = sign_closure(vectors)
    if not vectors:
        raise InvalidInputError("连接集不能为空")
    return ConnectionSet(n, mode, tuple(sorted(vectors)))


def component_count(S: ConnectionSet) -> IndexValue:
    """连通分支数 = |ℤⁿ : ⟨S ∪ −S⟩|（按底图计算）"""
    return index(span(S.underlying(), S.n))


def ball(S: ConnectionSet, r: int) -> FiniteGraph:
    """
    以 0 为中心、底图距离不超过 r 的球

    顶点按 BFS 顺序排列，弧 v→v+s 只保留两端都在球内的，
    每条弧记录生成它的 s。
    """
    if r < 0:
        raise PreconditionError("半径必须非负", {"radius": r})
    steps = S.underlying()
    origin = tuple([0] * S.n)
    dist = {origin: 0}
    order = [origin]
    queue = deque([origin])
    while queue:
        v = queue.popleft()
        if dist[v] == r:
            continue
        for s in steps:
            w = tuple(a + b for a, b in zip(v, s))
            if w not in dist:
                dist[w] = dist[v] + 1
                order.append(w)
                queue.append(w)
    position = {v: i for i, v in enumerate(order)}
    arcs = set()
    labels = {}
    for v in order:
        for s in S.vectors:
            w = tuple(a + b for a, b in zip(v, s))
            if w in position:
                arc = (position[v], position[w])
                arcs.add(arc)
                labels[arc] = s
    return FiniteGraph(tuple(order), frozenset(arcs), labels)


def torus(S: ConnectionSet, m: int) -> FiniteGraph:
    """
    环面商 Cay((ℤ_m)ⁿ; S mod m)

    要求 m > 2·max|s_i|，这样 S ∪ {0} 模 m 后仍两两不同。
    """
    bound = 2 * S.max_abs()
    if m <= bound:
        raise PreconditionError(f"模数 {m} 太小，需要 m > {bound}", {"modulus": m, "bound": bound})
    vertices = list(itertools.product(range(m), repeat=S.n))
    position = {v: i for i, v in enumerate(vertices)}
    arcs = set()
    labels = {}
    for v in vertices:
        for s in S.vectors:
            w = tuple((a + b) % m for a, b in zip(v, s))
            arc = (position[v], position[w])
            arcs.add(arc)
            labels[arc] = s
    return FiniteGraph(tuple(vertices), frozenset(arcs), labels)


def residue_window(R: ResidueSet, N: int) -> FiniteGraph:
    """Cay(ℤ; R) 在顶点 {−N, …, N} 上的诱导子图"""
    if N < R.modulus:
        raise PreconditionError(f"窗口 N={N} 小于模数 {R.modulus}", {"N": N, "modulus": R.modulus})
    vertices = tuple((i,) for i in range(-N, N + 1))
    arcs = set()
    for a in range(2 * N + 1):
        for b in range(2 * N + 1):
            if a != b and R.contains(b - a):
                arcs.add((a, b))
    return FiniteGraph(vertices, frozenset(arcs))
