"""
有限图同构 - 回溯搜索、自同构群
"""
import logging
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from ..config import MAX_ORACLE_VERTICES
from ..errors import InvalidInputError, VerificationError
from ..graphs.cayley import FiniteGraph
from ..utils.cancel import CancelToken, check

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Permutation:
    """顶点下标上的置换，images[i] 为 i 的像"""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise InvalidInputError("不是置换", {"images": list(self.images)})

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        return cls(tuple(range(size)))

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __matmul__(self, other: "Permutation") -> "Permutation":
        """复合：先作用 other，再作用 self"""
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def order(self) -> int:
        result, power = 1, self
        while not power.is_identity():
            power = self @ power
            result += 1
        return result

    def cycle_lengths(self) -> Counter:
        seen = [False] * len(self.images)
        lengths = Counter()
        for start in range(len(self.images)):
            if seen[start]:
                continue
            length, j = 0, start
            while not seen[j]:
                seen[j] = True
                j = self.images[j]
                length += 1
            lengths[length] += 1
        return lengths

    def to_json(self) -> list[int]:
        return list(self.images)


def _undirected(graph: FiniteGraph) -> list[set]:
    adj = [set() for _ in graph.vertices]
    for i, j in graph.arcs:
        adj[i].add(j)
        adj[j].add(i)
    return adj


def _distance_profile(adj: Sequence[set], v: int) -> tuple[int, ...]:
    """从 v 出发每一层 BFS 的顶点数"""
    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    layers = Counter(dist.values())
    return tuple(layers[d] for d in range(max(layers) + 1))


class _Matcher:
    """单个 (G1, G2) 的回溯匹配状态"""

    def __init__(self, g1: FiniteGraph, g2: FiniteGraph, token: Optional[CancelToken]):
        self.g1, self.g2 = g1, g2
        self.token = token
        self.size = g1.order
        self.out1, self.out2 = g1.out_neighbours(), g2.out_neighbours()
        self.in1, self.in2 = g1.in_neighbours(), g2.in_neighbours()
        self.adj1, self.adj2 = _undirected(g1), _undirected(g2)
        self.inv1 = [self._invariant(self.out1, self.in1, self.adj1, v) for v in range(self.size)]
        self.inv2 = [self._invariant(self.out2, self.in2, self.adj2, v) for v in range(g2.order)]
        self.order = self._bfs_order()

    @staticmethod
    def _invariant(out, inc, adj, v):
        loops = int(v in out[v])
        return len(out[v]), len(inc[v]), loops, _distance_profile(adj, v)

    def compatible(self) -> bool:
        return (self.g1.order == self.g2.order
                and len(self.g1.arcs) == len(self.g2.arcs)
                and Counter(self.inv1) == Counter(self.inv2))

    def _bfs_order(self) -> list[tuple[int, Optional[int]]]:
        """(顶点, 已排在前面的邻居)；每个连通分支的第一个顶点没有父亲"""
        order = []
        seen = set()
        # 按不变量出现次数从少到多选根，减少分支
        frequency = Counter(self.inv1)
        roots = sorted(range(self.size), key=lambda v: (frequency[self.inv1[v]], v))
        for root in roots:
            if root in seen:
                continue
            seen.add(root)
            order.append((root, None))
            queue = deque([root])
            while queue:
                u = queue.popleft()
                for w in sorted(self.adj1[u]):
                    if w not in seen:
                        seen.add(w)
                        order.append((w, u))
                        queue.append(w)
        return order

    def _consistent(self, v: int, w: int, mapping: dict) -> bool:
        if self.inv1[v] != self.inv2[w]:
            return False
        if (v in self.out1[v]) != (w in self.out2[w]):
            return False
        for u, x in mapping.items():
            if (u in self.out1[v]) != (x in self.out2[w]):
                return False
            if (v in self.out1[u]) != (w in self.out2[x]):
                return False
        return True

    def search(self, fixed: Optional[dict] = None) -> Iterator[Permutation]:
        mapping = dict(fixed or {})
        used = set(mapping.values())
        for v, w in mapping.items():
            if not self._consistent(v, w, {u: x for u, x in mapping.items() if u != v}):
                return
        todo = [(v, parent) for v, parent in self.order if v not in mapping]
        yield from self._extend(todo, 0, mapping, used)

    def _extend(self, todo, depth, mapping, used) -> Iterator[Permutation]:
        if depth == len(todo):
            perm = Permutation(tuple(mapping[v] for v in range(self.size)))
            if not is_isomorphism(self.g1, self.g2, perm):
                raise VerificationError("回溯结果未通过逐弧验证")
            yield perm
            return
        v, parent = todo[depth]
        if parent is not None and parent in mapping:
            candidates = sorted(self.adj2[mapping[parent]])
        else:
            candidates = range(self.g2.order)
        for w in candidates:
            check(self.token)
            if w in used or not self._consistent(v, w, mapping):
                continue
            mapping[v] = w
            used.add(w)
            yield from self._extend(todo, depth + 1, mapping, used)
            del mapping[v]
            used.discard(w)


def is_isomorphism(g1: FiniteGraph, g2: FiniteGraph, perm: Permutation) -> bool:
    """逐弧检查 perm 是否为 G1 → G2 的同构"""
    if len(perm) != g1.order or g1.order != g2.order or len(g1.arcs) != len(g2.arcs):
        return False
    return all((perm(i), perm(j)) in g2.arcs for i, j in g1.arcs)


def isomorphisms(g1: FiniteGraph, g2: FiniteGraph, token: Optional[CancelToken] = None,
                 fixed: Optional[dict] = None) -> Iterator[Permutation]:
    """枚举 G1 → G2 的全部同构"""
    if g1.order > MAX_ORACLE_VERTICES:
        logger.warning("图有 %d 个顶点，暴力搜索可能很慢", g1.order)
    matcher = _Matcher(g1, g2, token)
    if not matcher.compatible():
        return
    yield from matcher.search(fixed)


def graph_iso(g1: FiniteGraph, g2: FiniteGraph,
              token: Optional[CancelToken] = None) -> Optional[Permutation]:
    """
    有限图同构

    Returns:
        把 G1 的顶点下标映到 G2 的置换；不同构时返回 None
    """
    return next(isomorphisms(g1, g2, token), None)


def automorphism_group(graph: FiniteGraph, token: Optional[CancelToken] = None) -> list[Permutation]:
    """完整的自同构群，按像的字典序排列"""
    return sorted(isomorphisms(graph, graph, token), key=lambda p: p.images)


def automorphisms_fixing(graph: FiniteGraph, vertex: int,
                         token: Optional[CancelToken] = None) -> list[Permutation]:
    """固定给定顶点的自同构"""
    return sorted(isomorphisms(graph, graph, token, {vertex: vertex}), key=lambda p: p.images)
