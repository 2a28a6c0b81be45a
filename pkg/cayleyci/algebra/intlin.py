"""
整数线性代数 - Hermite / Smith 标准形、行列式与整数方程组

所有运算都使用 Python 任意精度整数，模块内没有浮点数。
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from sympy import Matrix, Rational

from ..errors import InvalidInputError, VerificationError
from ..utils.helpers import parse_json_int

Vector = tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """整数矩阵（行优先存储）"""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise InvalidInputError(f"矩阵维数必须为正: {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise InvalidInputError(
                f"元素个数 {len(self.entries)} 与维数 {self.rows}x{self.cols} 不符"
            )
        for x in self.entries:
            if isinstance(x, bool) or not isinstance(x, int):
                raise InvalidInputError(f"矩阵元素必须是整数: {x!r}")

    # ---- 构造 ----

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        if not rows or not rows[0]:
            raise InvalidInputError("矩阵不能为空")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InvalidInputError("各行长度不一致")
        return cls(len(rows), width, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls.from_rows(columns).transpose()

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: Optional[int] = None,
                 cols: Optional[int] = None) -> "IntMatrix":
        rows = rows or len(values)
        cols = cols or len(values)
        data = [0] * (rows * cols)
        for i, v in enumerate(values):
            data[i * cols + i] = v
        return cls(rows, cols, tuple(data))

    @classmethod
    def from_json(cls, value) -> "IntMatrix":
        """JSON 行列表；超出安全位数的整数可以是十进制字符串"""
        if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
            raise InvalidInputError("矩阵必须是整数列表的列表")
        try:
            return cls.from_rows([[parse_json_int(x) for x in r] for r in value])
        except ValueError as e:
            if isinstance(e, InvalidInputError):
                raise
            raise InvalidInputError(str(e))

    # ---- 访问 ----

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_identity(self) -> bool:
        return self.is_square and self == IntMatrix.identity(self.rows)

    # ---- 运算 ----

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(self.entries[i * self.cols + j]
                               for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: Union["IntMatrix", Sequence[int]]):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise InvalidInputError(
                    f"矩阵乘法维数不符: {self.rows}x{self.cols} @ {other.rows}x{other.cols}"
                )
            ocols = [other.col(j) for j in range(other.cols)]
            data = tuple(
                sum(a * b for a, b in zip(self.row(i), c))
                for i in range(self.rows) for c in ocols
            )
            return IntMatrix(self.rows, other.cols, data)
        return self.apply(other)

    def apply(self, v: Sequence[int]) -> Vector:
        """矩阵作用于列向量"""
        if len(v) != self.cols:
            raise InvalidInputError(f"向量长度 {len(v)} 与列数 {self.cols} 不符")
        return tuple(sum(a * b for a, b in zip(self.row(i), v)) for i in range(self.rows))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def reduce_mod(self, k: int) -> tuple[int, ...]:
        """模 k 约化，返回行优先元组（商群元素的键）"""
        return tuple(x % k for x in self.entries)

    def to_sympy(self) -> Matrix:
        return Matrix(self.rows, self.cols, list(self.entries))

    def to_json(self) -> list[list[int]]:
        return self.to_rows()

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_rows()})"


@dataclass(frozen=True)
class SmithDecomposition:
    """U·A·V = D"""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    rows: int
    cols: int

    @property
    def diagonal(self) -> list[int]:
        """非零对角元 d_1 | d_2 | … | d_r"""
        out = []
        for i in range(min(self.rows, self.cols)):
            d = self.D[i, i]
            if d == 0:
                break
            out.append(d)
        return out

    @property
    def rank(self) -> int:
        return len(self.diagonal)

    def to_json(self) -> dict:
        return {"U": self.U, "D": self.D, "V": self.V, "diagonal": self.diagonal}


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """扩展欧几里得：返回 (x, y, g) 使 x*a + y*b == g"""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def _ensure_nonempty(A: IntMatrix):
    if not isinstance(A, IntMatrix):
        raise InvalidInputError(f"期望 IntMatrix，得到 {type(A).__name__}")


def snf(A: IntMatrix) -> SmithDecomposition:
    """
    Smith 标准形

    主元取剩余子矩阵中绝对值最小的非零元，相同时按 (行, 列) 顺序，
    因此结果可复现。

    Args:
        A: 任意非空整数矩阵

    Returns:
        SmithDecomposition，满足 U·A·V = D，对角元为正且依次整除
    """
    _ensure_nonempty(A)
    m, n = A.rows, A.cols
    a = A.to_rows()
    u = IntMatrix.identity(m).to_rows()
    v = IntMatrix.identity(n).to_rows()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(target, source, q):
        # row_target += q * row_source
        a[target] = [x + q * y for x, y in zip(a[target], a[source])]
        u[target] = [x + q * y for x, y in zip(u[target], u[source])]

    def add_col(target, source, q):
        for row in a:
            row[target] += q * row[source]
        for row in v:
            row[target] += q * row[source]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    x = a[i][j]
                    if x and (pivot is None or abs(x) < abs(a[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
            if any(a[i][t] for i in range(t + 1, m)) or any(a[t][j] for j in range(t + 1, n)):
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % p), None)
            if bad is not None:
                add_row(t, bad[0], 1)
                continue
            if p < 0:
                a[t] = [-x for x in a[t]]
                u[t] = [-x for x in u[t]]
            break
        if all(a[i][j] == 0 for i in range(t, m) for j in range(t, n)):
            break

    return SmithDecomposition(
        U=IntMatrix.from_rows(u),
        D=IntMatrix.from_rows(a),
        V=IntMatrix.from_rows(v),
        rows=m,
        cols=n,
    )


def hnf(A: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """
    Hermite 标准形（行变换）

    约定：U·A = H，H 为行阶梯形，主元为正，主元上方的元素约化到 [0, 主元)，
    零行在底部。矩阵的行格由 H 的非零行唯一确定，因此格相等可以直接比较矩阵。
    只采用行式约定；Lattice 把 H 的非零行当作列基，得到的就是列式的下三角 Hermite 形 Hᵀ。

    Returns:
        (H, U)，U 为幺模矩阵
    """
    _ensure_nonempty(A)
    m, n = A.rows, A.cols
    h = A.to_rows()
    u = IntMatrix.identity(m).to_rows()

    def add_row(target, source, q):
        h[target] = [x + q * y for x, y in zip(h[target], h[source])]
        u[target] = [x + q * y for x, y in zip(u[target], u[source])]

    r = 0
    for j in range(n):
        if r >= m:
            break
        while True:
            best = None
            for i in range(r, m):
                if h[i][j] and (best is None or abs(h[i][j]) < abs(h[best][j])):
                    best = i
            if best is None:
                break
            if best != r:
                h[r], h[best] = h[best], h[r]
                u[r], u[best] = u[best], u[r]
            p = h[r][j]
            for i in range(r + 1, m):
                if h[i][j]:
                    add_row(i, r, -(h[i][j] // p))
            if not any(h[i][j] for i in range(r + 1, m)):
                break
        if best is None and h[r][j] == 0:
            continue
        if h[r][j] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        p = h[r][j]
        for i in range(r):
            if h[i][j]:
                add_row(i, r, -(h[i][j] // p))
        r += 1

    return IntMatrix.from_rows(h), IntMatrix.from_rows(u)


def det(A: IntMatrix) -> int:
    """精确行列式（Bareiss 无分数消元）"""
    _ensure_nonempty(A)
    if not A.is_square:
        raise InvalidInputError(f"行列式要求方阵: {A.rows}x{A.cols}")
    n = A.rows
    m = A.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def is_unimodular(A: IntMatrix) -> bool:
    """det(A) ∈ {+1, −1}"""
    return det(A) in (1, -1)


def solve_integer(A: IntMatrix, b: Sequence[int]) -> Optional[Vector]:
    """
    求整数解 A·x = b

    通过 Smith 分解 U·A·V = D 化为对角方程组 D·y = U·b，x = V·y。

    Returns:
        一个整数解；不存在整数解时返回 None
    """
    _ensure_nonempty(A)
    if len(b) != A.rows:
        raise InvalidInputError(f"右端向量长度 {len(b)} 与行数 {A.rows} 不符")
    dec = snf(A)
    c = dec.U.apply(b)
    diag = dec.diagonal
    y = [0] * A.cols
    for i, ci in enumerate(c):
        if i < len(diag):
            if ci % diag[i]:
                return None
            y[i] = ci // diag[i]
        elif ci:
            return None
    return dec.V.apply(y)


def inverse_unimodular(A: IntMatrix) -> IntMatrix:
    """幺模矩阵的整数逆（U·A = I 时 A⁻¹ = U）"""
    if not A.is_square or not is_unimodular(A):
        raise InvalidInputError("只有幺模方阵才有整数逆")
    H, U = hnf(A)
    if not H.is_identity():
        raise VerificationError("幺模矩阵的 Hermite 标准形不是单位阵")
    return U


def left_inverse(B: IntMatrix) -> list[list[Fraction]]:
    """
    列满秩矩阵 B 的有理左逆 (BᵀB)⁻¹Bᵀ

    对 span_Q(B) 中的向量 v，left_inverse(B)·v 给出它在 B 的列下的坐标。
    """
    M = B.to_sympy()
    pinv = (M.T * M).inv() * M.T
    return [[_to_fraction(pinv[i, j]) for j in range(pinv.cols)] for i in range(pinv.rows)]


def rank(A: IntMatrix) -> int:
    return snf(A).rank


def _to_fraction(x: Rational) -> Fraction:
    x = Rational(x)
    return Fraction(int(x.p), int(x.q))


def rational_apply(M: Sequence[Sequence[Fraction]], v: Iterable) -> list[Fraction]:
    """有理矩阵作用于向量"""
    v = list(v)
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in M]


def integral_vector(v: Sequence[Fraction]) -> Optional[Vector]:
    """全部为整数时返回整数元组，否则 None"""
    if all(x.denominator == 1 for x in v):
        return tuple(int(x) for x in v)
    return None
