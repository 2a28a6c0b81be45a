"""
辅助函数模块
"""
import json
from typing import Any, Iterable, Optional

from sympy import factorint

from ..config import JSON_SAFE_INTEGER_BITS


def format_duration(seconds: float) -> str:
    """将秒数转换为可读的时长格式"""
    if seconds < 1:
        return f"{seconds * 1000:.0f}毫秒"
    elif seconds < 60:
        return f"{seconds:.1f}秒"
    minutes = int(seconds // 60)
    remaining = seconds - minutes * 60
    if remaining >= 1:
        return f"{minutes}分钟{remaining:.0f}秒"
    return f"{minutes}分钟"


def is_squarefree(k: int) -> bool:
    """k 是否无平方因子（k >= 1）"""
    if k < 1:
        raise ValueError(f"无平方因子判定要求正整数: {k}")
    return all(e == 1 for e in factorint(k).values())


def square_prime(k: int) -> Optional[int]:
    """返回满足 p^2 | k 的最小素数 p，不存在时返回 None"""
    for p, e in sorted(factorint(k).items()):
        if e >= 2:
            return p
    return None


def prime_factors(k: int) -> list[int]:
    """k 的素因子（升序）"""
    return sorted(factorint(k))


def sign_closure(vectors: Iterable[tuple[int, ...]]) -> set[tuple[int, ...]]:
    """S ∪ −S"""
    result = set()
    for v in vectors:
        result.add(tuple(v))
        result.add(tuple(-x for x in v))
    return result


def json_int(value: int) -> Any:
    """超过安全位数的整数以字符串表示"""
    if abs(value).bit_length() > JSON_SAFE_INTEGER_BITS:
        return str(value)
    return value


def parse_json_int(value: Any) -> int:
    """json_int 的逆操作，bool 与浮点数视为非法"""
    if isinstance(value, bool):
        raise ValueError(f"期望整数，得到布尔值: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and value.lstrip("-").isdigit():
        return int(value)
    raise ValueError(f"期望整数，得到: {value!r}")


def to_json_value(obj: Any) -> Any:
    """递归地把结果对象转换为可序列化的 JSON 值"""
    if hasattr(obj, "to_json"):
        return to_json_value(obj.to_json())
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return json_int(obj)
    if isinstance(obj, dict):
        return {str(k): to_json_value(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json_value(x) for x in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((to_json_value(x) for x in obj), key=_sort_key)
    raise TypeError(f"无法序列化的对象: {type(obj).__name__}")


def dumps_canonical(document: dict) -> str:
    """规范化 JSON：键排序、固定分隔符，同一输入得到逐字节相同的输出"""
    return json.dumps(to_json_value(document), sort_keys=True, ensure_ascii=False, indent=2)


def _sort_key(value: Any) -> str:
    return json.dumps(value, sort_keys=True)
