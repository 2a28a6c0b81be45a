"""
异常定义
"""
from typing import Optional


class CayleyCIError(Exception):
    """所有库异常的基类"""

    kind = "error"

    def __init__(self, message: str, detail: Optional[dict] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}

    def to_dict(self) -> dict:
        """转换为 CLI 的结构化错误对象"""
        return {"type": self.kind, "message": self.message, "detail": self.detail}


class InvalidInputError(CayleyCIError, ValueError):
    """输入数据格式错误（零向量、空集合、维数不符等）"""

    kind = "invalid_input"


class PreconditionError(CayleyCIError, ValueError):
    """违反操作的前置条件"""

    kind = "precondition"


class SearchCancelled(CayleyCIError):
    """枚举被取消或超时"""

    kind = "cancelled"


class VerificationError(CayleyCIError):
    """内部生成的证书未通过自检"""

    kind = "verification"
