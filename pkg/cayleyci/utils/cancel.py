"""
协作式取消 - 长时间枚举定期检查令牌
"""
import threading
import time
from typing import Optional

from ..config import SEARCH_TIMEOUT_SECONDS
from ..errors import SearchCancelled


class CancelToken:
    """取消令牌：可由其他线程调用 cancel()，也可设置截止时间"""

    def __init__(self, timeout: Optional[float] = None):
        """
        初始化取消令牌

        Args:
            timeout: 超时秒数，None 时使用配置值，0 表示不限制
        """
        if timeout is None:
            timeout = SEARCH_TIMEOUT_SECONDS
        self._event = threading.Event()
        self._deadline = time.monotonic() + timeout if timeout and timeout > 0 else None
        self._checks = 0

    def cancel(self):
        """请求取消"""
        self._event.set()

    @property
    def cancelled(self) -> bool:
        """是否已取消（含超时）"""
        if self._event.is_set():
            return True
        if self._deadline is not None and time.monotonic() > self._deadline:
            self._event.set()
            return True
        return False

    def check(self):
        """被取消时抛出 SearchCancelled"""
        self._checks += 1
        # 每 256 次才读一次时钟
        if self._checks & 0xFF and not self._event.is_set():
            return
        if self.cancelled:
            raise SearchCancelled("搜索已取消或超时", {"checks": self._checks})


def check(token: Optional[CancelToken]):
    """token 可为 None 的便捷形式"""
    if token is not None:
        token.check()
