"""
cayleyci - ℤⁿ 上 Cayley (有向)图的 CI 判定、同构判定与可验证证书
"""

__version__ = "1.0.0"
__name__ = "cayleyci"
