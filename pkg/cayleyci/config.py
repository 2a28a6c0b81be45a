"""
配置文件 - 枚举上限、日志级别与输出格式
"""
import os

# 日志配置
LOG_LEVEL = os.environ.get("CAYLEYCI_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# JSON 输出
SCHEMA_VERSION = 1
JSON_SAFE_INTEGER_BITS = 53  # 超过该位数的整数以字符串输出

# 随机检查的默认种子
DEFAULT_SEED = int(os.environ.get("CAYLEYCI_SEED", "20240601"))

# 枚举上限（桌面规模）
MAX_TRANSPORTER_CANDIDATES = int(os.environ.get("CAYLEYCI_MAX_TRANSPORTER_CANDIDATES", "2000000"))
MAX_QUOTIENT_ORDER = int(os.environ.get("CAYLEYCI_MAX_QUOTIENT_ORDER", "2000000"))
MAX_ORACLE_VERTICES = int(os.environ.get("CAYLEYCI_MAX_ORACLE_VERTICES", "64"))
CONGRUENCE_DESK_CHECK_MAX = int(os.environ.get("CAYLEYCI_CONGRUENCE_DESK_CHECK_MAX", "1000000"))

# 有限群
TORSION_EXHAUSTIVE_LIMIT = 3000
FINITE_SCAN_MAX_ORDER = 16

# 长时间搜索的截止时间（秒），0 表示不限制
SEARCH_TIMEOUT_SECONDS = float(os.environ.get("CAYLEYCI_SEARCH_TIMEOUT", "0"))

# 有限扫描的并行度
SCAN_WORKERS = int(os.environ.get("CAYLEYCI_SCAN_WORKERS", "1"))
