"""
cayleyci - 命令行入口 | JSON 输入输出与可复查的证书
"""
import argparse
import json
import logging
import signal
import sys
from typing import Optional

from .algebra import IntMatrix, det, hnf, snf
from .analyzers import (
    are_isomorphic, decide_ci, equivariance_check, set_stabilizer, torus_normality,
    verify_certificate, z_iso_decide,
)
from .config import LOG_FORMAT, LOG_LEVEL, SCHEMA_VERSION
from .errors import CayleyCIError, InvalidInputError
from .graphs import ConnectionSet, Mode
from .groups import AbelianChain, FiniteAbelianGroup, GroupAutomorphism, chain_extend
from .oracle import ci_check_finite, finite_ci_group_scan, mod5_demo
from .utils import CancelToken, dumps_canonical, parse_json_int

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


def _require(payload, key: str):
    if not isinstance(payload, dict):
        raise InvalidInputError("输入必须是 JSON 对象")
    if key not in payload:
        raise InvalidInputError(f"输入缺少字段: {key}")
    return payload[key]


def _int(value, name: str) -> int:
    try:
        return parse_json_int(value)
    except ValueError as e:
        raise InvalidInputError(f"{name}: {e}")


def _int_list(value, name: str) -> list[int]:
    if not isinstance(value, list):
        raise InvalidInputError(f"{name} 必须是列表")
    return [_int(x, name) for x in value]


def _elements(value, name: str) -> list:
    """有限群元素：整数（循环群）或整数列表"""
    if not isinstance(value, list):
        raise InvalidInputError(f"{name} 必须是列表")
    return [_int_list(x, name) if isinstance(x, list) else _int(x, name) for x in value]


class CommandRunner:
    """把一条命令及其 JSON 输入分派到对应的分析器"""

    COMMANDS = (
        "snf", "decide-ci", "iso", "stab", "z-iso", "scan-finite", "demo-mod5", "verify",
        "normality", "torsion", "equivariance", "ci-finite",
    )

    def __init__(self, seed: Optional[int] = None, token: Optional[CancelToken] = None):
        """
        初始化

        Args:
            seed: 随机检查的种子（None 时取配置）
            token: 取消令牌
        """
        self.seed = seed
        self.token = token

    def execute(self, command: str, payload) -> tuple[object, object, int]:
        """
        执行一条命令

        Returns:
            (规范化后的输入回显, 结果, 退出码)
        """
        if command not in self.COMMANDS:
            raise InvalidInputError(f"未知命令: {command}")
        handler = getattr(self, "_cmd_" + command.replace("-", "_"))
        logger.info("正在执行 %s…", command)
        return handler(payload)

    def rerun(self, command: str, payload) -> object:
        if command == "verify":
            raise InvalidInputError("verify 文档不能嵌套复查")
        _, result, _ = self.execute(command, payload)
        return result

    def _cmd_snf(self, payload):
        A = IntMatrix.from_json(_require(payload, "matrix"))
        H, U = hnf(A)
        result = {"smith": snf(A), "hermite": {"H": H, "U": U}}
        if A.is_square:
            result["det"] = det(A)
        return {"matrix": A}, result, EXIT_OK

    def _cmd_decide_ci(self, payload):
        S = ConnectionSet.from_json(payload)
        verdict = decide_ci(S, self.token)
        return S, verdict, EXIT_OK

    def _cmd_iso(self, payload):
        S = ConnectionSet.from_json(_require(payload, "S"))
        S2 = ConnectionSet.from_json(_require(payload, "S_prime"))
        witness = are_isomorphic(S, S2, self.token)
        result = {"isomorphic": bool(witness), "witness": witness}
        return {"S": S, "S_prime": S2}, result, EXIT_OK if witness else EXIT_NEGATIVE

    def _cmd_stab(self, payload):
        S = ConnectionSet.from_json(payload)
        return S, set_stabilizer(S.span(), S, self.token), EXIT_OK

    def _cmd_z_iso(self, payload):
        S = sorted(set(_int_list(_require(payload, "S"), "S")))
        S2 = sorted(set(_int_list(_require(payload, "S_prime"), "S_prime")))
        sign = z_iso_decide(S, S2)
        result = {"isomorphic": sign is not None, "sign": sign}
        return {"S": S, "S_prime": S2}, result, EXIT_OK if sign is not None else EXIT_NEGATIVE

    def _cmd_scan_finite(self, payload):
        G = FiniteAbelianGroup(tuple(_int_list(_require(payload, "moduli"), "moduli")))
        mode = Mode.parse(payload.get("mode", Mode.UNDIRECTED.value))
        workers = _int(payload["workers"], "workers") if "workers" in payload else None
        pairs = finite_ci_group_scan(G, mode, self.token, workers)
        result = {"group": G, "mode": mode, "count": len(pairs), "pairs": pairs}
        return {"moduli": list(G.moduli), "mode": mode}, result, EXIT_OK

    def _cmd_demo_mod5(self, payload):
        N = _int(_require(payload, "N"), "N")
        report = mod5_demo(N)
        return {"N": N}, report, EXIT_OK if report.verified else EXIT_NEGATIVE

    def _cmd_verify(self, payload):
        ok, problems = verify_certificate(payload, self.rerun, self.token)
        result = {"ok": ok, "command": payload["command"], "problems": problems}
        return payload, result, EXIT_OK if ok else EXIT_NEGATIVE

    def _cmd_normality(self, payload):
        S = ConnectionSet.from_json(payload)
        m = _int(_require(payload, "m"), "m")
        report = torus_normality(S, m, self.token)
        echo = dict(S.to_json(), m=m)
        return echo, report, EXIT_OK if report.coincide else EXIT_NEGATIVE

    def _cmd_torsion(self, payload):
        groups = [_int_list(g, "groups") for g in _require(payload, "groups")]
        embeddings = [[_int_list(x, "embeddings") for x in e] for e in _require(payload, "embeddings")]
        chain = AbelianChain.build(groups, embeddings)
        alpha0 = GroupAutomorphism(chain.groups[0], tuple(_elements(_require(payload, "alpha0"), "alpha0")))
        S = _elements(payload["S"], "S") if "S" in payload else None
        S2 = _elements(payload["S_prime"], "S_prime") if "S_prime" in payload else None
        extension = chain_extend(chain, alpha0, S, S2)
        echo = dict(chain.to_json(), alpha0=alpha0)
        if S is not None:
            echo["S"] = S
        if S2 is not None:
            echo["S_prime"] = S2
        return echo, extension, EXIT_OK

    def _cmd_equivariance(self, payload):
        S = ConnectionSet.from_json(payload)
        trials = _int(payload.get("trials", 50), "trials")
        seed = _int(payload["seed"], "seed") if "seed" in payload else self.seed
        report = equivariance_check(S, trials, seed, self.token)
        echo = dict(S.to_json(), trials=trials, seed=report.seed)
        return echo, report, EXIT_OK if report.passed else EXIT_NEGATIVE

    def _cmd_ci_finite(self, payload):
        G = FiniteAbelianGroup(tuple(_int_list(_require(payload, "moduli"), "moduli")))
        mode = Mode.parse(payload.get("mode", Mode.UNDIRECTED.value))
        S = G.subset(_elements(_require(payload, "set"), "set"), symmetric=mode is Mode.UNDIRECTED)
        is_ci = ci_check_finite(G, S, mode, self.token)
        echo = {"moduli": list(G.moduli), "mode": mode, "set": S}
        return echo, {"is_ci": is_ci, "group": G}, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cayleyci",
        description="ℤⁿ 上 Cayley (有向)图的 CI 判定与同构判定，输出可复查的 JSON 证书",
    )
    parser.add_argument("command", choices=CommandRunner.COMMANDS, help="要执行的命令")
    parser.add_argument("payload", nargs="?", help="JSON 输入（省略时读取 --input 或标准输入）")
    parser.add_argument("--input", metavar="FILE", help="从文件读取 JSON 输入")
    parser.add_argument("--output", metavar="FILE", help="把 JSON 结果写入文件而不是标准输出")
    parser.add_argument("--seed", type=int, default=None, help="随机检查的种子")
    parser.add_argument("--timeout", type=float, default=None, help="搜索截止时间（秒），0 表示不限制")
    parser.add_argument("--log-level", type=str.upper, default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help=f"日志级别（默认 {LOG_LEVEL}）")
    return parser


def _read_payload(args, stdin) -> object:
    if args.payload is not None:
        text = args.payload
    elif args.input:
        with open(args.input, encoding="utf-8") as f:
            text = f.read()
    else:
        text = stdin.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"JSON 解析失败: {e.msg}", {"line": e.lineno, "column": e.colno})


def _write(text: str, args, stdout):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        stdout.write(text + "\n")


def run(argv: Optional[list[str]] = None, stdin=None, stdout=None,
        handle_signals: bool = False) -> int:
    """
    执行一次命令行调用

    Args:
        argv: 参数列表（不含程序名）
        stdin: 输入流，默认 sys.stdin
        stdout: 输出流，默认 sys.stdout
        handle_signals: 是否让 Ctrl+C 取消正在进行的搜索

    Returns:
        退出码：0 已判定/成功，1 是非问题的否定回答，2 输入错误或无法完成
    """
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=(args.log_level or LOG_LEVEL).upper(), format=LOG_FORMAT, stream=sys.stderr)
    token = CancelToken(args.timeout)
    if handle_signals:
        # Ctrl+C 时让正在进行的枚举尽快停下
        def signal_handler(sig, frame):
            logger.warning("收到中断信号，正在取消…")
            token.cancel()

        signal.signal(signal.SIGINT, signal_handler)
    runner = CommandRunner(args.seed, token)

    try:
        payload = _read_payload(args, stdin)
        echo, result, code = runner.execute(args.command, payload)
        document = {
            "schema_version": SCHEMA_VERSION,
            "command": args.command,
            "input": echo,
            "result": result,
        }
    except CayleyCIError as e:
        logger.warning("命令 %s 失败: %s", args.command, e.message)
        document = {"schema_version": SCHEMA_VERSION, "command": args.command, "error": e.to_dict()}
        code = EXIT_ERROR
    except (KeyError, TypeError, ValueError) as e:
        logger.warning("命令 %s 的输入不合法: %s", args.command, e)
        error = InvalidInputError(f"输入不合法: {e}")
        document = {"schema_version": SCHEMA_VERSION, "command": args.command, "error": error.to_dict()}
        code = EXIT_ERROR
    _write(dumps_canonical(document), args, stdout)
    return code


def main():
    """主函数"""
    sys.exit(run(sys.argv[1:], handle_signals=True))


if __name__ == "__main__":
    main()
