"""
证书复查 - 重新检查 CLI 输出文档中的证书

能独立复查的证书（判定、同构、稳定子）逐项重算；其余命令交给调用方提供的 rerun 重新执行后比较。
"""
import logging
from typing import Callable, Optional

from ..algebra.intlin import IntMatrix, is_unimodular
from ..config import SCHEMA_VERSION
from ..errors import CayleyCIError, InvalidInputError
from ..graphs.cayley import ConnectionSet, component_count
from ..utils.cancel import CancelToken
from ..utils.helpers import to_json_value
from .decision import IsoKind, IsoWitness, Reason, are_isomorphic, maps_onto, index_bound
from .quotient import congruence_described_order, quotient_order
from .symmetry import HAut, ambient_transporter, set_stabilizer

logger = logging.getLogger(__name__)

Rerun = Callable[[str, dict], dict]


class CertificateChecker:
    """逐项复查一个输出文档，问题记录在 problems 中"""

    def __init__(self, document: dict, token: Optional[CancelToken] = None):
        if not isinstance(document, dict):
            raise InvalidInputError("证书文档必须是 JSON 对象")
        for key in ("schema_version", "command", "input", "result"):
            if key not in document:
                raise InvalidInputError(f"证书文档缺少字段: {key}")
        if document["schema_version"] != SCHEMA_VERSION:
            raise InvalidInputError("不支持的 schema_version",
                                    {"expected": SCHEMA_VERSION, "found": document["schema_version"]})
        self.document = document
        self.command = document["command"]
        self.payload = document["input"]
        self.result = document["result"]
        self.token = token
        self.problems: list[str] = []

    def _expect(self, condition: bool, message: str):
        if not condition:
            self.problems.append(message)

    def check(self, rerun: Optional[Rerun] = None) -> bool:
        handler = {
            "decide-ci": self._check_decide,
            "iso": self._check_iso,
            "stab": self._check_stab,
        }.get(self.command)
        if handler is not None:
            handler()
        elif rerun is not None:
            fresh = to_json_value(rerun(self.command, self.payload))
            self._expect(fresh == self.result, f"重新执行 {self.command} 得到不同的结果")
        else:
            self.problems.append(f"命令 {self.command} 的证书无法独立复查")
        return not self.problems

    def _check_decide(self):
        S = ConnectionSet.from_json(self.payload)
        r = self.result
        reason = Reason(r["reason"])
        self._expect(r["is_ci"] == reason.is_ci, "is_ci 与 reason 不一致")
        k = component_count(S)
        self._expect(to_json_value(k) == r["k"], "分支数与重新计算的不符")
        if r.get("witness") is not None:
            self._check_witness(S, r["witness"])
        elif not reason.is_ci:
            self.problems.append("否定判定缺少非 CI 证据")
        cert = r.get("certificate")
        if cert is not None:
            self._check_product(S, k, reason, cert)

    def _check_witness(self, S: ConnectionSet, witness: dict):
        S2 = ConnectionSet.from_json(witness["set"])
        tau = IntMatrix.from_json(witness["map"])
        self._expect(tau.is_square and is_unimodular(tau), "证据映射不是幺模矩阵")
        self._expect(maps_onto(S, S2, tau), "证据映射没有把 S 映满 S′")
        self._expect(component_count(S) == component_count(S2), "S 与 S′ 的分支数不同")
        self._expect(ambient_transporter(S, S2, self.token) is None, "S 与 S′ 之间存在环境自同构")

    def _check_product(self, S: ConnectionSet, k, reason: Reason, cert: dict):
        n = S.n
        self._expect(cert["k"] == k, "证书中的 k 与分支数不符")
        self._expect(cert["Q_order"] == quotient_order(n, k), "|Q̄| 与公式不符")
        if k == 1:
            self._expect(cert["holds"] and cert["A_order"] == cert["B_order"] == 1, "连通情形的证书应当平凡成立")
        elif not cert["uncertain"]:
            self._expect(cert["A_order"] == congruence_described_order(n, k), "|Ā| 与同余描述的阶不符")
        product = cert["A_order"] * cert["B_order"] // cert["intersection"]
        self._expect(cert["product"] == product, "乘积计数算错")
        self._expect(cert["holds"] == (product == cert["Q_order"]), "holds 与乘积计数不一致")
        stab = set_stabilizer(S.span(), S, self.token)
        self._expect(cert["stabilizer_order"] == stab.order, "稳定子的阶与重新计算的不符")
        if reason is Reason.INDEX_OBSTRUCTION:
            self._expect(stab.order < index_bound(n, k), "稳定子的阶没有低于指数下界")
        elif reason is Reason.PRODUCT_CONDITION_HOLDS:
            self._expect(cert["holds"], "乘积条件判定为成立但证书显示不成立")
        elif reason is Reason.PRODUCT_CONDITION_FAILS:
            self._expect(not cert["holds"], "乘积条件判定为失败但证书显示成立")
        if "uncovered_tau" in cert:
            try:
                HAut(IntMatrix.from_json(cert["uncovered_tau"]))
            except CayleyCIError:
                self.problems.append("未覆盖的陪集代表不是幺模矩阵")

    def _check_iso(self):
        S = ConnectionSet.from_json(self.payload["S"])
        S2 = ConnectionSet.from_json(self.payload["S_prime"])
        data = self.result["witness"]
        kind = IsoKind(data["kind"])
        if kind is IsoKind.NONE:
            self._expect(not are_isomorphic(S, S2, self.token), "重新计算找到了同构")
            self._expect(self.result["isomorphic"] is False, "isomorphic 与证据种类不一致")
            return
        matrix = IntMatrix.from_json(data["matrix"])
        if not matrix.is_square or not is_unimodular(matrix):
            self.problems.append("同构证据不是幺模矩阵")
            return
        self._expect(IsoWitness(kind, S, S2, matrix, component_count(S)).verify(), "同构证据没有把 S 映满 S′")
        self._expect(self.result["isomorphic"] is True, "isomorphic 与证据种类不一致")

    def _check_stab(self):
        S = ConnectionSet.from_json(self.payload)
        L = S.span()
        elements = []
        for rows in self.result["elements"]:
            M = IntMatrix.from_json(rows)
            if not M.is_square or not is_unimodular(M):
                self.problems.append(f"稳定子元素不是幺模矩阵: {rows}")
                continue
            self._expect(maps_onto(S, S, M), f"稳定子元素没有保持 S: {rows}")
            elements.append(M)
        found = set(elements)
        self._expect(all((a @ b) in found for a in elements for b in elements), "稳定子元素对乘法不封闭")
        self._expect(self.result["order"] == set_stabilizer(L, S, self.token).order, "稳定子的阶与重新计算的不符")


def verify_certificate(document: dict, rerun: Optional[Rerun] = None,
                       token: Optional[CancelToken] = None) -> tuple[bool, list[str]]:
    """
    复查 CLI 输出的证书

    Args:
        document: CLI 输出的 JSON 文档
        rerun: 重新执行其他命令的回调 (command, payload) -> result
        token: 取消令牌

    Returns:
        (是否通过, 问题列表)
    """
    checker = CertificateChecker(document, token)
    ok = checker.check(rerun)
    if ok:
        logger.info("✓ 证书复查通过: %s", checker.command)
    else:
        logger.error("❌ 证书复查失败: %s", "; ".join(checker.problems))
    return ok, checker.problems
