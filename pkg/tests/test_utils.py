import json
import time

import pytest

from cayleyci.algebra import INFINITE, IntMatrix
from cayleyci.errors import InvalidInputError, SearchCancelled
from cayleyci.utils import (
    CancelToken, dumps_canonical, format_duration, is_squarefree, json_int, parse_json_int,
    prime_factors, sign_closure, square_prime, to_json_value,
)
from cayleyci.utils.cancel import check


def test_format_duration():
    assert format_duration(0.25) == "250毫秒"
    assert format_duration(12.34) == "12.3秒"
    assert format_duration(120) == "2分钟"
    assert format_duration(125) == "2分钟5秒"


@pytest.mark.parametrize("k, expected", [(1, True), (6, True), (30, True), (4, False), (12, False)])
def test_is_squarefree(k, expected):
    assert is_squarefree(k) is expected


def test_prime_helpers():
    assert square_prime(12) == 2
    assert square_prime(45) == 3
    assert square_prime(30) is None
    assert prime_factors(60) == [2, 3, 5]
    assert sign_closure([(1, 0)]) == {(1, 0), (-1, 0)}
    with pytest.raises(ValueError):
        is_squarefree(0)


def test_json_int_round_trip_for_big_values():
    big = 2 ** 60 + 1
    assert json_int(big) == str(big)
    assert json_int(12) == 12
    assert parse_json_int(str(-big)) == -big
    for bad in (True, 1.5, "1e3", None):
        with pytest.raises(ValueError):
            parse_json_int(bad)


def test_to_json_value():
    value = to_json_value({"m": IntMatrix.identity(2), "k": INFINITE, "s": frozenset({(2, 1), (1, 2)})})
    assert value == {"m": [[1, 0], [0, 1]], "k": "INFINITE", "s": [[1, 2], [2, 1]]}
    with pytest.raises(TypeError):
        to_json_value(object())


def test_dumps_canonical_is_deterministic():
    first = dumps_canonical({"b": 1, "a": {frozenset({3, 1, 2})}})
    second = dumps_canonical({"a": {frozenset({2, 1, 3})}, "b": 1})
    assert first == second
    assert json.loads(first) == {"a": [[1, 2, 3]], "b": 1}


def test_cancel_token():
    token = CancelToken(0)
    token.check()
    assert not token.cancelled
    token.cancel()
    assert token.cancelled
    with pytest.raises(SearchCancelled):
        token.check()
    check(None)


def test_cancel_token_deadline():
    token = CancelToken(0.01)
    time.sleep(0.05)
    assert token.cancelled
    with pytest.raises(SearchCancelled):
        for _ in range(512):
            token.check()


def test_errors_are_structured():
    error = InvalidInputError("坏输入", {"field": "n"})
    assert error.to_dict() == {"type": "invalid_input", "message": "坏输入", "detail": {"field": "n"}}
    assert isinstance(error, ValueError)
