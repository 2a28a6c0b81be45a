"""
共享夹具 - 固定种子的随机数与常用连接集
"""
import random

import pytest

from cayleyci.graphs import validate


def make_set(vectors, n=2, mode="undirected"):
    return validate(vectors, n, mode)


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def square_grid():
    """{±e₁, ±e₂}"""
    return make_set([[1, 0], [0, 1]])


@pytest.fixture
def triangular():
    """{±e₁, ±e₂, ±(e₁+e₂)}"""
    return make_set([[1, 0], [0, 1], [1, 1]])


@pytest.fixture
def two_component():
    """{±(2,0), ±(0,1), ±(2,1)}，两个分支，乘积条件成立"""
    return make_set([[2, 0], [0, 1], [2, 1]])


@pytest.fixture
def stretched():
    """{±(m,0), ±(0,1)}"""
    def build(m):
        return make_set([[m, 0], [0, 1]])
    return build
