import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from randsys import rand_log_system, spread_exponents
from rsconn.connection import Connection, exponents
from rsconn.errors import ParseError
from rsconn.io import parse_system, serialize_system
from rsconn.ring import ParamAlgebra

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


def system(matrix, size=1, num_params=0, order_t=0, order_x=3, **extra):
    obj = {"size": size, "num_params": num_params, "order_t": order_t, "order_x": order_x, "matrix": matrix}
    obj.update(extra)
    return json.dumps(obj)


def test_minimal_rank_one_file():
    c = parse_system(system([[[{"xpow": 0, "coeff": {"1": "1/2"}}]]]))
    assert exponents(c) == (Fraction(1, 2),)
    assert c.order == 3


def test_empty_matrix():
    c = parse_system(system([], size=0))
    assert c.size == 0 and exponents(c) == ()


def test_bytes_input():
    assert parse_system(system([[[]]]).encode()).matrix.is_zero()


@pytest.mark.parametrize("matrix,kw,fragment", [
    ([[[{"xpow": 0, "coeff": {"t1^3": "1"}}]]], {"num_params": 1, "order_t": 2}, "degree overflow"),
    ([[[{"xpow": 0, "coeff": {"1": "2/4"}}]]], {}, "non-canonical"),
    ([[[{"xpow": 0, "coeff": {"1": "0.5"}}]]], {}, "matrix[0][0][0].coeff"),
    ([[[{"xpow": 0, "coeff": {"1": "0"}}]]], {}, "explicit zero"),
    ([[[{"xpow": 1, "coeff": {"1": "1"}}, {"xpow": 0, "coeff": {"1": "1"}}]]], {}, "increase"),
    ([[[{"xpow": 9, "coeff": {"1": "1"}}]]], {}, "exceeds order_x"),
    ([[[{"xpow": 0, "coeff": {}}]]], {}, "schema"),
    ([[[{"xpow": 0}]]], {}, "schema"),
    ([[[{"xpow": 0.0, "coeff": {"1": "1"}}]]], {}, "integer"),
    ([[[]], [[]]], {}, "not 1 x 1"),
    ([[[]]], {"extra": 1}, "schema"),
    ([[[]]], {"version": 2}, "schema"),
])
def test_rejections(matrix, kw, fragment):
    with pytest.raises(ParseError) as err:
        parse_system(system(matrix, **kw))
    assert fragment in str(err.value)


def test_syntax_error_has_position():
    with pytest.raises(ParseError, match=r"line 2, column \d+"):
        parse_system('{"size": 1,\n  "num_params": }')


def test_duplicate_keys():
    with pytest.raises(ParseError, match="duplicate key"):
        parse_system('{"size": 0, "size": 0, "num_params": 0, "order_t": 0, "order_x": 0, "matrix": []}')
    text = system([[[{"xpow": 0, "coeff": {"1": "1"}}]]]).replace('{"1": "1"}', '{"1": "1", "1": "2"}')
    with pytest.raises(ParseError, match="duplicate key"):
        parse_system(text)


def test_corpus_round_trips():
    files = sorted(CORPUS.glob("*.json"))
    assert len(files) >= 8
    for path in files:
        text = path.read_text()
        assert serialize_system(parse_system(text)) == text


def test_random_round_trips():
    rng = random.Random(17)
    for _ in range(30):
        alg = ParamAlgebra(rng.randint(0, 2), rng.randint(0, 3))
        c = rand_log_system(rng, alg, spread_exponents(rng, rng.randint(1, 3)), rng.randint(0, 4))
        text = serialize_system(c)
        back = parse_system(text)
        assert back == c
        assert serialize_system(back) == text


def test_negative_powers_round_trip():
    text = system([[[{"xpow": -2, "coeff": {"t1": "3", "t1^2": "-1/7"}}, {"xpow": 1, "coeff": {"1": "1"}}]]],
                  num_params=1, order_t=2, version=1)
    c = parse_system(text)
    assert isinstance(c, Connection) and not c.is_logarithmic()
    assert parse_system(serialize_system(c)) == c
