import json

import pytest
from hypothesis import given

from cubeterm.constructions import example_51, meet_semilattice, z3_groupoid
from cubeterm.fileformat import (
    AlgebraFormatError,
    algebra_to_dict,
    dumps_algebra,
    load_algebra,
    loads_algebra,
    save_algebra,
)

from conftest import idempotent_algebras

MEET_FILE = """{
  "size": 2,
  "ops": [
    {"name": "meet", "arity": 2, "table": [0, 0, 0, 1]}
  ]
}
"""


def test_meet_serialization_is_exact():
    assert dumps_algebra(meet_semilattice()) == MEET_FILE


def test_round_trip_z3(tmp_path):
    path = tmp_path / "z3.json"
    save_algebra(z3_groupoid(), path)
    assert load_algebra(path) == z3_groupoid()


def test_element_names_are_metadata_only():
    text = dumps_algebra(meet_semilattice(), elements=["bot", "top"])
    assert json.loads(text)["elements"] == ["bot", "top"]
    assert loads_algebra(text) == meet_semilattice()


@given(idempotent_algebras())
def test_round_trip_random(alg):
    assert loads_algebra(dumps_algebra(alg)) == alg
    assert dumps_algebra(loads_algebra(dumps_algebra(alg))) == dumps_algebra(alg)


def test_deterministic_bytes():
    a = dumps_algebra(example_51((2, 2)).algebra)
    b = dumps_algebra(example_51((2, 2)).algebra)
    assert a == b
    assert algebra_to_dict(example_51((2, 2)).algebra)["size"] == 4


@pytest.mark.parametrize("text, line", [
    ('{"size": 2,\n "ops": [\n  {"name": "f" "arity": 2}]}', 3),
    ('{"size": 2}', None),
    ('{"size": 2, "ops": [{"name": "f", "arity": 2, "table": [1, 0, 0, 1]}]}', None),
    ('{"size": -1, "ops": []}', None),
    ('[1, 2]', None),
])
def test_errors(text, line):
    with pytest.raises(AlgebraFormatError) as info:
        loads_algebra(text, source="bad.json")
    assert "bad.json" in str(info.value)
    if line is not None:
        assert info.value.line == line
