import pytest

from utils.exceptions import UsageError
from utils.space_id import parse_space_id, quaternionic_dimension


@pytest.mark.parametrize("text, n", [
    ("sp:1", 1), ("sp:3", 3), ("so:7", 3), ("so:9", 5), ("su:3", 1), ("su:5", 3),
    ("g2", 2), ("f4", 7), ("e6", 10), ("e7", 16), ("e8", 28),
])
def test_quaternionic_dimension(text, n):
    assert quaternionic_dimension(parse_space_id(text)) == n


def test_normalizes_text():
    space = parse_space_id("  SP:2 ")
    assert space.text == "sp:2"
    assert str(parse_space_id("E7")) == "e7"


def test_large_and_exceptional_flags():
    assert parse_space_id("e8").large
    assert not parse_space_id("e6").large
    assert parse_space_id("f4").exceptional
    assert not parse_space_id("so:8").exceptional


@pytest.mark.parametrize("text", ["sp:0", "so:6", "su:2", "g3", "sp:-1", "sp:1.5", None])
def test_rejects(text):
    with pytest.raises(UsageError):
        parse_space_id(text)


def test_sphere_allowed_on_request():
    assert parse_space_id("sp:0", allow_n0=True).size == 0
