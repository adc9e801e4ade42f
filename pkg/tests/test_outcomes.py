import pytest

from noisybs.outcomes import (
    COLLISION,
    format_outcome,
    from_occupation,
    multiplicity,
    outcome_convert,
    parse_outcome,
    to_occupation,
    to_ordered,
)


def test_conversions():
    assert outcome_convert([4, 1, 2], "r", "z") == (1, 2, 4)
    assert outcome_convert([1, 1, 3], "z", "m", m=4) == (0, 2, 0, 1)
    assert outcome_convert([1, 1, 2], "z", "m", m=4) == (0, 2, 1, 0)
    assert outcome_convert([1, 0, 1], "m", "z") == (0, 2)
    assert outcome_convert([0, 2], "z", "r") == (0, 2)


def test_conversion_errors():
    with pytest.raises(ValueError):
        outcome_convert([1, 0, 1], "m", "z", n=3)
    with pytest.raises(ValueError):
        outcome_convert([2, 1], "z", "r")
    with pytest.raises(ValueError):
        outcome_convert([0, 5], "r", "m", m=4)
    with pytest.raises(ValueError):
        outcome_convert([0, 1], "r", "q")


def test_occupation_round_trip():
    z = (0, 0, 2, 5)
    assert from_occupation(to_occupation(z, 6), 4) == z
    assert to_ordered([3, 1, 3]) == (1, 3, 3)


def test_multiplicity():
    assert multiplicity((0, 1, 2)) == 6
    assert multiplicity((1, 1, 2)) == 3
    assert multiplicity(()) == 1


def test_parse_and_format():
    assert parse_outcome("1 2 4") == (1, 2, 4)
    assert parse_outcome("1,2, 4") == (1, 2, 4)
    assert format_outcome((1, 2, 4)) == "1 2 4"
    assert format_outcome(COLLISION) == "c"
    with pytest.raises(ValueError):
        parse_outcome("1 two")
