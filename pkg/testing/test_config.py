import pytest
from pydantic import ValidationError

from src.config import SessionConfig, load_config, parse_field_name
from src.errors import StringAlgebraError


@pytest.mark.parametrize("name, expected", [("QQ", None), ("GF(2)", 2), ("gf(7)", 7), ("GF( 101 )", 101)])
def test_field_names(name, expected):
    assert parse_field_name(name) == expected


@pytest.mark.parametrize("name", ["GF(4)", "GF(1)", "GF(0)", "GF(-3)", "GF(91)", "GF(x)", "RR"])
def test_bad_field_names(name):
    with pytest.raises(StringAlgebraError):
        parse_field_name(name)


def test_bounds_must_be_positive():
    with pytest.raises(ValidationError):
        SessionConfig(word_bound=0)
    with pytest.raises(ValidationError):
        SessionConfig(partition_override={"a": 2})


def test_environment_defaults(monkeypatch):
    monkeypatch.setenv("STRING_ALGEBRA_FIELD", "GF(5)")
    monkeypatch.setenv("STRING_ALGEBRA_SEED", "7")
    config = load_config(samples=10)
    assert config.characteristic == 5
    assert config.seed == 7
    assert config.samples == 10
    assert load_config(field="QQ").characteristic is None
