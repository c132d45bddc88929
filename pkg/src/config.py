"""Session configuration for the workbench."""

import os
from typing import Dict, List, Optional

import dotenv
from pydantic import BaseModel, Field, field_validator
from sympy import isprime

from .errors import StringAlgebraError

FIELD_ENV = "STRING_ALGEBRA_FIELD"
SEED_ENV = "STRING_ALGEBRA_SEED"
MAX_LEN_ENV = "STRING_ALGEBRA_MAX_LEN"


def parse_field_name(name: str) -> Optional[int]:
    """Return None for the rationals or the characteristic p for GF(p).

    Raises:
        StringAlgebraError: If the name is neither ``QQ`` nor ``GF(p)`` with p prime
    """
    text = name.strip().upper().replace(" ", "")
    if text in ("QQ", "Q", "RATIONALS"):
        return None
    if text.startswith("GF(") and text.endswith(")"):
        try:
            p = int(text[3:-1])
        except ValueError:
            raise StringAlgebraError(f"Invalid field name: {name}")
        if not isprime(p):
            raise StringAlgebraError(f"Field characteristic must be prime, got {p}")
        return p
    raise StringAlgebraError(f"Invalid field name: {name} (expected QQ or GF(p))")


class SessionConfig(BaseModel):
    """Everything a run depends on besides its input files."""

    field: str = "QQ"
    max_len: int = 12
    bridge_bound: Optional[int] = None
    word_bound: int = 6
    prefix_bound: int = 2
    middle_bound: int = 2
    partition_override: Dict[str, int] = Field(default_factory=dict)
    output_format: str = "text"
    seed: int = 42
    samples: int = 200
    lambda_samples: List[int] = Field(default_factory=lambda: [1, 2])
    stabilization_window: int = 3
    max_levels: int = 8
    show_progress: bool = False

    @field_validator("field")
    @classmethod
    def _check_field(cls, value: str) -> str:
        parse_field_name(value)
        return value

    @field_validator("max_len", "word_bound", "samples", "stabilization_window", "max_levels")
    @classmethod
    def _check_positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("bounds must be positive")
        return value

    @field_validator("prefix_bound", "middle_bound")
    @classmethod
    def _check_nonnegative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("bounds must be nonnegative")
        return value

    @field_validator("bridge_bound")
    @classmethod
    def _check_bridge_bound(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value <= 0:
            raise ValueError("bridge bound must be positive")
        return value

    @field_validator("partition_override")
    @classmethod
    def _check_override(cls, value: Dict[str, int]) -> Dict[str, int]:
        for token, side in value.items():
            if side not in (1, -1):
                raise ValueError(f"partition side for {token} must be 1 or -1")
        return value

    @field_validator("output_format")
    @classmethod
    def _check_format(cls, value: str) -> str:
        if value not in ("json", "text", "dot"):
            raise ValueError("output format must be json, text or dot")
        return value

    @property
    def characteristic(self) -> Optional[int]:
        return parse_field_name(self.field)


def load_config(**overrides) -> SessionConfig:
    """Build a config from the environment (``.env`` included) and explicit overrides.

    Args:
        **overrides: Field values that win over the environment; ``None`` values are ignored
    Returns:
        Validated SessionConfig
    """
    dotenv.load_dotenv()
    values = {}
    if os.getenv(FIELD_ENV):
        values["field"] = os.getenv(FIELD_ENV)
    if os.getenv(SEED_ENV):
        values["seed"] = int(os.getenv(SEED_ENV))
    if os.getenv(MAX_LEN_ENV):
        values["max_len"] = int(os.getenv(MAX_LEN_ENV))
    values.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return SessionConfig(**values)
    except ValueError as e:
        raise StringAlgebraError(f"Error building session config: {str(e)}")
