"""The built-in algebras: free boson, free fermion and the bc ghost system.

Definitions live in ``data/*.ope`` in the v1 text format and are parsed on
load, so the shipped files and the presets cannot drift apart.
"""
from __future__ import annotations

from fractions import Fraction
from importlib import resources
from typing import Optional

from .algebra import AlgebraDef, AlgebraError

PRESETS = ("free-boson", "free-fermion", "bc-ghost")
_PARAMS = {"free-boson": (), "free-fermion": (), "bc-ghost": ("L",)}


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise AlgebraError(f"unknown preset {name!r}; choose one of {', '.join(PRESETS)}")
    return resources.files(__package__).joinpath("data", f"{name}.ope").read_text(encoding="utf-8")


def load_preset(name: str, params: Optional[dict] = None) -> AlgebraDef:
    """Instantiate a preset.  ``bc-ghost`` requires ``{"L": rational}``."""
    from .parser import parse_algebra

    text = preset_text(name)
    params = {k: Fraction(v) for k, v in (params or {}).items()}
    expected = set(_PARAMS[name])
    if set(params) != expected:
        missing = sorted(expected - set(params))
        extra = sorted(set(params) - expected)
        problem = f"missing parameter {missing[0]}" if missing else f"unexpected parameter {extra[0]}"
        raise AlgebraError(f"preset {name!r}: {problem}")
    return parse_algebra(text, params)
