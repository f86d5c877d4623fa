"""Complexity bounds for spin-chain time evolution."""

import json

from . import _core
from ._core import ConfigError, NumericError, ResourceError, config_hash, haar_unitary, normalize_config

__all__ = [
    "ConfigError",
    "NumericError",
    "ResourceError",
    "config_hash",
    "curve",
    "cvp",
    "cvpbench",
    "haar_unitary",
    "hamiltonian",
    "normalize_config",
    "qmatrix",
    "rmt",
    "weingarten",
]


def curve(config_text: str = "") -> dict:
    out = _core.curve(config_text)
    out["summary"] = json.loads(out["summary"])
    return out


def qmatrix(config_text: str = "") -> dict:
    return _core.qmatrix(config_text)


def hamiltonian(config_text: str = ""):
    return _core.hamiltonian(config_text)


def rmt(config_text: str = "") -> dict:
    return json.loads(_core.rmt(config_text))


def cvpbench(config_text: str = "") -> dict:
    return json.loads(_core.cvpbench(config_text))


def weingarten(cycle_type, D: int):
    from fractions import Fraction

    num, den = _core.weingarten(list(cycle_type), D)
    return Fraction(num, den)


def cvp(basis, target, delta: float = 0.99) -> dict:
    return _core.cvp(basis, target, delta)
