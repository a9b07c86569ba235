"""Example objects bundled with the package under ``data/``."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import InputError

# name -> (file, strength or uniformity claimed for it)
SHIPPED = {
    "moa_8_4_2222": ("moa_8_4_2222.moa", 2),
    "moa_12_3_2222": ("moa_12_3_2222.moa", 2),
    "moa_18_3x7_2": ("moa_18_3x7_2.moa", 2),
    "moa_18_6_3x6": ("moa_18_6_3x6.moa", 2),
    "oa_16_4x5": ("oa_16_4x5.moa", 2),
    "h4": ("h4.ds", 3),
    "state_4_2222": ("state_4_2222.qst", 2),
}

# stand-ins for arrays usually taken from external tables; these copies were
# produced locally (column merging, GF(4) linear code) and are catalogued as imports
IMPORTED = ("moa_18_6_3x6", "oa_16_4x5")


def data_dir() -> Path:
    return Path(str(resources.files("uniformity_forge") / "data"))


def shipped_path(name: str) -> Path:
    if name not in SHIPPED:
        raise InputError(f"no shipped example named {name!r}; known: {', '.join(SHIPPED)}")
    return data_dir() / SHIPPED[name][0]


def load(name: str):
    """Read a shipped example with the matching format reader."""
    from .formats import detect_kind, read_ds, read_moa, read_qst

    path = shipped_path(name)
    readers = {"array": read_moa, "scheme": read_ds, "state": read_qst}
    return readers[detect_kind(path)](path)
