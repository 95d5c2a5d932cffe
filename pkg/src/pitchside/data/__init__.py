"""Packaged corpus: setplays, strategies and trial scenarios."""

from __future__ import annotations

from importlib import resources


def _dir(name: str):
    return resources.files(__package__) / name


def read_text(relpath: str) -> str:
    return (resources.files(__package__) / relpath).read_text()


def setplay_names() -> list[str]:
    return sorted(p.name for p in _dir("setplays").iterdir() if p.name.endswith(".sp"))


def read_setplay(name: str) -> str:
    if not name.endswith(".sp"):
        name += ".sp"
    return read_text(f"setplays/{name}")


def strategy_names() -> list[str]:
    return sorted(p.name for p in _dir("strategies").iterdir() if p.name.endswith(".strategy"))


def read_strategy(name: str) -> str:
    if not name.endswith(".strategy"):
        name += ".strategy"
    return read_text(f"strategies/{name}")


def scenario_names() -> list[str]:
    return sorted(p.name for p in _dir("scenarios").iterdir() if p.name.endswith(".scn"))


def read_scenario(name: str) -> str:
    if not name.endswith(".scn"):
        name += ".scn"
    return read_text(f"scenarios/{name}")
