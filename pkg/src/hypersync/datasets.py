"""Bundled example documents used throughout the tests."""
from __future__ import annotations

from importlib import resources

from .fileformat import HypergraphDocument, parse_hypergraph_file

__all__ = ["list_examples", "load_example", "example_text"]


def list_examples() -> list[str]:
    root = resources.files("hypersync") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def example_text(name: str) -> str:
    path = resources.files("hypersync") / "data" / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"no bundled example {name!r}; available: {', '.join(list_examples())}")
    return path.read_text(encoding="utf-8")


def load_example(name: str) -> HypergraphDocument:
    return parse_hypergraph_file(example_text(name))
