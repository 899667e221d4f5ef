"""Packaged data files: canonical taxonomy and published benchmark tables."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from piiprep.labelspace import LabelSpace, load_taxonomy

__all__ = [
    "fixture_path",
    "taxonomy_path",
    "entity_results_path",
    "system_results_path",
    "canonical_space",
]


def fixture_path(name: str) -> Path:
    """Filesystem path of a packaged fixture file."""
    return Path(str(resources.files(__name__).joinpath(name)))


def taxonomy_path() -> Path:
    return fixture_path("taxonomy.tsv")


def entity_results_path() -> Path:
    """Published per-entity F1 table (entity, group, support, one column per system)."""
    return fixture_path("entity_results.csv")


def system_results_path() -> Path:
    """Published cross-system micro P/R/F1 table."""
    return fixture_path("system_results.csv")


def canonical_space() -> LabelSpace:
    """Label space of the shipped 82-type taxonomy."""
    return load_taxonomy(taxonomy_path())
