"""Reproducibility manifests for written artifacts.

A manifest records everything needed to check an artifact byte-for-byte and
content-wise: SHA-256 over the exact bytes, record/span/type/source counts,
orphan-continuation count, the seed and config digest that produced it, and
the RNG scheme. Manifests deliberately contain no timestamps or absolute
paths, so re-running a pipeline yields byte-identical manifests.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from piiprep.biospan import count_orphan_continuations, extract_span_tuples
from piiprep.records import read_records

__all__ = ["GENERATOR_NAME", "Manifest", "sha256_file", "build_manifest", "write_manifest"]

GENERATOR_NAME = "mt19937/sha256-subseed"


def sha256_file(path: str | Path) -> str:
    """Lowercase hex SHA-256 over the exact bytes of a file."""
    h = hashlib.sha256()
    with Path(path).open("rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class Manifest:
    artifact: str
    sha256: str
    records: int
    gold_spans: int
    entity_types: int
    sources: int
    per_source_records: dict[str, int]
    per_type_b_mentions: dict[str, int]
    orphan_continuations: int
    seed: int | None = None
    config_digest: str | None = None
    generator: str = GENERATOR_NAME

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Manifest":
        return cls(**json.loads(text))


def build_manifest(
    artifact_path: str | Path,
    *,
    seed: int | None = None,
    config_digest: str | None = None,
) -> Manifest:
    """Scan an artifact and compute its manifest."""
    path = Path(artifact_path)
    per_source: dict[str, int] = {}
    per_type_b: dict[str, int] = {}
    span_types: set[str] = set()
    n_records = 0
    n_spans = 0
    n_orphans = 0
    for rec in read_records(path):
        n_records += 1
        per_source[rec.source] = per_source.get(rec.source, 0) + 1
        n_orphans += count_orphan_continuations(rec.labels)
        for _, _, typ in extract_span_tuples(rec.labels):
            n_spans += 1
            span_types.add(typ)
        for lab in rec.labels:
            if lab.startswith("B-"):
                t = lab[2:]
                per_type_b[t] = per_type_b.get(t, 0) + 1
    return Manifest(
        artifact=path.name,
        sha256=sha256_file(path),
        records=n_records,
        gold_spans=n_spans,
        entity_types=len(span_types),
        sources=len(per_source),
        per_source_records=dict(sorted(per_source.items())),
        per_type_b_mentions=dict(sorted(per_type_b.items())),
        orphan_continuations=n_orphans,
        seed=seed,
        config_digest=config_digest,
    )


def write_manifest(
    artifact_path: str | Path,
    *,
    seed: int | None = None,
    config_digest: str | None = None,
) -> Manifest:
    """Compute and write <artifact>.manifest.json next to the artifact."""
    path = Path(artifact_path)
    manifest = build_manifest(path, seed=seed, config_digest=config_digest)
    out = path.with_name(path.name + ".manifest.json")
    out.write_text(manifest.to_json(), encoding="utf-8")
    return manifest
