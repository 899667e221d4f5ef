"""Pure-Python span kernels.

Twin of the compiled module _speedups; biospan picks one of the two at import
time. Any semantic change here must be mirrored there.

Span semantics: a span is a maximal half-open token interval of one entity
type. B-X always opens a new span. I-X continues a running span of the same
type; an I-X with no running span of type X (at sequence start, after O, or
after a different type) opens a new span rather than being dropped.
"""

from __future__ import annotations

from piiprep.errors import LabelError


def _entity_of(label: str, position: int) -> str:
    if len(label) < 3 or label[1] != "-" or label[0] not in "BI":
        raise LabelError(f"malformed BIO label at position {position}: {label!r}")
    return label[2:]


def extract_span_tuples(labels: list[str]) -> list[tuple[int, int, str]]:
    """Extract (start, end, entity_type) tuples from a BIO sequence."""
    spans: list[tuple[int, int, str]] = []
    start = -1
    cur: str | None = None
    for i, lab in enumerate(labels):
        if lab == "O":
            if cur is not None:
                spans.append((start, i, cur))
                cur = None
            continue
        typ = _entity_of(lab, i)
        if lab[0] == "B" or typ != cur:
            if cur is not None:
                spans.append((start, i, cur))
            start = i
            cur = typ
    if cur is not None:
        spans.append((start, len(labels), cur))
    return spans


def count_orphan_continuations(labels: list[str]) -> int:
    """Count I-X tokens whose predecessor is neither B-X nor I-X."""
    count = 0
    prev_typ: str | None = None
    for i, lab in enumerate(labels):
        if lab == "O":
            prev_typ = None
            continue
        typ = _entity_of(lab, i)
        if lab[0] == "I" and typ != prev_typ:
            count += 1
        prev_typ = typ
    return count
