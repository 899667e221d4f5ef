"""Span-level view of BIO label sequences.

The hot loops (span extraction, orphan counting) live in a small kernel that
exists twice: compiled (_speedups, Cython) and pure Python (_purespans). The
compiled one is preferred when importable; set PIIPREP_PURE_PYTHON=1 to force
the fallback. Both twins implement the same semantics, documented in
_purespans and summarised here:

- B-X opens a new span at its token.
- I-X continues a running span of type X. An orphan I-X (at sequence start,
  after O, or after a different type) opens a new span instead of being
  dropped, so annotation glitches still count as mentions.
- O and end-of-sequence close the running span. Spans are half-open token
  intervals [start, end).
"""

from __future__ import annotations

import os
from typing import Iterable, NamedTuple, Sequence

from piiprep.labelspace import LabelSpace, parse_bio_label

if os.environ.get("PIIPREP_PURE_PYTHON"):
    from piiprep import _purespans as _kernel
else:
    try:
        from piiprep import _speedups as _kernel  # type: ignore[no-redef]
    except ImportError:
        from piiprep import _purespans as _kernel  # type: ignore[no-redef]

__all__ = [
    "Span",
    "extract_spans",
    "extract_span_tuples",
    "count_orphan_continuations",
    "count_orphans_in_corpus",
    "normalize_bio",
    "project_to_coarse",
    "active_kernel",
]

# Raw-tuple entry points used by the streaming scorer; cheaper than wrapping
# every span in a NamedTuple.
extract_span_tuples = _kernel.extract_span_tuples
count_orphan_continuations = _kernel.count_orphan_continuations


class Span(NamedTuple):
    """Half-open token interval [start, end) carrying one entity type."""

    start: int
    end: int
    entity: str


def active_kernel() -> str:
    """Name of the kernel selected at import: 'cython' or 'python'."""
    return "cython" if _kernel.__name__.endswith("_speedups") else "python"


def extract_spans(labels: Sequence[str]) -> list[Span]:
    """Extract entity spans from a BIO sequence.

    >>> extract_spans(["B-A", "I-B", "I-B"])
    [Span(start=0, end=1, entity='A'), Span(start=1, end=3, entity='B')]
    """
    return [Span(*t) for t in extract_span_tuples(list(labels))]


def count_orphans_in_corpus(sequences: Iterable[Sequence[str]]) -> int:
    """Total orphan continuations across many sequences."""
    return sum(count_orphan_continuations(list(seq)) for seq in sequences)


def normalize_bio(labels: Sequence[str]) -> list[str]:
    """Rewrite orphan I-X labels to B-X; every other label passes through.

    The rewrite never changes extract_spans output, because an orphan I-X
    opens a span exactly like a B-X would.
    """
    out = list(labels)
    prev_typ: str | None = None
    for i, lab in enumerate(out):
        prefix, typ = parse_bio_label(lab)
        if prefix == "I" and typ != prev_typ:
            out[i] = "B-" + typ
        prev_typ = typ
    return out


def project_to_coarse(labels: Sequence[str], space: LabelSpace) -> list[str]:
    """Map fine labels onto coarse-group labels, prefix preserved.

    O stays O; B-TYPE becomes B-GROUP and I-TYPE becomes I-GROUP. Adjacent
    spans of distinct fine types in one group keep their B- boundaries, so
    the coarse sequence still separates them.
    """
    out: list[str] = []
    for lab in labels:
        prefix, typ = parse_bio_label(lab)
        if prefix == "O":
            out.append("O")
        else:
            out.append(f"{prefix}-{space.coarse_of(typ)}")
    return out
