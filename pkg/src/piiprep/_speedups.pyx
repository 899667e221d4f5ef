# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled span kernels.

Twin of _purespans; biospan picks one of the two at import time. Any semantic
change here must be mirrored there. See _purespans for the span semantics,
including the orphan-continuation rule.
"""

from piiprep.errors import LabelError


def extract_span_tuples(list labels):
    """Extract (start, end, entity_type) tuples from a BIO sequence."""
    cdef Py_ssize_t i, n = len(labels)
    cdef Py_ssize_t start = -1
    cdef str lab, typ
    cdef str cur = None
    cdef Py_UCS4 c0
    cdef list spans = []
    for i in range(n):
        lab = <str?> labels[i]
        if lab == "O":
            if cur is not None:
                spans.append((start, i, cur))
                cur = None
            continue
        if len(lab) < 3 or lab[1] != u"-":
            raise LabelError(f"malformed BIO label at position {i}: {lab!r}")
        c0 = lab[0]
        if c0 != u"B" and c0 != u"I":
            raise LabelError(f"malformed BIO label at position {i}: {lab!r}")
        typ = lab[2:]
        if c0 == u"B" or typ != cur:
            if cur is not None:
                spans.append((start, i, cur))
            start = i
            cur = typ
    if cur is not None:
        spans.append((start, n, cur))
    return spans


def count_orphan_continuations(list labels):
    """Count I-X tokens whose predecessor is neither B-X nor I-X."""
    cdef Py_ssize_t i, n = len(labels)
    cdef Py_ssize_t count = 0
    cdef str lab, typ
    cdef str prev_typ = None
    cdef Py_UCS4 c0
    for i in range(n):
        lab = <str?> labels[i]
        if lab == "O":
            prev_typ = None
            continue
        if len(lab) < 3 or lab[1] != u"-":
            raise LabelError(f"malformed BIO label at position {i}: {lab!r}")
        c0 = lab[0]
        if c0 != u"B" and c0 != u"I":
            raise LabelError(f"malformed BIO label at position {i}: {lab!r}")
        typ = lab[2:]
        if c0 == u"I" and typ != prev_typ:
            count += 1
        prev_typ = typ
    return count
