import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bio_spans_oracle, orphan_oracle, random_bio_labels
from piiprep import _purespans, biospan
from piiprep.biospan import (
    Span,
    active_kernel,
    count_orphans_in_corpus,
    extract_spans,
    normalize_bio,
    project_to_coarse,
)
from piiprep.errors import LabelError

KERNELS = [pytest.param(_purespans, id="python")]
try:
    from piiprep import _speedups

    KERNELS.append(pytest.param(_speedups, id="cython"))
except ImportError:
    _speedups = None

label_alphabet = st.sampled_from(
    ["O", "B-NAME", "I-NAME", "B-AMOUNT", "I-AMOUNT", "B-URL", "I-URL"]
)
label_lists = st.lists(label_alphabet, max_size=60)


@pytest.mark.parametrize("kernel", KERNELS)
class TestExtractSpanTuples:
    def test_simple_run(self, kernel):
        assert kernel.extract_span_tuples(["B-NAME", "I-NAME", "O"]) == [(0, 2, "NAME")]

    def test_adjacent_b_spans_stay_separate(self, kernel):
        labels = ["B-NAME", "B-NAME", "B-NAME"]
        assert kernel.extract_span_tuples(labels) == [
            (0, 1, "NAME"), (1, 2, "NAME"), (2, 3, "NAME"),
        ]

    def test_type_change_inside_run_splits(self, kernel):
        # I- of a different type right after B- opens a second span
        labels = ["B-NAME", "I-AMOUNT", "I-AMOUNT"]
        assert kernel.extract_span_tuples(labels) == [(0, 1, "NAME"), (1, 3, "AMOUNT")]

    def test_orphan_continuation_opens_span(self, kernel):
        assert kernel.extract_span_tuples(["I-NAME", "I-NAME"]) == [(0, 2, "NAME")]
        assert kernel.extract_span_tuples(["O", "I-URL", "O"]) == [(1, 2, "URL")]

    def test_span_open_at_sequence_end(self, kernel):
        assert kernel.extract_span_tuples(["O", "B-URL"]) == [(1, 2, "URL")]

    def test_b_after_i_same_type_starts_fresh(self, kernel):
        labels = ["B-NAME", "I-NAME", "B-NAME"]
        assert kernel.extract_span_tuples(labels) == [(0, 2, "NAME"), (2, 3, "NAME")]

    def test_empty_sequence(self, kernel):
        assert kernel.extract_span_tuples([]) == []

    def test_all_outside(self, kernel):
        assert kernel.extract_span_tuples(["O"] * 5) == []

    @pytest.mark.parametrize("bad", ["B", "I", "B-", "X-NAME", "", "b-NAME"])
    def test_malformed_label_raises_with_position(self, kernel, bad):
        with pytest.raises(LabelError, match="position 1"):
            kernel.extract_span_tuples(["O", bad])

    @settings(max_examples=300)
    @given(labels=label_lists)
    def test_agrees_with_oracle(self, kernel, labels):
        assert kernel.extract_span_tuples(labels) == bio_spans_oracle(labels)

    @settings(max_examples=200)
    @given(labels=label_lists)
    def test_spans_are_sorted_disjoint_and_in_bounds(self, kernel, labels):
        spans = kernel.extract_span_tuples(labels)
        prev_end = 0
        for start, end, typ in spans:
            assert 0 <= start < end <= len(labels)
            assert start >= prev_end
            prev_end = end
            assert typ

    def test_randomised_agreement_bulk(self, kernel):
        rng = random.Random(20260823)
        types = ["NAME", "IBAN", "CITY", "URL", "DATE", "SSN"]
        for _ in range(2000):
            labels = random_bio_labels(rng, types, rng.randint(0, 40))
            assert kernel.extract_span_tuples(labels) == bio_spans_oracle(labels)


@pytest.mark.parametrize("kernel", KERNELS)
class TestOrphanCount:
    def test_worked_example(self, kernel):
        corpus = [["I-A", "O", "I-A"], ["B-A", "I-B"]]
        total = sum(kernel.count_orphan_continuations(seq) for seq in corpus)
        assert total == 3

    def test_clean_sequences_have_none(self, kernel):
        assert kernel.count_orphan_continuations(["B-A", "I-A", "O", "B-B"]) == 0

    def test_i_after_different_type_counts(self, kernel):
        assert kernel.count_orphan_continuations(["B-A", "I-B", "I-B"]) == 1

    @settings(max_examples=300)
    @given(labels=label_lists)
    def test_agrees_with_oracle(self, kernel, labels):
        assert kernel.count_orphan_continuations(labels) == orphan_oracle(labels)


def test_both_kernels_ship():
    # The build must produce the compiled module; the pure twin always exists.
    assert _speedups is not None, "compiled span kernel missing from the build"
    assert active_kernel() in ("cython", "python")


def test_pure_python_override():
    import subprocess
    import sys

    code = "from piiprep.biospan import active_kernel; print(active_kernel())"
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"PIIPREP_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


class TestWrappers:
    def test_extract_spans_returns_named_tuples(self):
        spans = extract_spans(["B-NAME", "I-NAME"])
        assert spans == [Span(0, 2, "NAME")]
        assert spans[0].entity == "NAME"

    def test_count_orphans_in_corpus(self):
        assert count_orphans_in_corpus([["I-A", "O", "I-A"], ["B-A", "I-B"]]) == 3


class TestNormalizeBio:
    def test_orphans_become_begins(self):
        assert normalize_bio(["I-NAME", "I-NAME", "O", "I-URL"]) == [
            "B-NAME", "I-NAME", "O", "B-URL",
        ]

    def test_type_switch_becomes_begin(self):
        assert normalize_bio(["B-NAME", "I-URL"]) == ["B-NAME", "B-URL"]

    def test_clean_input_unchanged(self):
        labels = ["O", "B-NAME", "I-NAME", "B-NAME"]
        assert normalize_bio(labels) == labels

    @settings(max_examples=200)
    @given(labels=label_lists)
    def test_idempotent_and_span_preserving(self, labels):
        normal = normalize_bio(labels)
        assert normalize_bio(normal) == normal
        assert bio_spans_oracle(normal) == bio_spans_oracle(labels)
        assert orphan_oracle(normal) == 0


class TestProjectToCoarse:
    def test_fine_to_group(self, canonical_space):
        labels = ["O", "B-IBAN", "I-IBAN", "B-CITY"]
        assert project_to_coarse(labels, canonical_space) == [
            "O", "B-FINANCIAL_ID", "I-FINANCIAL_ID", "B-LOCATION",
        ]

    def test_unknown_type_rejected(self, canonical_space):
        with pytest.raises(LabelError):
            project_to_coarse(["B-NOT_A_TYPE"], canonical_space)

    def test_span_structure_survives_when_groups_differ(self, canonical_space):
        # same-group neighbours legitimately fuse; cross-group ones must not
        labels = ["B-IBAN", "B-CITY"]
        coarse = project_to_coarse(labels, canonical_space)
        assert len(biospan.extract_span_tuples(coarse)) == 2
