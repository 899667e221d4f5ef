#!/usr/bin/env python3
"""Time the compiled span kernel against the pure-Python twin.

Builds one synthetic corpus, then runs span extraction and a full
pair-scoring pass through both implementations. Run it from an environment
where the package is installed:

    python3 benchmarks/bench_span_kernel.py [--records 20000] [--seed 0]
"""

from __future__ import annotations

import argparse
import random
import time

from piiprep import _purespans

try:
    from piiprep import _speedups
except ImportError:
    _speedups = None

TYPES = ["NAME", "EMAIL", "IBAN", "CITY", "DATE", "URL", "SSN", "AMOUNT"]


def make_corpus(n_records: int, rng: random.Random) -> list[list[str]]:
    corpus = []
    for _ in range(n_records):
        length = rng.randint(5, 60)
        labels = []
        while len(labels) < length:
            if rng.random() < 0.55:
                labels.append("O")
            else:
                typ = rng.choice(TYPES)
                width = min(rng.randint(1, 4), length - len(labels))
                labels.append("B-" + typ)
                labels.extend(["I-" + typ] * (width - 1))
        corpus.append(labels[:length])
    return corpus


def perturb(corpus: list[list[str]], rng: random.Random) -> list[list[str]]:
    out = []
    for labels in corpus:
        copy = list(labels)
        for i in range(len(copy)):
            if rng.random() < 0.08:
                copy[i] = "O" if copy[i] != "O" else "B-" + rng.choice(TYPES)
        out.append(copy)
    return out


def bench_extract(kernel, corpus) -> tuple[float, int]:
    start = time.perf_counter()
    total = 0
    for labels in corpus:
        total += len(kernel.extract_span_tuples(labels))
    return time.perf_counter() - start, total


def bench_score(kernel, gold, pred) -> tuple[float, float]:
    start = time.perf_counter()
    tp = n_pred = n_gold = 0
    for g, p in zip(gold, pred):
        gold_spans = kernel.extract_span_tuples(g)
        pred_spans = kernel.extract_span_tuples(p)
        gold_set = set(gold_spans)
        n_gold += len(gold_spans)
        n_pred += len(pred_spans)
        tp += sum(1 for s in pred_spans if s in gold_set)
    elapsed = time.perf_counter() - start
    f1 = 2 * tp / (n_pred + n_gold) if (n_pred + n_gold) else 0.0
    return elapsed, f1


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--records", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    gold = make_corpus(args.records, rng)
    pred = perturb(gold, rng)
    tokens = sum(len(r) for r in gold)
    print(f"corpus: {args.records} records, {tokens} tokens")

    kernels = [("python", _purespans)]
    if _speedups is not None:
        kernels.append(("cython", _speedups))
    else:
        print("compiled kernel not available; timing pure Python only")

    results = {}
    for name, kernel in kernels:
        t_ext, spans = bench_extract(kernel, gold)
        t_sc, f1 = bench_score(kernel, gold, pred)
        results[name] = (t_ext, t_sc)
        print(f"{name:>7}: extract {t_ext * 1000:8.1f} ms ({spans} spans), "
              f"score {t_sc * 1000:8.1f} ms (F1 {f1:.4f})")

    if len(results) == 2:
        pe, ps = results["python"]
        ce, cs = results["cython"]
        print(f"speedup: extract {pe / ce:.1f}x, score {ps / cs:.1f}x")


if __name__ == "__main__":
    main()
