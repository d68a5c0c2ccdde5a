"""Summary quality metrics: ROUGE-N overlap and embedding-based coherence.

ROUGE uses multiset-clipped n-gram counting over the package tokenizer,
lowercased, with punctuation tokens excluded; no stemming or stopword
removal.  Coherence embeds sentences through the same provider interface
as the pipeline and averages cosine similarity at offsets one and two.

The sentence splitter is intentionally simple (terminator followed by
whitespace or end of text) and does not handle abbreviations.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from .chunking import tokenize
from .embeddings import EmbeddingProviderConfig, cosine_similarity, embed_batch

_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")
_WORD = re.compile(r"[^\W_]+$", re.UNICODE)


@dataclass
class RougeScore:
    precision: float
    recall: float
    f1: float
    n: int
    defined: bool = True


@dataclass
class CoherenceScore:
    first_order: float | None
    second_order: float | None
    sentence_count: int


@dataclass
class EvalReport:
    per_document: list[dict]
    aggregates: dict[str, dict[str, dict]]
    failure_counts: dict[str, int] = field(default_factory=dict)


def _metric_tokens(text: str) -> list[str]:
    return [t for t in tokenize(text.lower()).tokens if _WORD.match(t)]


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: str, reference: str, n: int) -> RougeScore:
    """Clipped n-gram precision/recall/F1 of candidate against reference.

    A candidate n-gram is credited at most as often as it occurs in the
    reference.  A reference with no n-grams makes the score undefined
    (defined=False) rather than zero.
    """
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    ref_counts = _ngrams(_metric_tokens(reference), n)
    cand_counts = _ngrams(_metric_tokens(candidate), n)
    ref_total = sum(ref_counts.values())
    cand_total = sum(cand_counts.values())
    if ref_total == 0:
        return RougeScore(0.0, 0.0, 0.0, n, defined=False)
    matches = sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
    recall = matches / ref_total
    precision = matches / cand_total if cand_total > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return RougeScore(precision, recall, f1, n)


def split_sentences(text: str) -> list[str]:
    """Split on '.', '!' or '?' followed by whitespace or end; trims pieces."""
    sentences = []
    start = 0
    for m in _SENTENCE_END.finditer(text):
        piece = text[start : m.end()].strip()
        if piece:
            sentences.append(piece)
        start = m.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def first_sentence(text: str) -> str:
    sentences = split_sentences(text)
    return sentences[0] if sentences else ""


def coherence(text: str, embed_cfg: EmbeddingProviderConfig) -> CoherenceScore:
    """Mean cosine similarity between sentence embeddings one and two apart.

    Fields are None (undefined) when the text has fewer than 2 or 3
    sentences respectively.
    """
    sentences = split_sentences(text)
    count = len(sentences)
    if count < 2:
        return CoherenceScore(None, None, count)
    vectors = embed_batch(sentences, embed_cfg)
    first = [cosine_similarity(vectors[i], vectors[i + 1]) for i in range(count - 1)]
    first_order = sum(first) / len(first)
    second_order = None
    if count >= 3:
        second = [cosine_similarity(vectors[i], vectors[i + 2]) for i in range(count - 2)]
        second_order = sum(second) / len(second)
    return CoherenceScore(first_order, second_order, count)


_METRICS = ("rouge1_f1", "rouge2_f1", "coherence_first", "coherence_second")


def evaluate_corpus(
    pairs: list[tuple[str, str]],
    embed_cfg: EmbeddingProviderConfig,
    modes: list[str] | None = None,
) -> EvalReport:
    """Score (candidate, reference) pairs and aggregate means per mode.

    Undefined metrics (empty reference, too few sentences) are recorded,
    excluded from the means, and counted in failure_counts.
    """
    if not pairs:
        raise ValueError("evaluate_corpus requires at least one pair")
    if modes is None:
        modes = ["default"] * len(pairs)
    if len(modes) != len(pairs):
        raise ValueError("modes must align with pairs")

    per_document: list[dict] = []
    failures = {m: 0 for m in _METRICS}
    buckets: dict[str, dict[str, list[float]]] = {}
    for (candidate, reference), mode in zip(pairs, modes):
        r1 = rouge_n(candidate, reference, 1)
        r2 = rouge_n(candidate, reference, 2)
        coh = coherence(candidate, embed_cfg)
        row = {
            "mode": mode,
            "rouge1": {"precision": r1.precision, "recall": r1.recall, "f1": r1.f1, "defined": r1.defined},
            "rouge2": {"precision": r2.precision, "recall": r2.recall, "f1": r2.f1, "defined": r2.defined},
            "coherence": {
                "first_order": coh.first_order,
                "second_order": coh.second_order,
                "sentence_count": coh.sentence_count,
            },
        }
        per_document.append(row)
        bucket = buckets.setdefault(mode, {m: [] for m in _METRICS})
        for metric, score, value in (
            ("rouge1_f1", r1, r1.f1),
            ("rouge2_f1", r2, r2.f1),
        ):
            if score.defined:
                bucket[metric].append(value)
            else:
                failures[metric] += 1
        for metric, value in (
            ("coherence_first", coh.first_order),
            ("coherence_second", coh.second_order),
        ):
            if value is not None:
                bucket[metric].append(value)
            else:
                failures[metric] += 1

    aggregates: dict[str, dict[str, dict]] = {}
    for mode, bucket in buckets.items():
        aggregates[mode] = {}
        for metric, values in bucket.items():
            aggregates[mode][metric] = {
                "mean": sum(values) / len(values) if values else None,
                "count": len(values),
            }
        # Schema slots for externally computed semantic scores.
        aggregates[mode]["bert_f1"] = {"mean": None, "count": 0}
        aggregates[mode]["bleurt"] = {"mean": None, "count": 0}
    return EvalReport(per_document=per_document, aggregates=aggregates, failure_counts=failures)


def render_table(report: EvalReport) -> str:
    """Aligned-column table of the per-mode means (ROUGE shown as percent)."""
    headers = ["Approach", "R-1", "R-2", "1st-O", "2nd-O", "BF1", "BLRT"]
    rows = []
    for mode in sorted(report.aggregates):
        agg = report.aggregates[mode]

        def cell(metric: str, percent: bool = False) -> str:
            mean = agg[metric]["mean"]
            if mean is None:
                return "-"
            return f"{mean * 100:.2f}" if percent else f"{mean:.3f}"

        rows.append(
            [
                mode,
                cell("rouge1_f1", percent=True),
                cell("rouge2_f1", percent=True),
                cell("coherence_first"),
                cell("coherence_second"),
                cell("bert_f1"),
                cell("bleurt"),
            ]
        )
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * widths[i] for i in range(len(headers))),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(lines) + "\n"
