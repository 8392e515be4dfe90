"""Lexical-overlap measures and support/contradict/none tagging.

Both overlap measures work on deduplicated token sets: m2 is the fraction
of hypothesis words that also occur in the premise, m1 the fraction of
premise words that also occur in the hypothesis. A sample carries the
overlap property only when every hypothesis word occurs in the premise
(m2 exactly 1); its gold label then decides support vs contradict.

Tokenization keeps stopwords and folds case, and strips leading/trailing
punctuation; with any other combination the canonical judge/actor example
pair would not come out at full overlap.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .ingest import Corpus, GoldLabel, Sample


class HeuristicTag(str, Enum):
    SUPPORT = "support"
    CONTRADICT = "contradict"
    NONE = "none"


class TokenizationError(ValueError):
    """Raised when a text has no tokens left after normalization."""


@dataclass(frozen=True)
class TokenSet:
    tokens: frozenset[str]
    source_length: int


@dataclass(frozen=True)
class HeuristicAnnotation:
    sample_id: str
    m1: float
    m2: float
    tag: HeuristicTag


@dataclass
class CorpusAnnotations:
    by_id: dict[str, HeuristicAnnotation]
    failures: list[tuple[str, str]]


def _normalize(raw: str) -> str:
    token = raw.lower()
    start = 0
    end = len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def tokenize(text: str) -> TokenSet:
    """Split on Unicode whitespace, lowercase, strip edge punctuation.

    Tokens that normalize to the empty string are dropped; a text whose
    tokens all vanish raises TokenizationError.
    """
    normalized = [t for t in (_normalize(raw) for raw in text.split()) if t]
    if not normalized:
        raise TokenizationError(f"text {text!r} is empty after normalization")
    return TokenSet(tokens=frozenset(normalized), source_length=len(normalized))


def overlap_m2(premise: TokenSet, hypothesis: TokenSet) -> float:
    """Fraction of hypothesis words that occur in the premise."""
    if not hypothesis.tokens:
        raise ValueError("hypothesis token set is empty")
    return len(premise.tokens & hypothesis.tokens) / len(hypothesis.tokens)


def overlap_m1(premise: TokenSet, hypothesis: TokenSet) -> float:
    """Fraction of premise words that occur in the hypothesis."""
    if not premise.tokens:
        raise ValueError("premise token set is empty")
    return len(premise.tokens & hypothesis.tokens) / len(premise.tokens)


def tag_heuristic(sample: Sample) -> HeuristicAnnotation:
    """Annotate one sample with m1, m2, and its heuristic tag.

    The tag decision uses the exact subset test, not a float comparison:
    the overlap property means full containment of the hypothesis words.
    """
    premise = tokenize(sample.premise)
    hypothesis = tokenize(sample.hypothesis)
    m1 = overlap_m1(premise, hypothesis)
    m2 = overlap_m2(premise, hypothesis)
    if hypothesis.tokens <= premise.tokens:
        tag = (
            HeuristicTag.SUPPORT
            if sample.gold_label is GoldLabel.ENTAILMENT
            else HeuristicTag.CONTRADICT
        )
    else:
        tag = HeuristicTag.NONE
    return HeuristicAnnotation(sample_id=sample.id, m1=m1, m2=m2, tag=tag)


def annotate_corpus(corpus: Corpus) -> CorpusAnnotations:
    """One annotation per sample; tokenization failures are collected, not fatal."""
    by_id: dict[str, HeuristicAnnotation] = {}
    failures: list[tuple[str, str]] = []
    for sample in corpus.samples:
        try:
            by_id[sample.id] = tag_heuristic(sample)
        except TokenizationError as exc:
            failures.append((sample.id, str(exc)))
    return CorpusAnnotations(by_id=by_id, failures=failures)


ANNOTATION_COLUMNS = ("sample_id", "m1", "m2", "tag")


def write_annotations_csv(annotations: CorpusAnnotations, corpus: Corpus, path) -> None:
    """Annotation CSV in corpus order; reals carry 9 decimal digits."""
    import csv
    from pathlib import Path

    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ANNOTATION_COLUMNS)
        for sample in corpus.samples:
            ann = annotations.by_id.get(sample.id)
            if ann is None:
                continue
            writer.writerow([ann.sample_id, f"{ann.m1:.9f}", f"{ann.m2:.9f}", ann.tag.value])
