"""Four-way marker classifiers for digraphic and diglossic varieties."""

from __future__ import annotations

import enum
import unicodedata
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

import regex

from speech_audit.errors import ConfigError, EmptyInputError
from speech_audit.variety.lexicon import MarkerLexicon

_WORD = regex.compile(r"\p{L}[\p{L}\p{M}]*")


class Category(str, enum.Enum):
    CLASS_A = "ClassA"
    CLASS_B = "ClassB"
    MIXED = "Mixed"
    UNMARKED = "Unmarked"


CATEGORY_ORDER = (Category.CLASS_A, Category.CLASS_B, Category.MIXED, Category.UNMARKED)


@dataclass(frozen=True)
class VarietyVerdict:
    category: Category
    a_score: int
    b_score: int
    matched_markers: tuple[tuple[str, Category], ...] = ()


def verdict_from_scores(a_score: int, b_score: int) -> Category:
    if a_score > b_score:
        return Category.CLASS_A
    if b_score > a_score:
        return Category.CLASS_B
    if a_score > 0:
        return Category.MIXED
    return Category.UNMARKED


def words(sentence: str) -> list[str]:
    """Maximal letter runs of the lowercased, NFC-normalized sentence."""
    return _WORD.findall(unicodedata.normalize("NFC", sentence).lower())


def classify_two_way(sentence: str, lexicon: MarkerLexicon) -> VarietyVerdict:
    """Score a sentence against both marker classes and compare the scores.

    Every distinct marker present adds one to its class. With word matching
    a marker must equal a whole word; with substring matching it only has to
    occur somewhere in the sentence. Suffix rules then add one per word that
    ends in the suffix.
    """
    if lexicon.is_empty:
        raise ConfigError(f"lexicon '{lexicon.name}' has no markers and no suffix rules")
    text = unicodedata.normalize("NFC", sentence).lower()
    hits: list[tuple[str, Category]] = []
    toks = _WORD.findall(text)

    if lexicon.matching == "word":
        present = set(toks)
        a_hits = sorted(lexicon.class_a_markers & present)
        b_hits = sorted(lexicon.class_b_markers & present)
    else:
        a_hits = sorted(m for m in lexicon.class_a_markers if m in text)
        b_hits = sorted(m for m in lexicon.class_b_markers if m in text)
    hits.extend((m, Category.CLASS_A) for m in a_hits)
    hits.extend((m, Category.CLASS_B) for m in b_hits)
    a_score, b_score = len(a_hits), len(b_hits)

    for suffix, cls in lexicon.suffix_rules:
        category = Category.CLASS_A if cls == "a" else Category.CLASS_B
        for tok in toks:
            if tok.endswith(suffix):
                hits.append((f"{tok}(-{suffix})", category))
                if cls == "a":
                    a_score += 1
                else:
                    b_score += 1

    return VarietyVerdict(verdict_from_scores(a_score, b_score), a_score, b_score, tuple(hits))


def classify_cantonese(sentence: str, lexicon: MarkerLexicon) -> VarietyVerdict:
    """Character-level containment matching; class A is SWC, class B Cantonese."""
    if lexicon.is_empty:
        raise ConfigError(f"lexicon '{lexicon.name}' has no markers")
    text = unicodedata.normalize("NFC", sentence)
    a_hits = sorted(m for m in lexicon.class_a_markers if m in text)
    b_hits = sorted(m for m in lexicon.class_b_markers if m in text)
    hits = tuple((m, Category.CLASS_A) for m in a_hits) + tuple((m, Category.CLASS_B) for m in b_hits)
    return VarietyVerdict(verdict_from_scores(len(a_hits), len(b_hits)), len(a_hits), len(b_hits), hits)


def round_percent(count: int, total: int, places: int = 1) -> float:
    """count/total*100 rounded half-up on the exact decimal value."""
    if total == 0:
        return 0.0
    exact = Decimal(count * 100) / Decimal(total)
    return float(exact.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class CorpusTally:
    lexicon: str
    labels: dict[str, str]
    counts: dict[str, int]
    total: int
    percentages: dict[str, float]
    exact_percentages: dict[str, float]

    @classmethod
    def from_counts(cls, counts: Counter, lexicon: MarkerLexicon) -> "CorpusTally":
        total = sum(counts.values())
        keys = [c.value for c in CATEGORY_ORDER]
        return cls(
            lexicon=lexicon.name,
            labels={k: lexicon.label(k) for k in keys},
            counts={k: int(counts.get(Category(k), 0)) for k in keys},
            total=total,
            percentages={k: round_percent(counts.get(Category(k), 0), total) for k in keys},
            exact_percentages={
                k: (100.0 * counts.get(Category(k), 0) / total if total else 0.0) for k in keys
            },
        )

    def percent(self, category: Category | str) -> float:
        return self.percentages[Category(category).value]


def tally_verdicts(verdicts: Iterable[VarietyVerdict]) -> Counter:
    return Counter(v.category for v in verdicts)


def classify_corpus(
    sentences: Sequence[str], lexicon: MarkerLexicon, cantonese: bool | None = None
) -> CorpusTally:
    """Classify every sentence and tally the four categories.

    ``cantonese`` selects :func:`classify_cantonese`; by default it is used
    for substring lexicons whose class B label is Cantonese.
    """
    if not sentences:
        raise EmptyInputError("classify_corpus needs at least one sentence")
    classify = classifier_for(lexicon, cantonese)
    return CorpusTally.from_counts(tally_verdicts(classify(s, lexicon) for s in sentences), lexicon)


def classifier_for(lexicon: MarkerLexicon, cantonese: bool | None):
    if cantonese is None:
        cantonese = lexicon.matching == "substring" and lexicon.class_b_label.lower() == "cantonese"
    return classify_cantonese if cantonese else classify_two_way
