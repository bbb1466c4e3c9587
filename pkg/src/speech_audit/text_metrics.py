"""Text-side checks on prompts: length, templating, duplicates, dual-script entries."""

from __future__ import annotations

import enum
import random
import unicodedata
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
import regex
from rapidfuzz.distance import Levenshtein

from speech_audit.errors import EmptyInputError
from speech_audit.variety.scripts import char_script, han_fraction, letter_scripts

CJK_SCRIPTS = frozenset({"Han", "Hiragana", "Katakana"})

# one parenthesized run at the end, ASCII or fullwidth brackets
_DUAL = regex.compile(r"^(?P<base>[^()（）]+?)\s*[(（](?P<paren>[^()（）]*)[)）]$")
_PAREN_RUN = regex.compile(r"\s*[(（][^()（）]*[)）]")


class TokenMode(str, enum.Enum):
    WHITESPACE = "Whitespace"
    PER_CHARACTER_CJK = "PerCharacterCJK"


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def _whitespace_tokens(text: str) -> list[str]:
    out = []
    for tok in text.split():
        tok = strip_punct(tok)
        if tok:
            out.append(tok)
    return out


def tokenize(
    transcript: str, mode: TokenMode | str = TokenMode.WHITESPACE, lowercase: bool = True
) -> list[str]:
    """Split a transcript into word tokens or, for CJK text, per-character tokens.

    In per-character mode every Han/Kana character is its own token and any
    other run (e.g. embedded Latin) is split on whitespace as usual.
    """
    mode = TokenMode(mode)
    text = unicodedata.normalize("NFC", transcript)
    if lowercase:
        text = text.lower()
    if mode is TokenMode.WHITESPACE:
        return _whitespace_tokens(text)

    tokens: list[str] = []
    run: list[str] = []
    for ch in text:
        if char_script(ch) in CJK_SCRIPTS:
            if run:
                tokens.extend(_whitespace_tokens("".join(run)))
                run = []
            tokens.append(ch)
        else:
            run.append(ch)
    if run:
        tokens.extend(_whitespace_tokens("".join(run)))
    return tokens


def normalize(text: str) -> str:
    """Lowercase, drop punctuation characters, collapse whitespace."""
    text = unicodedata.normalize("NFC", text).lower()
    text = "".join(ch for ch in text if not _is_punct(ch))
    return " ".join(text.split())


def _auto_tokens(normalized: str) -> list[str]:
    if any(char_script(ch) in CJK_SCRIPTS for ch in normalized):
        return tokenize(normalized, TokenMode.PER_CHARACTER_CJK, lowercase=False)
    return normalized.split()


def edit_similarity(a: str, b: str) -> float:
    """1 - levenshtein(a, b) / max(len(a), len(b)); 1.0 for two empty strings."""
    return Levenshtein.normalized_similarity(a, b)


@dataclass(frozen=True)
class TemplateCluster:
    key_prefix: tuple[str, ...]
    size: int
    sample_sentences: tuple[str, ...]
    mean_similarity: float


def detect_templates(
    transcripts: Sequence[str],
    k_prefix: int = 4,
    min_cluster: int = 20,
    min_similarity: float = 0.7,
    max_sample: int = 50,
    seed: int = 0,
) -> list[TemplateCluster]:
    """Find groups of prompts that look stamped out of one template.

    Normalized sentences are bucketed by their first ``k_prefix`` tokens; a
    bucket with at least ``min_cluster`` members whose mean pairwise edit
    similarity (over at most ``max_sample`` members) reaches ``min_similarity``
    is reported. Sentences shorter than ``k_prefix`` tokens are never bucketed.
    """
    if not transcripts:
        raise EmptyInputError("detect_templates needs at least one transcript")
    buckets: dict[tuple[str, ...], list[int]] = defaultdict(list)
    normalized = [normalize(t) for t in transcripts]
    for i, norm in enumerate(normalized):
        toks = _auto_tokens(norm)
        if len(toks) >= k_prefix:
            buckets[tuple(toks[:k_prefix])].append(i)

    rng = random.Random(seed)
    clusters = []
    for key in sorted(buckets):
        members = buckets[key]
        if len(members) < min_cluster:
            continue
        sample = members if len(members) <= max_sample else sorted(rng.sample(members, max_sample))
        pairs = list(combinations(sample, 2))
        if pairs:
            sim = sum(edit_similarity(normalized[i], normalized[j]) for i, j in pairs) / len(pairs)
        else:
            sim = 1.0
        if sim >= min_similarity:
            clusters.append(
                TemplateCluster(
                    key_prefix=key,
                    size=len(members),
                    sample_sentences=tuple(transcripts[i] for i in members[:10]),
                    mean_similarity=sim,
                )
            )
    clusters.sort(key=lambda c: (-c.size, c.key_prefix))
    return clusters


@dataclass(frozen=True)
class DualScriptVerdict:
    dual_script: bool
    base_script: str | None = None
    paren_script: str | None = None

    @property
    def plain(self) -> bool:
        return not self.dual_script


PLAIN = DualScriptVerdict(False)


def _dominant(counts: Counter) -> str | None:
    if not counts:
        return None
    return min(counts, key=lambda s: (-counts[s], s))


def detect_dual_script(transcript: str, min_foreign: float = 0.9) -> DualScriptVerdict:
    """Recognize ``<base text>(<romanization>)`` style prompts.

    The parenthesized run qualifies when at least ``min_foreign`` of its
    letters are in a script other than the base run's dominant script.
    """
    text = unicodedata.normalize("NFC", transcript).strip()
    m = _DUAL.match(text)
    if not m:
        return PLAIN
    base_counts = letter_scripts(m.group("base"))
    paren_counts = letter_scripts(m.group("paren"))
    base = _dominant(base_counts)
    paren_total = sum(paren_counts.values())
    if base is None or paren_total == 0:
        return PLAIN
    foreign = paren_total - paren_counts.get(base, 0)
    if foreign / paren_total < min_foreign:
        return PLAIN
    foreign_counts = Counter({k: v for k, v in paren_counts.items() if k != base})
    return DualScriptVerdict(True, base, _dominant(foreign_counts))


def strip_cross_script_parens(transcript: str, min_foreign: float = 0.9) -> str:
    """Remove parenthesized runs written in a different script from the surrounding text."""
    text = unicodedata.normalize("NFC", transcript)
    outside = _PAREN_RUN.sub(" ", text)
    base = _dominant(letter_scripts(outside))
    if base is None:
        return text.strip()

    def repl(match: regex.Match) -> str:
        counts = letter_scripts(match.group(0))
        total = sum(counts.values())
        if total and (total - counts.get(base, 0)) / total >= min_foreign:
            return ""
        return match.group(0)

    return _PAREN_RUN.sub(repl, text).strip()


@dataclass(frozen=True)
class PromptShapeStats:
    n: int
    token_mode: str
    total_tokens: int
    median_word_count: float
    median_char_count: float
    dual_script_fraction: float
    exact_duplicate_fraction: float
    script_stripped_duplicate_fraction: float


def _duplicate_fraction(keys: Sequence[str]) -> float:
    counts = Counter(keys)
    return sum(c for c in counts.values() if c > 1) / len(keys)


def choose_token_mode(
    transcripts: Sequence[str], han_threshold: float = 0.5, sample_size: int = 1000
) -> TokenMode:
    """Per-character counting when Han letters dominate an order-independent sample."""
    ordered = sorted(transcripts)
    if len(ordered) > sample_size:
        step = len(ordered) / sample_size
        ordered = [ordered[int(i * step)] for i in range(sample_size)]
    if han_fraction(ordered) >= han_threshold:
        return TokenMode.PER_CHARACTER_CJK
    return TokenMode.WHITESPACE


def prompt_shape_stats(
    transcripts: Sequence[str], locale: str | None = None, han_threshold: float = 0.5
) -> PromptShapeStats:
    """Length, dual-script and duplicate statistics over a locale's prompts.

    ``locale`` is informational; the counting mode is chosen from the text.
    """
    if not transcripts:
        raise EmptyInputError("prompt_shape_stats needs at least one transcript")
    mode = choose_token_mode(transcripts, han_threshold)
    word_counts = [len(tokenize(t, mode)) for t in transcripts]
    char_counts = [sum(1 for ch in t if not ch.isspace()) for t in transcripts]
    dual = sum(1 for t in transcripts if detect_dual_script(t).dual_script)
    return PromptShapeStats(
        n=len(transcripts),
        token_mode=mode.value,
        total_tokens=int(sum(word_counts)),
        median_word_count=float(np.median(word_counts)),
        median_char_count=float(np.median(char_counts)),
        dual_script_fraction=dual / len(transcripts),
        exact_duplicate_fraction=_duplicate_fraction([normalize(t) for t in transcripts]),
        script_stripped_duplicate_fraction=_duplicate_fraction(
            [normalize(strip_cross_script_parens(t)) for t in transcripts]
        ),
    )
