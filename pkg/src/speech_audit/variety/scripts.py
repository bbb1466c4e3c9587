"""Unicode script profiling of prompt text."""

from __future__ import annotations

import enum
import random
import unicodedata
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import regex

from speech_audit.errors import ConfigError

SUPPORTED_SCRIPTS = (
    "Adlam",
    "Arabic",
    "Armenian",
    "Bengali",
    "Cyrillic",
    "Devanagari",
    "Ethiopic",
    "Georgian",
    "Greek",
    "Gujarati",
    "Gurmukhi",
    "Han",
    "Hangul",
    "Hebrew",
    "Hiragana",
    "Kannada",
    "Katakana",
    "Khmer",
    "Lao",
    "Latin",
    "Malayalam",
    "Mongolian",
    "Myanmar",
    "Nko",
    "Ol_Chiki",
    "Oriya",
    "Sinhala",
    "Tamil",
    "Telugu",
    "Thaana",
    "Thai",
    "Tibetan",
    "Tifinagh",
)

_SCRIPT_PATTERNS = [(name, regex.compile(rf"\p{{Script={name}}}")) for name in SUPPORTED_SCRIPTS]

OTHER = "Other"


def is_letter(ch: str) -> bool:
    return unicodedata.category(ch).startswith("L")


@lru_cache(maxsize=65536)
def char_script(ch: str) -> str | None:
    """Script of a letter character, ``"Other"`` for unlisted scripts, ``None`` for non-letters."""
    if not is_letter(ch):
        return None
    for name, pattern in _SCRIPT_PATTERNS:
        if pattern.match(ch):
            return name
    return OTHER


def letter_scripts(text: str) -> Counter:
    text = unicodedata.normalize("NFC", text)
    counts: Counter = Counter()
    for ch in text:
        script = char_script(ch)
        if script is not None:
            counts[script] += 1
    return counts


class ScriptVerdict(str, enum.Enum):
    SINGLE_SCRIPT = "SingleScript"
    MIXED_SCRIPT = "MixedScript"
    NO_LETTERS = "NoLetters"


@dataclass(frozen=True)
class ScriptProfile:
    per_script_letter_counts: dict[str, int]
    dominant: str
    secondary_fraction: float
    verdict: ScriptVerdict

    @property
    def total_letters(self) -> int:
        return sum(self.per_script_letter_counts.values())


def detect_script(text: str, mixed_threshold: float = 0.10) -> ScriptProfile:
    """Tally letters by script and decide whether the text mixes scripts.

    The dominant script is the most frequent one (ties go to the
    alphabetically first name). The text is mixed when letters outside the
    dominant script exceed ``mixed_threshold`` of all letters.
    """
    counts = letter_scripts(text)
    total = sum(counts.values())
    if total == 0:
        return ScriptProfile({}, "none", 0.0, ScriptVerdict.NO_LETTERS)
    dominant = min(counts, key=lambda s: (-counts[s], s))
    secondary = (total - counts[dominant]) / total
    verdict = ScriptVerdict.MIXED_SCRIPT if secondary > mixed_threshold else ScriptVerdict.SINGLE_SCRIPT
    return ScriptProfile(dict(sorted(counts.items())), dominant, secondary, verdict)


def han_fraction(texts: Iterable[str]) -> float:
    """Share of letters that are Han across ``texts`` (0.0 when there are no letters)."""
    counts: Counter = Counter()
    for t in texts:
        counts.update(letter_scripts(t))
    total = sum(counts.values())
    return counts["Han"] / total if total else 0.0


@dataclass(frozen=True)
class ScriptConformance:
    expected_script: str
    n: int
    conforming: int
    fraction: float
    offenders: tuple[str, ...]
    dominant_counts: dict[str, int]


def check_script_expectation(
    texts: Sequence[str],
    expected_script: str,
    mixed_threshold: float = 0.10,
    max_offenders: int = 20,
    seed: int = 0,
) -> ScriptConformance:
    """Fraction of sentences written purely in ``expected_script``.

    A sentence conforms when its dominant script is the expected one and it
    is not mixed. Up to ``max_offenders`` non-conforming sentences are
    sampled with a seeded RNG and returned in corpus order.
    """
    if expected_script not in SUPPORTED_SCRIPTS:
        raise ConfigError(
            f"unknown script '{expected_script}'; expected one of {', '.join(SUPPORTED_SCRIPTS)}"
        )
    offenders_idx = []
    dominant_counts: Counter = Counter()
    for i, text in enumerate(texts):
        profile = detect_script(text, mixed_threshold)
        dominant_counts[profile.dominant] += 1
        if not (profile.dominant == expected_script and profile.verdict is ScriptVerdict.SINGLE_SCRIPT):
            offenders_idx.append(i)
    n = len(texts)
    conforming = n - len(offenders_idx)
    if len(offenders_idx) > max_offenders:
        offenders_idx = sorted(random.Random(seed).sample(offenders_idx, max_offenders))
    return ScriptConformance(
        expected_script=expected_script,
        n=n,
        conforming=conforming,
        fraction=conforming / n if n else 0.0,
        offenders=tuple(texts[i] for i in offenders_idx),
        dominant_counts=dict(sorted(dominant_counts.items())),
    )
