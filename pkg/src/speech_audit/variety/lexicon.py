"""Marker lexicons and their text file format.

A lexicon file is UTF-8, one marker per line, grouped under section headers::

    # comments start with '#'
    [meta]
    name = norwegian
    class_a_label = Nynorsk
    class_b_label = Bokmål
    matching = word          # word | substring

    [class_a]
    ikkje
    [class_b]
    ikke
    [suffix_a]
    a
    [suffix_b]
    en

``[meta]`` is optional. Markers may not contain whitespace and a marker may
not belong to both classes.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from speech_audit.errors import ConfigError, ManifestIOError

SECTIONS = ("meta", "class_a", "class_b", "suffix_a", "suffix_b")
MATCHING_MODES = ("word", "substring")


def _norm(marker: str) -> str:
    return unicodedata.normalize("NFC", marker).lower()


@dataclass(frozen=True)
class MarkerLexicon:
    name: str
    class_a_markers: frozenset[str]
    class_b_markers: frozenset[str]
    # (suffix, "a" | "b")
    suffix_rules: tuple[tuple[str, str], ...] = ()
    matching: str = "word"
    class_a_label: str = "ClassA"
    class_b_label: str = "ClassB"
    meta: dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "class_a_markers", frozenset(_norm(m) for m in self.class_a_markers))
        object.__setattr__(self, "class_b_markers", frozenset(_norm(m) for m in self.class_b_markers))
        object.__setattr__(
            self, "suffix_rules", tuple((_norm(s), c) for s, c in self.suffix_rules)
        )
        overlap = self.class_a_markers & self.class_b_markers
        if overlap:
            raise ConfigError(f"lexicon '{self.name}': markers in both classes: {sorted(overlap)}")
        for m in self.class_a_markers | self.class_b_markers:
            if not m or any(ch.isspace() for ch in m):
                raise ConfigError(f"lexicon '{self.name}': invalid marker {m!r}")
        for suffix, cls in self.suffix_rules:
            if cls not in ("a", "b") or not suffix:
                raise ConfigError(f"lexicon '{self.name}': invalid suffix rule {(suffix, cls)!r}")
        if self.matching not in MATCHING_MODES:
            raise ConfigError(f"lexicon '{self.name}': matching must be one of {MATCHING_MODES}")

    @property
    def is_empty(self) -> bool:
        return not (self.class_a_markers or self.class_b_markers or self.suffix_rules)

    def label(self, category) -> str:
        value = getattr(category, "value", category)
        return {"ClassA": self.class_a_label, "ClassB": self.class_b_label}.get(value, value)


def parse_lexicon(text: str, name: str = "lexicon") -> MarkerLexicon:
    section = None
    buckets: dict[str, list[str]] = {s: [] for s in SECTIONS}
    meta: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in SECTIONS:
                raise ConfigError(f"{name}:{lineno}: unknown section [{section}]")
            continue
        if section is None:
            raise ConfigError(f"{name}:{lineno}: marker outside of a section")
        if section == "meta":
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{name}:{lineno}: expected key = value in [meta]")
            meta[key.strip()] = value.strip()
        else:
            buckets[section].append(line)

    return MarkerLexicon(
        name=meta.get("name", name),
        class_a_markers=frozenset(buckets["class_a"]),
        class_b_markers=frozenset(buckets["class_b"]),
        suffix_rules=tuple((s, "a") for s in buckets["suffix_a"])
        + tuple((s, "b") for s in buckets["suffix_b"]),
        matching=meta.get("matching", "word"),
        class_a_label=meta.get("class_a_label", "ClassA"),
        class_b_label=meta.get("class_b_label", "ClassB"),
        meta=meta,
    )


def load_lexicon(path: str | Path) -> MarkerLexicon:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ManifestIOError(f"lexicon not found: {path}") from exc
    except (OSError, UnicodeDecodeError) as exc:
        raise ManifestIOError(f"{path}: {exc}") from exc
    return parse_lexicon(text, name=path.stem)


# classifier id -> bundled lexicon file
BUILTIN_LEXICONS = {
    "no": "norwegian.lex",
    "ar": "arabic.lex",
    "yue": "cantonese.lex",
}


def builtin_lexicon(classifier_id: str) -> MarkerLexicon:
    try:
        filename = BUILTIN_LEXICONS[classifier_id]
    except KeyError:
        raise ConfigError(
            f"unknown classifier '{classifier_id}'; known: {', '.join(sorted(BUILTIN_LEXICONS))}"
        ) from None
    text = resources.files("speech_audit.data").joinpath(filename).read_text(encoding="utf-8")
    return parse_lexicon(text, name=classifier_id)


def norwegian_lexicon() -> MarkerLexicon:
    return builtin_lexicon("no")
