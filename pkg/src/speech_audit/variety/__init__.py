"""Rule-based variety and script classifiers driven by editable marker lexicons."""

from speech_audit.variety.classify import (
    CATEGORY_ORDER,
    Category,
    CorpusTally,
    VarietyVerdict,
    classify_cantonese,
    classify_corpus,
    classify_two_way,
    round_percent,
    verdict_from_scores,
)
from speech_audit.variety.lexicon import (
    BUILTIN_LEXICONS,
    MarkerLexicon,
    builtin_lexicon,
    load_lexicon,
    norwegian_lexicon,
    parse_lexicon,
)
from speech_audit.variety.scripts import (
    SUPPORTED_SCRIPTS,
    ScriptConformance,
    ScriptProfile,
    ScriptVerdict,
    check_script_expectation,
    detect_script,
)

__all__ = [
    "BUILTIN_LEXICONS",
    "CATEGORY_ORDER",
    "Category",
    "CorpusTally",
    "MarkerLexicon",
    "SUPPORTED_SCRIPTS",
    "ScriptConformance",
    "ScriptProfile",
    "ScriptVerdict",
    "VarietyVerdict",
    "builtin_lexicon",
    "check_script_expectation",
    "classify_cantonese",
    "classify_corpus",
    "classify_two_way",
    "detect_script",
    "load_lexicon",
    "norwegian_lexicon",
    "parse_lexicon",
    "round_percent",
    "verdict_from_scores",
]
