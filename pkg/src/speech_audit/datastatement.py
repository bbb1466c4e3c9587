"""Data-statement skeletons for a locale, pre-filled where the language is known."""

from __future__ import annotations

from typing import Mapping

from speech_audit.report import AuditReport

# language subtag -> (name, scripts the language is written in, notes)
DIGRAPHIA = {
    "ckb": ("Central Kurdish (Sorani)", "Cyrillic, Hawar (Latin), Sorani (Arabic)",
            "Common Voice ckb: Arabic; FLEURS ckb_iq: Sorani (Arabic)."),
    "dyu": ("Dyula", "Latin, N'Ko", "Common Voice dyu: Latin."),
    "ff": ("Fula", "Adlam, Ajami (Arabic), Latin", "FLEURS ff_sn: Latin."),
    "ms": ("Malay", "Jawi (Arabic), Latin", "Common Voice ms and FLEURS ms_my: Latin."),
    "mn": ("Mongolian", "Cyrillic, Mongolian (Bichig)",
           "Common Voice mn and FLEURS mn_mn: Cyrillic. Official restoration of Bichig is underway."),
    "kmr": ("Northern Kurdish (Kurmanji)", "Cyrillic, Hawar (Latin), Sorani (Arabic)",
            "Common Voice kmr: Hawar (Latin)."),
    "sr": ("Serbian", "Cyrillic, Latin", "Common Voice sr: Cyrillic; FLEURS sr_rs: Cyrillic and Latin."),
    "pa": ("Punjabi", "Gurmukhi, Shahmukhi (Arabic)", "Common Voice and FLEURS pa_in: Gurmukhi."),
    "zgh": ("Tamazight", "Arabic, Latin, Tifinagh", "Common Voice zgh: Tifinagh."),
    "uz": ("Uzbek", "Arabic, Cyrillic, Latin", "Common Voice uz and FLEURS uz_uz: Latin."),
    "vot": ("Votic", "Cyrillic, Latin", "Common Voice vot: Latin."),
    "kk": ("Kazakh", "Cyrillic, Latin", "Official transition from Cyrillic to Latin is underway."),
    "nn": ("Norwegian Nynorsk", "Latin (Nynorsk and Bokmål written standards)",
           "Two written standards; check prompts with the Norwegian classifier."),
    "nb": ("Norwegian Bokmål", "Latin (Bokmål and Nynorsk written standards)",
           "Two written standards; check prompts with the Norwegian classifier."),
    "no": ("Norwegian", "Latin (Bokmål and Nynorsk written standards)",
           "Two written standards; declare which one the prompts follow."),
    "nan": ("Taiwanese Southern Min", "Han (Sinographs), Latin (Tâi-lô, Pe̍h-ōe-jī), mixed",
            "No community consensus on orthography; avoid prompts duplicated in two scripts."),
}

DIGLOSSIA = {
    "ar": "Arabic: Modern Standard Arabic (High) vs regional dialects (Low). State which register the prompts and speech use.",
    "yue": "Cantonese: Standard Written Chinese (High, Mandarin-based) vs Written Vernacular Cantonese (Low).",
    "zh": "Hong Kong Chinese: the 'zh' code may mean Standard Written Chinese or Cantonese; declare the register.",
    "de": "German: Standard German vs Swiss German varieties.",
    "gsw": "Swiss German vs Standard German.",
    "bo": "Tibetan: Classical (High) vs vernacular (Low) Tibetan.",
    "fa": "Persian: formal written vs colloquial spoken register.",
    "bn": "Bengali: sadhu/chalit and formal vs colloquial registers.",
}

TODO = "TODO"


def _subtag(locale: str) -> str:
    return locale.replace("-", "_").split("_", 1)[0].lower()


def emit_data_statement(
    locale: str,
    decisions: Mapping[str, str] | None = None,
    report: AuditReport | None = None,
) -> str:
    """Render a Markdown data statement; unknown fields become TODO placeholders.

    Recognized ``decisions`` keys: ``language``, ``scripts``, ``orthography``,
    ``register``, ``dialect_scope``, ``demographics``, ``notes``.
    """
    d = {k: str(v) for k, v in (decisions or {}).items() if v not in (None, "")}
    lang = _subtag(locale)
    digraph = DIGRAPHIA.get(lang)
    diglossia = DIGLOSSIA.get(lang)

    language = d.get("language") or (digraph[0] if digraph else TODO)
    scripts = d.get("scripts") or (digraph[1] if digraph else TODO)
    notes = []
    if digraph:
        notes.append(f"Digraphia: {digraph[0]} can be written in {digraph[1]}. {digraph[2]}")
    if diglossia:
        notes.append(f"Diglossia: {diglossia}")
    if "notes" in d:
        notes.append(d["notes"])

    demographics = d.get("demographics")
    if demographics is None and report is not None and report.speaker_stats is not None:
        ss = report.speaker_stats
        demographics = (
            f"{ss.unique_speakers} unique speakers, {ss.total_hours:.2f} h total, "
            f"{ss.avg_hours_per_speaker:.2f} h per speaker on average, "
            f"top speaker share {100 * ss.top_speaker_share:.1f}%."
        )

    lines = [f"# Data statement: {locale}", ""]
    lines += ["## Language and locale", "", f"- Locale tag: `{locale}`", f"- Language: {language}", ""]
    lines += [
        "## Scripts and orthography",
        "",
        f"- Script(s): {scripts}",
        f"- Orthography standard: {d.get('orthography', TODO)}",
        "",
    ]
    lines += ["## Register (High / Low)", "", d.get("register", TODO), ""]
    lines += ["## Dialect continuum scope", "", d.get("dialect_scope", TODO), ""]
    lines += ["## Speaker demographics", "", demographics or TODO, ""]
    lines += ["## Digraphia and diglossia notes", ""]
    lines += [f"- {n}" for n in notes] if notes else [TODO]
    lines.append("")
    lines += ["## Quality flags", ""]
    if report is None:
        lines.append(TODO)
    elif not report.flags:
        lines.append("No quality flags raised.")
    else:
        lines += [f"- {f.code.value} ({f.severity.value})" for f in report.flags]
    return "\n".join(lines).rstrip() + "\n"
