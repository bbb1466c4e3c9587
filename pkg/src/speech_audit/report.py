"""Per-locale audit reports: speaker statistics, quality flags, JSON/Markdown output."""

from __future__ import annotations

import enum
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from speech_audit import __version__
from speech_audit.audio_metrics import DurationStats, UtteranceAudioMetrics
from speech_audit.errors import ConfigError
from speech_audit.manifest import UtteranceRecord
from speech_audit.text_metrics import PromptShapeStats, TemplateCluster
from speech_audit.variety.classify import CATEGORY_ORDER, Category, CorpusTally
from speech_audit.variety.scripts import ScriptConformance

SCHEMA_VERSION = "1.0"


# --- speakers ----------------------------------------------------------------


@dataclass(frozen=True)
class SpeakerStats:
    unique_speakers: int
    total_hours: float
    avg_hours_per_speaker: float
    top_speaker_share: float
    single_speaker: bool
    top_speaker_hours: float


def speaker_stats(records: Iterable[UtteranceRecord]) -> SpeakerStats | None:
    """Hours per speaker over records that have both a speaker id and a duration.

    Returns None when no record carries a speaker id.
    """
    per_speaker: dict[str, float] = defaultdict(float)
    for rec in records:
        if rec.speaker_id and rec.duration_s is not None:
            per_speaker[rec.speaker_id] += rec.duration_s
    if not per_speaker:
        return None
    total_s = math.fsum(per_speaker.values())
    top_s = max(per_speaker.values())
    n = len(per_speaker)
    return SpeakerStats(
        unique_speakers=n,
        total_hours=total_s / 3600.0,
        avg_hours_per_speaker=total_s / 3600.0 / n,
        top_speaker_share=top_s / total_s if total_s > 0 else 1.0,
        single_speaker=n == 1,
        top_speaker_hours=top_s / 3600.0,
    )


# --- speech proportion / SNR aggregates --------------------------------------


@dataclass(frozen=True)
class SpeechProportionStats:
    n_analyzed: int
    pooled: float  # total speech time / total audio time
    median: float
    mean: float
    min: float
    max: float
    # reserved for detectors that also label music/noise; the energy VAD is binary
    other_proportion: Optional[float] = None
    estimator: str = "energy-vad"


@dataclass(frozen=True)
class SnrStats:
    n_defined: int
    n_no_speech: int
    n_no_noise_reference: int
    median_db: Optional[float]
    mean_db: Optional[float]
    method: str = "10*log10(mean speech-frame power / mean non-speech-frame power)"


def speech_proportion_stats(metrics: Sequence[UtteranceAudioMetrics]) -> SpeechProportionStats | None:
    ok = [m for m in metrics if m.error is None]
    if not ok:
        return None
    props = sorted(m.speech_proportion for m in ok)
    total = math.fsum(m.duration_s for m in ok)
    speech = math.fsum(m.speech_s for m in ok)
    n = len(props)
    median = props[n // 2] if n % 2 else 0.5 * (props[n // 2 - 1] + props[n // 2])
    return SpeechProportionStats(
        n_analyzed=n,
        pooled=speech / total if total > 0 else 0.0,
        median=median,
        mean=math.fsum(props) / n,
        min=props[0],
        max=props[-1],
    )


def snr_stats(metrics: Sequence[UtteranceAudioMetrics]) -> SnrStats | None:
    ok = [m for m in metrics if m.error is None]
    if not ok:
        return None
    values = sorted(m.snr_db for m in ok if m.snr_db is not None)
    n = len(values)
    median = None
    if n:
        median = values[n // 2] if n % 2 else 0.5 * (values[n // 2 - 1] + values[n // 2])
    return SnrStats(
        n_defined=n,
        n_no_speech=sum(1 for m in ok if m.snr_note == "no-speech"),
        n_no_noise_reference=sum(1 for m in ok if m.snr_note == "no-noise-reference"),
        median_db=median,
        mean_db=math.fsum(values) / n if n else None,
    )


# --- flags -------------------------------------------------------------------


class FlagCode(str, enum.Enum):
    SHORT_UTTERANCES = "ShortUtterances"
    EXTREME_SHORT_UTTERANCES = "ExtremeShortUtterances"
    LOW_SPEECH_PROPORTION = "LowSpeechProportion"
    SINGLE_SPEAKER = "SingleSpeaker"
    SPEAKER_CONCENTRATION = "SpeakerConcentration"
    TEMPLATE_REPETITION = "TemplateRepetition"
    DUAL_SCRIPT_PROMPTS = "DualScriptPrompts"
    MIXED_ORTHOGRAPHY = "MixedOrthography"
    SCRIPT_MISMATCH = "ScriptMismatch"
    DICTIONARY_DUMP = "DictionaryDump"


class Severity(str, enum.Enum):
    WARN = "warn"
    FAIL = "fail"


DEFAULT_SEVERITIES = {
    FlagCode.SHORT_UTTERANCES.value: "warn",
    FlagCode.EXTREME_SHORT_UTTERANCES.value: "fail",
    FlagCode.LOW_SPEECH_PROPORTION.value: "fail",
    FlagCode.SINGLE_SPEAKER.value: "fail",
    FlagCode.SPEAKER_CONCENTRATION.value: "warn",
    FlagCode.TEMPLATE_REPETITION.value: "warn",
    FlagCode.DUAL_SCRIPT_PROMPTS.value: "fail",
    FlagCode.MIXED_ORTHOGRAPHY.value: "warn",
    FlagCode.SCRIPT_MISMATCH.value: "warn",
    FlagCode.DICTIONARY_DUMP.value: "fail",
}


class Thresholds(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    short_median_s: float = 4.0
    extreme_median_s: float = 3.0
    extreme_p99_s: float = 7.0
    low_speech_proportion: float = 0.5
    speaker_top_share: float = 0.5
    speaker_avg_hours: float = 1.0
    template_min_fraction: float = 0.01
    dual_script_fraction: float = 0.2
    mixed_orthography_fraction: float = 0.05
    script_conformance_min: float = 0.95
    dictionary_dump_max_median_words: float = 3.0
    dictionary_dump_min_duplicate_fraction: float = 0.1
    severities: dict[FlagCode, Severity] = Field(
        default_factory=lambda: {FlagCode(k): Severity(v) for k, v in DEFAULT_SEVERITIES.items()}
    )

    @classmethod
    def from_mapping(cls, data: Mapping | None) -> "Thresholds":
        data = dict(data or {})
        severities = {**DEFAULT_SEVERITIES, **dict(data.pop("severities", None) or {})}
        try:
            return cls(**data, severities=severities)
        except (ValidationError, TypeError) as exc:
            raise ConfigError(f"malformed thresholds: {exc}") from None


class QualityFlag(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: FlagCode
    severity: Severity
    evidence: dict[str, float]


class VarietyResult(BaseModel):
    classifier: str
    expected_category: Optional[Category] = None
    tally: CorpusTally


class AuditReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    tool_version: str = __version__
    locale: str
    source_kind: str = ""
    record_count: int
    rejected_rows: int = 0
    unresolved_durations: int = 0
    duration_stats: Optional[DurationStats] = None
    total_hours: Optional[float] = None
    speech_proportion_stats: Optional[SpeechProportionStats] = None
    snr_stats: Optional[SnrStats] = None
    usable_hours: Optional[float] = None
    usable_hours_note: str = "estimated: total hours x pooled speech proportion"
    speaker_stats: Optional[SpeakerStats] = None
    prompt_shape_stats: Optional[PromptShapeStats] = None
    template_clusters: list[TemplateCluster] = Field(default_factory=list)
    variety_tallies: dict[str, VarietyResult] = Field(default_factory=dict)
    script_conformance: Optional[ScriptConformance] = None
    thresholds: Thresholds = Field(default_factory=Thresholds)
    flags: list[QualityFlag] = Field(default_factory=list)
    notices: list[str] = Field(default_factory=list)
    config_fingerprint: str = ""

    def has_failures(self) -> bool:
        return any(f.severity is Severity.FAIL for f in self.flags)

    def flag_codes(self) -> list[str]:
        return [f.code.value for f in self.flags]


def apply_flags(
    report: AuditReport, thresholds: Thresholds | Mapping | None = None
) -> tuple[list[QualityFlag], list[str]]:
    """Evaluate every quality rule against the metrics embedded in ``report``.

    Returns ``(flags, notices)``; a notice names each rule skipped because its
    metric is missing.
    """
    if thresholds is None:
        t = report.thresholds
    elif isinstance(thresholds, Thresholds):
        t = thresholds
    else:
        t = Thresholds.from_mapping(thresholds)

    flags: list[QualityFlag] = []
    notices: list[str] = []

    def flag(code: FlagCode, **evidence: float) -> None:
        flags.append(
            QualityFlag(
                code=code,
                severity=t.severities.get(code, Severity(DEFAULT_SEVERITIES[code.value])),
                evidence={k: float(v) for k, v in evidence.items()},
            )
        )

    ds = report.duration_stats
    if ds is None:
        notices.append("no duration statistics: ShortUtterances and ExtremeShortUtterances skipped")
    elif ds.median_s < t.extreme_median_s and ds.p99_s < t.extreme_p99_s:
        flag(
            FlagCode.EXTREME_SHORT_UTTERANCES,
            median_s=ds.median_s,
            p99_s=ds.p99_s,
            threshold_median_s=t.extreme_median_s,
            threshold_p99_s=t.extreme_p99_s,
        )
    elif ds.median_s < t.short_median_s:
        flag(FlagCode.SHORT_UTTERANCES, median_s=ds.median_s, threshold_median_s=t.short_median_s)

    sp = report.speech_proportion_stats
    if sp is None:
        notices.append("no speech segmentation: LowSpeechProportion skipped")
    elif sp.pooled < t.low_speech_proportion:
        flag(
            FlagCode.LOW_SPEECH_PROPORTION,
            speech_proportion=sp.pooled,
            threshold=t.low_speech_proportion,
        )

    ss = report.speaker_stats
    if ss is None:
        notices.append("no speaker ids: SingleSpeaker and SpeakerConcentration skipped")
    elif ss.single_speaker:
        flag(FlagCode.SINGLE_SPEAKER, unique_speakers=ss.unique_speakers, top_speaker_share=ss.top_speaker_share)
    elif ss.top_speaker_share > t.speaker_top_share or ss.avg_hours_per_speaker > t.speaker_avg_hours:
        flag(
            FlagCode.SPEAKER_CONCENTRATION,
            top_speaker_share=ss.top_speaker_share,
            avg_hours_per_speaker=ss.avg_hours_per_speaker,
            threshold_top_share=t.speaker_top_share,
            threshold_avg_hours=t.speaker_avg_hours,
        )

    ps = report.prompt_shape_stats
    if ps is None:
        notices.append("no prompt statistics: text flags skipped")
    else:
        if report.template_clusters:
            covered = sum(c.size for c in report.template_clusters) / ps.n
            if covered >= t.template_min_fraction:
                flag(
                    FlagCode.TEMPLATE_REPETITION,
                    clustered_fraction=covered,
                    largest_cluster=report.template_clusters[0].size,
                    threshold=t.template_min_fraction,
                )
        if ps.dual_script_fraction >= t.dual_script_fraction:
            flag(
                FlagCode.DUAL_SCRIPT_PROMPTS,
                dual_script_fraction=ps.dual_script_fraction,
                threshold=t.dual_script_fraction,
            )
        dup = max(ps.exact_duplicate_fraction, ps.script_stripped_duplicate_fraction)
        if (
            ps.median_word_count <= t.dictionary_dump_max_median_words
            and dup >= t.dictionary_dump_min_duplicate_fraction
        ):
            flag(
                FlagCode.DICTIONARY_DUMP,
                median_word_count=ps.median_word_count,
                exact_duplicate_fraction=ps.exact_duplicate_fraction,
                script_stripped_duplicate_fraction=ps.script_stripped_duplicate_fraction,
                threshold_max_median_words=t.dictionary_dump_max_median_words,
                threshold_min_duplicate_fraction=t.dictionary_dump_min_duplicate_fraction,
            )

    for name in sorted(report.variety_tallies):
        result = report.variety_tallies[name]
        tally = result.tally
        if tally.total == 0:
            continue
        a, b = tally.counts[Category.CLASS_A.value], tally.counts[Category.CLASS_B.value]
        mixed = tally.counts[Category.MIXED.value]
        if result.expected_category in (Category.CLASS_A, Category.CLASS_B):
            other = b if result.expected_category is Category.CLASS_A else a
            off = (other + mixed) / tally.total
        else:
            off = min(a, b) / tally.total
        if off > t.mixed_orthography_fraction:
            flag(
                FlagCode.MIXED_ORTHOGRAPHY,
                off_variety_fraction=off,
                threshold=t.mixed_orthography_fraction,
            )

    sc = report.script_conformance
    if sc is not None and sc.n and sc.fraction < t.script_conformance_min:
        flag(FlagCode.SCRIPT_MISMATCH, conformance=sc.fraction, threshold=t.script_conformance_min)

    return flags, notices


def finalize(report: AuditReport) -> AuditReport:
    """Return ``report`` with flags and notices recomputed from its own metrics."""
    flags, notices = apply_flags(report)
    return report.model_copy(update={"flags": flags, "notices": notices})


# --- emission ----------------------------------------------------------------


class ReportFormat(str, enum.Enum):
    JSON = "json"
    MARKDOWN = "markdown"


def report_to_json(report: AuditReport) -> str:
    data = report.model_dump(mode="json")
    return json.dumps(data, ensure_ascii=False, indent=2, allow_nan=False) + "\n"


def report_from_json(text: str | bytes) -> AuditReport:
    return AuditReport.model_validate_json(text)


def _pct(count: int, total: int) -> str:
    from speech_audit.variety.classify import round_percent

    return f"{count} ({round_percent(count, total):.1f}%)"


def _fmt(value, digits: int = 2) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    return str(value)


def tally_markdown(result: VarietyResult | CorpusTally, title: str | None = None) -> str:
    tally = result.tally if isinstance(result, VarietyResult) else result
    lines = []
    if title:
        lines.append(f"### {title}")
        lines.append("")
    lines.append("| Category | Sentences |")
    lines.append("|---|---:|")
    for cat in CATEGORY_ORDER:
        lines.append(f"| {tally.labels[cat.value]} | {_pct(tally.counts[cat.value], tally.total)} |")
    lines.append(f"| Total | {tally.total} |")
    return "\n".join(lines)


def report_to_markdown(report: AuditReport) -> str:
    out = [f"# Audit report: {report.locale}", ""]
    out.append(f"- schema version: {report.schema_version}; tool version: {report.tool_version}")
    out.append(f"- records: {report.record_count} (rejected rows: {report.rejected_rows}, "
               f"unresolved durations: {report.unresolved_durations})")
    out.append(f"- config fingerprint: `{report.config_fingerprint}`")
    out.append("")

    out.append("## Quality flags")
    out.append("")
    if report.flags:
        out.append("| Flag | Severity | Evidence |")
        out.append("|---|---|---|")
        for f in report.flags:
            ev = ", ".join(f"{k}={v:g}" for k, v in f.evidence.items())
            out.append(f"| {f.code.value} | {f.severity.value} | {ev} |")
    else:
        out.append("No flags raised.")
    for n in report.notices:
        out.append(f"- note: {n}")
    out.append("")

    out.append("## Audio")
    out.append("")
    ds = report.duration_stats
    if ds:
        out.append("| n | median s | p99 s | mean s | min s | max s | < 10 s |")
        out.append("|---:|---:|---:|---:|---:|---:|---:|")
        out.append(
            f"| {ds.n} | {ds.median_s:.2f} | {ds.p99_s:.2f} | {ds.mean_s:.2f} | "
            f"{ds.min_s:.2f} | {ds.max_s:.2f} | {100 * ds.under_10s_fraction:.1f}% |"
        )
        out.append("")
    out.append(f"- total hours: {_fmt(report.total_hours)}")
    sp = report.speech_proportion_stats
    if sp:
        out.append(f"- speech proportion (pooled): {100 * sp.pooled:.1f}% "
                   f"(median per utterance {100 * sp.median:.1f}%, {sp.estimator})")
    out.append(f"- usable hours: {_fmt(report.usable_hours)} ({report.usable_hours_note})")
    if report.snr_stats:
        out.append(f"- SNR median: {_fmt(report.snr_stats.median_db, 1)} dB over "
                   f"{report.snr_stats.n_defined} utterances")
    out.append("")

    ss = report.speaker_stats
    out.append("## Speakers")
    out.append("")
    if ss:
        out.append("| unique speakers | total hours | avg hours / speaker | top speaker share |")
        out.append("|---:|---:|---:|---:|")
        out.append(f"| {ss.unique_speakers} | {ss.total_hours:.2f} | "
                   f"{ss.avg_hours_per_speaker:.2f} | {100 * ss.top_speaker_share:.1f}% |")
    else:
        out.append("Speaker ids unavailable.")
    out.append("")

    ps = report.prompt_shape_stats
    out.append("## Prompts")
    out.append("")
    if ps:
        out.append(f"- counting mode: {ps.token_mode}; total tokens: {ps.total_tokens}")
        out.append(f"- median words: {ps.median_word_count:g}; median characters: {ps.median_char_count:g}")
        out.append(f"- dual-script prompts: {100 * ps.dual_script_fraction:.1f}%")
        out.append(f"- exact duplicates: {100 * ps.exact_duplicate_fraction:.1f}%; "
                   f"after stripping romanizations: {100 * ps.script_stripped_duplicate_fraction:.1f}%")
    for c in report.template_clusters:
        out.append(f"- template `{' '.join(c.key_prefix)} ...`: {c.size} sentences "
                   f"(similarity {c.mean_similarity:.2f})")
    out.append("")

    if report.variety_tallies:
        out.append("## Variety classification")
        out.append("")
        for name in sorted(report.variety_tallies):
            out.append(tally_markdown(report.variety_tallies[name], title=name))
            out.append("")

    sc = report.script_conformance
    if sc:
        out.append("## Script conformance")
        out.append("")
        out.append(f"- expected {sc.expected_script}: {sc.conforming}/{sc.n} ({100 * sc.fraction:.1f}%)")
        for text in sc.offenders:
            out.append(f"  - `{text}`")
        out.append("")
    return "\n".join(out).rstrip() + "\n"


def emit_report(report: AuditReport, fmt: ReportFormat | str = ReportFormat.JSON) -> bytes:
    fmt = ReportFormat(fmt)
    text = report_to_json(report) if fmt is ReportFormat.JSON else report_to_markdown(report)
    return text.encode("utf-8")
