"""End-to-end audit of one manifest: audio analysis, text checks, flags."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional

from speech_audit import audio_io
from speech_audit.audio_metrics import (
    EnergyVad,
    SnrSentinel,
    SpeechSegmenter,
    UtteranceAudioMetrics,
    VadConfig,
    duration_stats,
    estimate_snr,
    segment_speech,
    usable_hours,
)
from speech_audit.config import AuditConfig
from speech_audit.errors import AuditError
from speech_audit.manifest import (
    DatasetManifest,
    SidecarTsv,
    UnresolvedDuration,
    UtteranceRecord,
    attach_durations,
    parse_manifest,
    resolve_audio_path,
)
from speech_audit.report import (
    AuditReport,
    VarietyResult,
    finalize,
    snr_stats,
    speaker_stats,
    speech_proportion_stats,
)
from speech_audit.text_metrics import detect_templates, prompt_shape_stats
from speech_audit.variety.classify import classify_corpus
from speech_audit.variety.scripts import check_script_expectation

log = logging.getLogger(__name__)


def analyze_utterance(
    record: UtteranceRecord, audio_root: Path, vad: VadConfig, segmenter: Optional[SpeechSegmenter] = None
) -> UtteranceAudioMetrics:
    """Decode one clip and measure duration, speech proportion and SNR.

    ``segmenter`` replaces the energy VAD configured by ``vad``. Errors are
    captured in the result rather than raised.
    """
    path = resolve_audio_path(audio_root, record.audio_path)
    try:
        samples, rate = audio_io.decode_audio(path)
        seg = segmenter.segment(samples, rate) if segmenter else segment_speech(samples, rate, vad)
    except (AuditError, ValueError) as exc:
        return UtteranceAudioMetrics(record.utterance_id, 0.0, 0.0, 0.0, None, error=str(exc))
    try:
        snr = estimate_snr(samples, rate, seg, vad)
    except ValueError:
        # a custom segmenter on its own frame grid: speech proportion stands, SNR does not
        snr = None
    if snr is None:
        snr_db, note = None, "frame-grid-mismatch"
    elif isinstance(snr, SnrSentinel):
        snr_db, note = None, snr.value
    else:
        snr_db, note = snr, None
    return UtteranceAudioMetrics(
        utterance_id=record.utterance_id,
        duration_s=seg.total_s,
        speech_s=seg.speech_s,
        speech_proportion=seg.speech_proportion,
        snr_db=snr_db,
        snr_note=note,
    )


def analyze_audio(
    manifest: DatasetManifest,
    audio_root: Path,
    vad: VadConfig,
    workers: int = 1,
    segmenter: Optional[SpeechSegmenter] = None,
) -> list[UtteranceAudioMetrics]:
    """Per-utterance metrics in manifest order, regardless of ``workers``."""
    records = manifest.records
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda r: analyze_utterance(r, audio_root, vad, segmenter), records))
    return [analyze_utterance(r, audio_root, vad, segmenter) for r in records]


def audit_manifest(
    manifest: DatasetManifest, config: AuditConfig, segmenter: Optional[SpeechSegmenter] = None
) -> AuditReport:
    """Audit an already-parsed manifest. ``segmenter`` replaces the configured energy VAD."""
    config.check_launch()
    vad = config.vad_config()
    thresholds = config.threshold_config()

    audio_metrics: list[UtteranceAudioMetrics] = []
    if config.durations == "sidecar":
        manifest = attach_durations(manifest, SidecarTsv(config.sidecar_path))
    else:
        audio_metrics = analyze_audio(manifest, Path(config.audio_root), vad, config.parallelism, segmenter)
        records, unresolved = [], list(manifest.unresolved)
        for rec, m in zip(manifest.records, audio_metrics):
            if m.error is None and m.duration_s > 0:
                records.append(replace(rec, duration_s=m.duration_s))
            else:
                unresolved.append(UnresolvedDuration(rec.utterance_id, m.error or "zero-length audio"))
                records.append(rec)
        manifest = replace(manifest, records=tuple(records), unresolved=tuple(unresolved))
    for u in manifest.unresolved[:20]:
        log.warning("unresolved duration for %s: %s", u.utterance_id, u.reason)

    durations = [r.duration_s for r in manifest.records if r.duration_s is not None]
    dstats = duration_stats(durations) if durations else None
    total_hours = sum(durations) / 3600.0 if durations else None

    sp = speech_proportion_stats(audio_metrics) if audio_metrics else None
    if sp is not None and segmenter is not None and not isinstance(segmenter, EnergyVad):
        sp = replace(sp, estimator=type(segmenter).__name__)
    usable = None
    if sp is not None:
        analyzed_hours = sum(m.duration_s for m in audio_metrics if m.error is None) / 3600.0
        usable = usable_hours(analyzed_hours, sp.pooled)

    transcripts = manifest.transcripts()
    tpl = config.templates
    clusters = detect_templates(
        transcripts, tpl.k_prefix, tpl.min_cluster, tpl.min_similarity, seed=config.seed
    )

    tallies = {}
    for c in config.classifiers:
        lexicon = c.load()
        tallies[c.id] = VarietyResult(
            classifier=c.id,
            expected_category=c.expected_category,
            tally=classify_corpus(transcripts, lexicon),
        )

    conformance = None
    if config.expected_script:
        conformance = check_script_expectation(transcripts, config.expected_script, seed=config.seed)

    report = AuditReport(
        locale=manifest.locale,
        source_kind=manifest.source_kind.value,
        record_count=len(manifest.records),
        rejected_rows=manifest.reject_total,
        unresolved_durations=len(manifest.unresolved),
        duration_stats=dstats,
        total_hours=total_hours,
        speech_proportion_stats=sp,
        snr_stats=snr_stats(audio_metrics) if audio_metrics else None,
        usable_hours=usable,
        speaker_stats=speaker_stats(manifest.records),
        prompt_shape_stats=prompt_shape_stats(transcripts, manifest.locale),
        template_clusters=clusters,
        variety_tallies=tallies,
        script_conformance=conformance,
        thresholds=thresholds,
        config_fingerprint=config.fingerprint(),
    )
    return finalize(report)


def run_audit(manifest_path: str | Path, config: AuditConfig) -> AuditReport:
    config.check_launch()
    manifest = parse_manifest(manifest_path, config.source_kind, config.column_map, config.locale)
    if manifest.reject_total:
        log.warning("%d manifest rows rejected", manifest.reject_total)
    return audit_manifest(manifest, config)
