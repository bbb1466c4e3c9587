import json
from dataclasses import replace

import numpy as np
import pytest

from builders import CATALAN_PLACES, NAN_TW_ROWS, synthetic_sentences
from speech_audit.audio_metrics import DurationStats, UtteranceAudioMetrics, duration_stats
from speech_audit.datastatement import emit_data_statement
from speech_audit.errors import ConfigError
from speech_audit.manifest import SourceKind, UtteranceRecord, parse_manifest
from speech_audit.report import (
    AuditReport,
    FlagCode,
    Severity,
    SpeechProportionStats,
    Thresholds,
    VarietyResult,
    apply_flags,
    emit_report,
    finalize,
    report_from_json,
    report_to_json,
    report_to_markdown,
    snr_stats,
    speaker_stats,
    speech_proportion_stats,
    tally_markdown,
)
from speech_audit.text_metrics import detect_templates, prompt_shape_stats
from speech_audit.variety import Category, CorpusTally, classify_corpus, norwegian_lexicon


def write_speaker_manifest(path, n_speakers, total_hours, clips_per_speaker=3, seed=0):
    """Generic CSV whose clip durations add up to ``total_hours`` exactly in decimal seconds."""
    rng = np.random.default_rng(seed)
    n = n_speakers * clips_per_speaker
    total_ms = round(total_hours * 3_600_000)
    weights = rng.uniform(0.5, 1.5, n)
    ms = np.floor(weights / weights.sum() * total_ms).astype(np.int64)
    ms[: total_ms - int(ms.sum())] += 1
    lines = ["id,speaker,file,text,duration"]
    for i in range(n):
        lines.append(f"u{i},s{i % n_speakers},c{i}.wav,text {i},{ms[i] / 1000:.3f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return parse_manifest(
        path,
        SourceKind.GENERIC_CSV,
        {"id": "utterance_id", "speaker": "speaker_id", "file": "audio_path", "text": "transcript", "duration": "duration_s"},
        locale="xx",
    )


def records(durations, speakers):
    return [
        UtteranceRecord(f"u{i}", f"{i}.wav", "t", "xx", speaker_id=s, duration_s=d)
        for i, (d, s) in enumerate(zip(durations, speakers))
    ]


def base_report(**kw):
    kw.setdefault("locale", "xx")
    kw.setdefault("record_count", 100)
    return AuditReport(**kw)


def sp_stats(pooled):
    return SpeechProportionStats(100, pooled, pooled, pooled, pooled, pooled)


def clean_prompts(n=200):
    return synthetic_sentences(n, seed=11)


# --- speaker stats -----------------------------------------------------------


def test_rw_and_mk_rows(tmp_path):
    rw = speaker_stats(write_speaker_manifest(tmp_path / "rw.csv", 1131, 2384.0).records)
    assert rw.unique_speakers == 1131
    assert round(rw.total_hours, 1) == 2384.0
    assert round(rw.avg_hours_per_speaker, 2) == 2.11
    mk = speaker_stats(write_speaker_manifest(tmp_path / "mk.csv", 19, 22.89).records)
    assert mk.unique_speakers == 19
    assert round(mk.total_hours, 1) == 22.9
    assert round(mk.avg_hours_per_speaker, 2) == 1.20


def test_single_speaker():
    ss = speaker_stats(records([3.0, 4.0], ["a", "a"]))
    assert ss.single_speaker and ss.top_speaker_share == 1.0


def test_speaker_hours_add_up():
    rng = np.random.default_rng(0)
    d = rng.uniform(1, 10, 500)
    spk = [f"s{k}" for k in rng.integers(0, 37, 500)]
    ss = speaker_stats(records(d, spk))
    assert ss.total_hours == pytest.approx(d.sum() / 3600, rel=1e-6)
    assert ss.avg_hours_per_speaker == pytest.approx(ss.total_hours / ss.unique_speakers)
    assert 0 < ss.top_speaker_share <= 1


def test_no_speaker_ids():
    assert speaker_stats(records([1.0], [None])) is None
    flags, notices = apply_flags(base_report())
    assert any("SingleSpeaker" in n for n in notices)


# --- aggregates --------------------------------------------------------------


def test_speech_and_snr_aggregates():
    m = [
        UtteranceAudioMetrics("a", 2.0, 1.0, 0.5, 10.0),
        UtteranceAudioMetrics("b", 6.0, 6.0, 1.0, None, "no-noise-reference"),
        UtteranceAudioMetrics("c", 0.0, 0.0, 0.0, None, error="decode failed"),
    ]
    sp = speech_proportion_stats(m)
    assert sp.n_analyzed == 2 and sp.pooled == 7 / 8 and sp.median == 0.75
    assert sp.other_proportion is None
    sn = snr_stats(m)
    assert (sn.n_defined, sn.n_no_noise_reference, sn.median_db) == (1, 1, 10.0)


# --- flags -------------------------------------------------------------------


def codes(report, thresholds=None):
    return [f.code for f in apply_flags(report, thresholds)[0]]


def test_extreme_short_durations():
    ds = DurationStats(1000, 2.45, 6.8, 2.6, 0.8, 9.0, 1.0)
    assert codes(base_report(duration_stats=ds)) == [FlagCode.EXTREME_SHORT_UTTERANCES]
    ds = replace(ds, median_s=3.5)
    assert codes(base_report(duration_stats=ds)) == [FlagCode.SHORT_UTTERANCES]
    ds = replace(ds, median_s=2.45, p99_s=7.5)
    assert codes(base_report(duration_stats=ds)) == [FlagCode.SHORT_UTTERANCES]


def test_constructed_median_feeds_extreme_flag():
    ds = duration_stats([1.5] * 50 + [2.45] + [3.2] * 49 + [6.5])
    assert ds.median_s == 2.45 and ds.p99_s < 7.0
    assert FlagCode.EXTREME_SHORT_UTTERANCES in codes(base_report(duration_stats=ds))


def test_low_speech_proportion():
    flags, _ = apply_flags(base_report(speech_proportion_stats=sp_stats(0.483)))
    assert [f.code for f in flags] == [FlagCode.LOW_SPEECH_PROPORTION]
    assert flags[0].evidence == {"speech_proportion": 0.483, "threshold": 0.5}
    assert flags[0].severity is Severity.FAIL


def test_speaker_flags():
    single = speaker_stats(records([3.0] * 4, ["a"] * 4))
    assert codes(base_report(speaker_stats=single)) == [FlagCode.SINGLE_SPEAKER]
    concentrated = speaker_stats(records([10.0, 1.0, 1.0], ["a", "b", "c"]))
    assert codes(base_report(speaker_stats=concentrated)) == [FlagCode.SPEAKER_CONCENTRATION]


def test_dual_script_fixture():
    ps = prompt_shape_stats(NAN_TW_ROWS * 3)
    got = codes(base_report(prompt_shape_stats=ps))
    assert FlagCode.DUAL_SCRIPT_PROMPTS in got and FlagCode.DICTIONARY_DUMP in got


def test_template_flag():
    prompts = [f"No he anat mai a {p}." for p in CATALAN_PLACES] + clean_prompts(100)
    rep = base_report(prompt_shape_stats=prompt_shape_stats(prompts), template_clusters=detect_templates(prompts))
    assert codes(rep) == [FlagCode.TEMPLATE_REPETITION]


def test_mixed_orthography_flag():
    lex = norwegian_lexicon()
    tally = classify_corpus(["Eg veit ikkje."] * 90 + ["Jeg vet ikke."] * 10, lex)
    expected_nn = VarietyResult(classifier="no", expected_category=Category.CLASS_A, tally=tally)
    assert codes(base_report(variety_tallies={"no": expected_nn})) == [FlagCode.MIXED_ORTHOGRAPHY]
    tally = classify_corpus(["Eg veit ikkje."] * 97 + ["Jeg vet ikke."] * 3, lex)
    unspecified = VarietyResult(classifier="no", tally=tally)
    assert codes(base_report(variety_tallies={"no": unspecified})) == []


def test_voxpopuli_like_report_is_clean():
    rng = np.random.default_rng(4)
    d = rng.uniform(7.0, 12.0, 400)
    spk = [f"s{i % 40}" for i in range(400)]
    rep = base_report(
        duration_stats=duration_stats(d),
        speech_proportion_stats=sp_stats(0.92),
        speaker_stats=speaker_stats(records(d, spk)),
        prompt_shape_stats=prompt_shape_stats(clean_prompts(400)),
        template_clusters=detect_templates(clean_prompts(400)),
    )
    assert rep.duration_stats.median_s >= 7.0
    assert apply_flags(rep) == ([], [])


def test_thresholds_and_severity_overrides():
    ds = DurationStats(10, 3.5, 6.0, 3.5, 1.0, 6.0, 1.0)
    rep = base_report(duration_stats=ds)
    flags, _ = apply_flags(rep, {"short_median_s": 3.0})
    assert flags == []
    flags, _ = apply_flags(rep, {"severities": {"ShortUtterances": "fail"}})
    assert flags[0].severity is Severity.FAIL
    for bad in ({"nonsense": 1}, {"short_median_s": "long"}, {"severities": {"Nope": "fail"}}):
        with pytest.raises(ConfigError):
            Thresholds.from_mapping(bad)


def test_flags_recompute_from_emitted_report():
    rep = finalize(
        base_report(
            duration_stats=DurationStats(10, 2.0, 5.0, 2.0, 1.0, 5.0, 1.0),
            speech_proportion_stats=sp_stats(0.3),
            prompt_shape_stats=prompt_shape_stats(NAN_TW_ROWS),
        )
    )
    again = report_from_json(report_to_json(rep))
    assert apply_flags(again)[0] == rep.flags
    assert all(f.evidence for f in rep.flags)
    assert rep.has_failures()


# --- emission ----------------------------------------------------------------


def test_minimal_json_round_trip():
    rep = base_report()
    assert report_from_json(emit_report(rep, "json")) == rep


def test_full_json_round_trip_is_canonical():
    rep = finalize(
        base_report(
            duration_stats=duration_stats([1.0, 2.0, 3.0]),
            prompt_shape_stats=prompt_shape_stats(NAN_TW_ROWS),
            template_clusters=detect_templates([f"No he anat mai a {p}." for p in CATALAN_PLACES]),
            variety_tallies={"no": VarietyResult(classifier="no", tally=classify_corpus(["Eg veit."], norwegian_lexicon()))},
        )
    )
    text = report_to_json(rep)
    back = report_from_json(text)
    assert back == rep
    assert report_to_json(back) == text
    assert json.loads(text)["schema_version"] == "1.0"


def test_markdown_tally_rows():
    counts = {"ClassA": 764, "ClassB": 96, "Mixed": 161, "Unmarked": 153}
    from collections import Counter

    tally = CorpusTally.from_counts(Counter({Category(k): v for k, v in counts.items()}), norwegian_lexicon())
    md = tally_markdown(tally)
    assert "| Nynorsk | 764 (65.1%) |" in md
    assert "| Bokmål | 96 (8.2%) |" in md
    full = report_to_markdown(base_report(variety_tallies={"no": VarietyResult(classifier="no", tally=tally)}))
    assert "Nynorsk | 764 (65.1%)" in full


def test_printed_percentages_match_counts():
    from collections import Counter

    rng = np.random.default_rng(9)
    for _ in range(50):
        c = rng.integers(0, 500, 4)
        if c.sum() == 0:
            continue
        tally = CorpusTally.from_counts(Counter(dict(zip(list(Category), c.tolist()))), norwegian_lexicon())
        for k, v in tally.counts.items():
            assert abs(tally.percentages[k] - 100 * v / tally.total) <= 0.05 + 1e-9


# --- data statement ----------------------------------------------------------


def test_data_statement_serbian():
    text = emit_data_statement("sr-RS")
    assert "Cyrillic, Latin" in text
    assert "Serbian" in text


def test_data_statement_unknown_locale():
    text = emit_data_statement("qq")
    sections = text.split("## ")[1:]
    assert len(sections) == 7
    for s in sections[1:]:
        assert "TODO" in s


def test_data_statement_pass_through_and_report():
    rep = finalize(base_report(speaker_stats=speaker_stats(records([3600.0, 3600.0], ["a", "b"]))))
    text = emit_data_statement("ar", {"register": "vernacular"}, rep)
    assert "## Register (High / Low)\n\nvernacular" in text
    assert "Diglossia" in text
    assert "2 unique speakers" in text
