import json

import pytest
import yaml

from builders import nan_tw_like, voxpopuli_like, write_config
import numpy as np

from speech_audit import __version__
from speech_audit.audio_metrics import VadSegmentation
from speech_audit.audit import audit_manifest
from speech_audit.cli import main
from speech_audit.config import AuditConfig, default_config_text, load_config
from speech_audit.errors import ConfigError
from speech_audit.manifest import SourceKind, parse_manifest


@pytest.fixture(scope="module")
def nan_tw(tmp_path_factory):
    root = tmp_path_factory.mktemp("nan_tw")
    manifest, _ = nan_tw_like(root)
    return root, manifest


@pytest.fixture(scope="module")
def voxpopuli(tmp_path_factory):
    root = tmp_path_factory.mktemp("vox")
    manifest, _ = voxpopuli_like(root)
    return root, manifest


def run_audit(root, manifest, *extra, **cfg):
    config = write_config(root, **cfg)
    return main(["audit", str(manifest), "-c", str(config), *extra])


# --- audit -------------------------------------------------------------------


def test_clean_fixture_exits_zero(voxpopuli):
    root, manifest = voxpopuli
    assert run_audit(root, manifest) == 0
    report = json.loads((root / "report.json").read_text(encoding="utf-8"))
    assert report["flags"] == []
    assert report["duration_stats"]["median_s"] >= 7.0
    assert report["speech_proportion_stats"]["pooled"] >= 0.9


def test_nan_tw_fixture_exits_two(nan_tw, capsys):
    root, manifest = nan_tw
    assert run_audit(root, manifest) == 2
    report = json.loads((root / "report.json").read_text(encoding="utf-8"))
    codes = {f["code"] for f in report["flags"]}
    assert codes == {"ExtremeShortUtterances", "LowSpeechProportion", "DualScriptPrompts", "DictionaryDump"}
    assert "FAIL DualScriptPrompts" in capsys.readouterr().err
    assert report["locale"] == "nan-tw"
    assert report["usable_hours"] == pytest.approx(report["total_hours"] * report["speech_proportion_stats"]["pooled"])


def test_missing_audio_root_exits_one(nan_tw, capsys):
    root, manifest = nan_tw
    assert run_audit(root, manifest, audio_root="no_such_dir") == 1
    assert "audio root" in capsys.readouterr().err


def test_missing_manifest_and_bad_config_exit_one(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("parallelism: 0\n", encoding="utf-8")
    assert main(["audit", str(tmp_path / "m.tsv"), "-c", str(cfg)]) == 1
    cfg.write_text("nonsense_key: 1\n", encoding="utf-8")
    assert main(["audit", str(tmp_path / "m.tsv"), "-c", str(cfg)]) == 1
    assert main(["audit", str(tmp_path / "m.tsv"), "-c", str(tmp_path / "none.yaml")]) == 1


def test_markdown_and_both_outputs(nan_tw):
    root, manifest = nan_tw
    assert run_audit(root, manifest, "--format", "both", "-o", str(root / "out.json")) == 2
    assert json.loads((root / "out.json").read_text(encoding="utf-8"))["record_count"] == 60
    md = (root / "out.md").read_text(encoding="utf-8")
    assert "DualScriptPrompts" in md


def test_sidecar_durations(nan_tw, tmp_path):
    root, manifest = nan_tw
    side = root / "durations.tsv"
    side.write_text("".join(f"clip_{i:05d}.wav\t{2450}\n" for i in range(60)), encoding="utf-8")
    assert run_audit(root, manifest, durations="sidecar", sidecar_path="durations.tsv") == 2
    report = json.loads((root / "report.json").read_text(encoding="utf-8"))
    assert report["duration_stats"]["median_s"] == 2.45
    assert report["speech_proportion_stats"] is None
    assert any("LowSpeechProportion skipped" in n for n in report["notices"])


def test_classifier_and_script_config(nan_tw):
    root, manifest = nan_tw
    rc = run_audit(root, manifest, classifiers=[{"id": "yue"}], expected_script="Han")
    report = json.loads((root / "report.json").read_text(encoding="utf-8"))
    assert rc == 2
    assert report["script_conformance"]["fraction"] == 0.0
    assert "ScriptMismatch" in {f["code"] for f in report["flags"]}
    assert report["variety_tallies"]["yue"]["tally"]["total"] == 60


def test_parallel_reports_are_identical(nan_tw):
    root, manifest = nan_tw
    run_audit(root, manifest, "-j", "1", "-o", str(root / "p1.json"))
    run_audit(root, manifest, "-j", "8", "-o", str(root / "p8.json"))
    assert (root / "p1.json").read_bytes() == (root / "p8.json").read_bytes()


class AllSpeech:
    def segment(self, samples, sample_rate):
        total = len(samples) / sample_rate
        return VadSegmentation(np.ones(1, dtype=bool), total, total, 1.0, ((0.0, total),))


def test_custom_segmenter_replaces_energy_vad(nan_tw):
    root, manifest = nan_tw
    config = load_config(write_config(root))
    report = audit_manifest(parse_manifest(manifest, SourceKind.COMMON_VOICE_TSV), config, segmenter=AllSpeech())
    assert report.speech_proportion_stats.pooled == 1.0
    assert report.speech_proportion_stats.estimator == "AllSpeech"
    assert "LowSpeechProportion" not in report.flag_codes()
    assert report.snr_stats.n_defined == 0


# --- classify ----------------------------------------------------------------


def test_classify_lines(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text("Har eg dekt meg med song og harpespel.\nHar jeg dekket meg med sang og harpespill.\n", encoding="utf-8")
    assert main(["classify", str(f), "--classifier", "no"]) == 0
    out, err = capsys.readouterr()
    lines = out.splitlines()
    assert lines[0].split("\t")[:2] == ["1", "Nynorsk"]
    assert lines[1].split("\t")[:2] == ["2", "Bokmål"]
    assert lines[0].split("\t")[2] == "eg:Nynorsk"
    assert "Nynorsk\t1\t50.0%" in err


def test_classify_empty_file(tmp_path, capsys):
    f = tmp_path / "e.txt"
    f.write_text("", encoding="utf-8")
    assert main(["classify", str(f)]) == 0
    out, err = capsys.readouterr()
    assert out == ""
    assert "Total\t0" in err


def test_classify_errors(tmp_path):
    f = tmp_path / "s.txt"
    f.write_text("x\n", encoding="utf-8")
    assert main(["classify", str(f), "--classifier", "zz"]) == 1
    assert main(["classify", str(f), "--lexicon", str(tmp_path / "none.lex")]) == 1
    assert main(["classify", str(tmp_path / "none.txt")]) == 1


# --- wer ---------------------------------------------------------------------


def write_pair(tmp_path, ref_lines, hyp_lines):
    ref = tmp_path / "ref.tsv"
    hyp = tmp_path / "hyp.tsv"
    ref.write_text("".join(f"{k}\t{v}\n" for k, v in ref_lines), encoding="utf-8")
    hyp.write_text("".join(f"{k}\t{v}\n" for k, v in hyp_lines), encoding="utf-8")
    return str(ref), str(hyp)


def test_wer_pair(tmp_path, capsys):
    ref, hyp = write_pair(
        tmp_path,
        [("u1", "har eg dekt meg med song og harpespel")],
        [("u1", "har jeg dekket meg med sang og harpespill")],
    )
    assert main(["wer", ref, hyp]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "WER 50.0 | Del 0.0 / Ins 0.0 / Sub 50.0"
    assert "eg -> jeg" in out


def test_wer_identical_and_fixture(tmp_path, capsys):
    ref, hyp = write_pair(tmp_path, [("a", "x y z")], [("a", "x y z")])
    assert main(["wer", ref, hyp]) == 0
    assert capsys.readouterr().out.startswith("WER 0.0 |")
    ref, hyp = write_pair(
        tmp_path,
        [("a", "a b c d e f g h i j"), ("b", "a b c d e f g h i j")],
        [("a", "a x c e f g h z j q"), ("b", "a b c d e f g h i j")],
    )
    assert main(["wer", ref, hyp]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "WER 20.0 | Del 5.0 / Ins 5.0 / Sub 10.0"


def test_wer_char_mode_and_unmatched(tmp_path, capsys):
    ref, hyp = write_pair(tmp_path, [("a", "竹南鎮"), ("b", "x")], [("a", "竹東鎮"), ("c", "y")])
    assert main(["wer", ref, hyp, "--mode", "char"]) == 0
    cap = capsys.readouterr()
    assert cap.out.startswith("CER 33.3 |")
    assert "no hypothesis for id b" in cap.err


def test_wer_without_overlap_exits_one(tmp_path):
    ref, hyp = write_pair(tmp_path, [("a", "x")], [("b", "x")])
    assert main(["wer", ref, hyp]) == 1


# --- report, data statement, config ------------------------------------------


def test_report_rerender(nan_tw, capsys):
    root, manifest = nan_tw
    run_audit(root, manifest, "-o", str(root / "r.json"))
    capsys.readouterr()
    assert main(["report", str(root / "r.json")]) == 0
    md = capsys.readouterr().out
    assert md.startswith("#") and "ExtremeShortUtterances" in md
    assert main(["report", str(root / "r.json"), "--format", "json", "-o", str(root / "r2.json")]) == 0
    assert (root / "r2.json").read_bytes() == (root / "r.json").read_bytes()


def test_report_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"locale\": 3}", encoding="utf-8")
    assert main(["report", str(bad)]) == 1
    assert main(["report", str(tmp_path / "none.json")]) == 1


def test_data_statement_command(tmp_path, capsys):
    decisions = tmp_path / "d.yaml"
    decisions.write_text("register: vernacular\n", encoding="utf-8")
    assert main(["data-statement", "sr", "--decisions", str(decisions)]) == 0
    out = capsys.readouterr().out
    assert "Cyrillic, Latin" in out and "vernacular" in out


def test_print_default_config(capsys):
    assert main(["print-default-config"]) == 0
    text = capsys.readouterr().out
    assert main(["--print-default-config"]) == 0
    assert capsys.readouterr().out == text
    cfg = AuditConfig.model_validate(yaml.safe_load(text))
    assert cfg.vad_config().frame_ms == 25
    assert cfg.threshold_config().short_median_s == 4.0


def test_version_and_no_command(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out
    assert main([]) == 1


def test_config_loading(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("audio_root: wavs\nclassifiers:\n  - id: no\n    expected_category: ClassA\n", encoding="utf-8")
    cfg = load_config(p)
    assert cfg.audio_root == str(tmp_path / "wavs")
    assert cfg.classifiers[0].expected_category.value == "ClassA"
    assert cfg.fingerprint() == load_config(p).fingerprint()
    assert cfg.fingerprint() != cfg.model_copy(update={"seed": 1}).fingerprint()
    assert cfg.fingerprint() == cfg.model_copy(update={"parallelism": 8}).fingerprint()
    for bad in ("classifiers:\n  - id: xx\n", "expected_script: Klingon\n", "- a list\n", "vad: {frame_ms: 5}\n"):
        p.write_text(bad, encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(p).vad_config()
    assert "frame_ms: 25" in default_config_text()
