"""Quality auditing for multilingual speech datasets."""

__version__ = "0.1.0"

from speech_audit.audio_metrics import (  # noqa: E402
    DurationStats,
    EnergyVad,
    SnrSentinel,
    VadConfig,
    VadSegmentation,
    duration_stats,
    estimate_snr,
    segment_speech,
    usable_hours,
)
from speech_audit.manifest import (  # noqa: E402
    DatasetManifest,
    DecodeAudio,
    SidecarTsv,
    SourceKind,
    UtteranceRecord,
    attach_durations,
    parse_manifest,
)
from speech_audit.text_metrics import (  # noqa: E402
    TokenMode,
    detect_dual_script,
    detect_templates,
    prompt_shape_stats,
    tokenize,
)
from speech_audit.wer import align, corpus_wer  # noqa: E402

__all__ = [
    "DatasetManifest",
    "DecodeAudio",
    "DurationStats",
    "EnergyVad",
    "SidecarTsv",
    "SnrSentinel",
    "SourceKind",
    "TokenMode",
    "UtteranceRecord",
    "VadConfig",
    "VadSegmentation",
    "align",
    "attach_durations",
    "corpus_wer",
    "detect_dual_script",
    "detect_templates",
    "duration_stats",
    "estimate_snr",
    "parse_manifest",
    "prompt_shape_stats",
    "segment_speech",
    "tokenize",
    "usable_hours",
]
