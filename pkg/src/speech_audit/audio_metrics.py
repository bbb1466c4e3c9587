"""Audio statistics: energy VAD, speech proportion, SNR, duration percentiles.

The voice activity detector is a plain frame-energy detector. Each frame's
power (in dBFS) is compared against ``max(noise_floor + margin, absolute_floor)``
where the noise floor is a low percentile of the utterance's own frame powers,
so decisions do not depend on recording gain. Decisions are then smoothed:
short gaps between speech runs are filled, and speech islands still shorter
than ``min_speech_ms`` are dropped.

Anything with a ``segment(samples, sample_rate) -> VadSegmentation`` method can
stand in for :class:`EnergyVad` (see :class:`SpeechSegmenter`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from speech_audit.errors import ConfigError, EmptyInputError, InvalidAudioError, TooShortAudioError

# power floor so that digital silence maps to a finite dB value
_POWER_FLOOR = 1e-20


@dataclass(frozen=True)
class VadConfig:
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    relative_margin_db: float = 12.0
    absolute_floor_dbfs: float = -60.0
    min_speech_ms: float = 100.0
    max_gap_ms: float = 150.0
    noise_floor_percentile: float = 0.20

    def __post_init__(self):
        if not (self.frame_ms >= self.hop_ms > 0):
            raise ConfigError("VadConfig requires frame_ms >= hop_ms > 0")
        if not (0 < self.noise_floor_percentile < 1):
            raise ConfigError("noise_floor_percentile must be in (0, 1)")
        if not self.relative_margin_db > 0:
            raise ConfigError("relative_margin_db must be > 0")
        if self.min_speech_ms < 0 or self.max_gap_ms < 0:
            raise ConfigError("min_speech_ms and max_gap_ms must be >= 0")


@dataclass(frozen=True, eq=False)
class VadSegmentation:
    frame_decisions: np.ndarray  # bool per frame, after smoothing
    speech_s: float
    total_s: float
    speech_proportion: float
    segments: tuple[tuple[float, float], ...]
    frame_power: np.ndarray = field(repr=False, compare=False, default=None)
    frame_bounds: np.ndarray = field(repr=False, compare=False, default=None)
    threshold_db: float = float("nan")


class SpeechSegmenter(Protocol):
    def segment(self, samples: np.ndarray, sample_rate: int) -> VadSegmentation: ...


def _frame_power(samples: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    frames = sliding_window_view(samples, frame_len)[::hop]
    return np.mean(frames * frames, axis=1)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Half-open index runs [start, end) where ``mask`` is True."""
    if mask.size == 0:
        return []
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return list(zip(edges[0::2].tolist(), edges[1::2].tolist()))


def _frame_boundaries(n_frames: int, frame_len: int, hop: int, n_samples: int) -> np.ndarray:
    """Sample boundaries tiling [0, n_samples] with one cell per frame, centred on it."""
    bounds = np.arange(n_frames + 1, dtype=np.float64) * hop + (frame_len - hop) / 2.0
    bounds[0] = 0.0
    bounds[-1] = n_samples
    return bounds


def smooth_decisions(
    raw: np.ndarray, durations: np.ndarray, max_gap_s: float, min_speech_s: float
) -> np.ndarray:
    """Fill interior gaps shorter than ``max_gap_s``, then drop islands shorter than ``min_speech_s``.

    ``durations`` gives the time each frame cell covers.
    """
    out = raw.astype(bool).copy()
    speech_runs = _runs(out)
    for (_, end), (nxt, _) in zip(speech_runs, speech_runs[1:]):
        if durations[end:nxt].sum() < max_gap_s:
            out[end:nxt] = True
    for start, end in _runs(out):
        if durations[start:end].sum() < min_speech_s:
            out[start:end] = False
    return out


class EnergyVad:
    def __init__(self, config: VadConfig | None = None):
        self.config = config or VadConfig()

    def segment(self, samples: np.ndarray, sample_rate: int) -> VadSegmentation:
        return segment_speech(samples, sample_rate, self.config)


def segment_speech(
    samples: Sequence[float] | np.ndarray, sample_rate: int, config: VadConfig | None = None
) -> VadSegmentation:
    """Label frames as speech/non-speech and derive the speech proportion."""
    config = config or VadConfig()
    if sample_rate < 8000:
        raise ConfigError(f"sample_rate must be >= 8000 Hz, got {sample_rate}")
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim > 1:
        x = x.mean(axis=1)
    if not np.all(np.isfinite(x)):
        raise InvalidAudioError("samples contain NaN or infinite values")
    frame_len = max(1, int(round(sample_rate * config.frame_ms / 1000.0)))
    hop = max(1, int(round(sample_rate * config.hop_ms / 1000.0)))
    if x.size < frame_len:
        raise TooShortAudioError(f"{x.size} samples is shorter than one {frame_len}-sample frame")

    power = _frame_power(x, frame_len, hop)
    db = 10.0 * np.log10(np.maximum(power, _POWER_FLOOR))
    noise_floor = float(np.percentile(db, 100.0 * config.noise_floor_percentile))
    threshold = max(noise_floor + config.relative_margin_db, config.absolute_floor_dbfs)
    raw = db > threshold

    bounds = _frame_boundaries(len(power), frame_len, hop, x.size) / sample_rate
    cell = np.diff(bounds)
    decisions = smooth_decisions(raw, cell, config.max_gap_ms / 1000.0, config.min_speech_ms / 1000.0)

    total_s = x.size / sample_rate
    segments = tuple((float(bounds[s]), float(bounds[e])) for s, e in _runs(decisions))
    speech_s = float(sum(e - s for s, e in segments))
    return VadSegmentation(
        frame_decisions=decisions,
        speech_s=speech_s,
        total_s=total_s,
        speech_proportion=min(1.0, speech_s / total_s) if total_s > 0 else 0.0,
        segments=segments,
        frame_power=power,
        frame_bounds=bounds,
        threshold_db=threshold,
    )


class SnrSentinel(str, enum.Enum):
    NO_SPEECH = "no-speech"
    NO_NOISE_REFERENCE = "no-noise-reference"


def estimate_snr(
    samples: Sequence[float] | np.ndarray,
    sample_rate: int,
    segmentation: VadSegmentation,
    config: VadConfig | None = None,
) -> float | SnrSentinel:
    """Speech-to-noise energy ratio in dB over the segmentation's frames.

    ``10 * log10(mean speech-frame power / mean non-speech-frame power)``.
    A noise reference of exactly zero power counts as missing.
    """
    power = segmentation.frame_power
    if power is None:
        config = config or VadConfig()
        x = np.asarray(samples, dtype=np.float64)
        frame_len = max(1, int(round(sample_rate * config.frame_ms / 1000.0)))
        hop = max(1, int(round(sample_rate * config.hop_ms / 1000.0)))
        power = _frame_power(x, frame_len, hop)
    speech = np.asarray(segmentation.frame_decisions, dtype=bool)
    if len(speech) != len(power):
        raise ValueError("segmentation was not produced from these samples")
    if not speech.any():
        return SnrSentinel.NO_SPEECH
    if speech.all():
        return SnrSentinel.NO_NOISE_REFERENCE
    noise = float(power[~speech].mean())
    if noise <= 0.0:
        return SnrSentinel.NO_NOISE_REFERENCE
    signal = float(power[speech].mean())
    if signal <= 0.0:
        return SnrSentinel.NO_SPEECH
    return 10.0 * math.log10(signal / noise)


@dataclass(frozen=True)
class DurationStats:
    n: int
    median_s: float
    p99_s: float
    mean_s: float
    min_s: float
    max_s: float
    under_10s_fraction: float


def duration_stats(durations: Sequence[float]) -> DurationStats:
    """Summary of utterance durations; percentiles interpolate linearly between order statistics."""
    d = np.asarray(list(durations), dtype=np.float64)
    if d.size == 0:
        raise EmptyInputError("duration_stats needs at least one duration")
    if not np.all(np.isfinite(d)) or np.any(d <= 0):
        raise ValueError("durations must be finite and positive")
    d = np.sort(d)
    return DurationStats(
        n=int(d.size),
        median_s=float(np.percentile(d, 50, method="linear")),
        p99_s=float(np.percentile(d, 99, method="linear")),
        mean_s=float(d.mean()),
        min_s=float(d[0]),
        max_s=float(d[-1]),
        under_10s_fraction=float(np.count_nonzero(d < 10.0) / d.size),
    )


def usable_hours(total_hours: float, speech_proportion: float) -> float:
    """Hours of audio that actually contain speech."""
    if not 0.0 <= speech_proportion <= 1.0:
        raise ValueError(f"speech_proportion must be in [0, 1], got {speech_proportion}")
    if total_hours < 0:
        raise ValueError(f"total_hours must be >= 0, got {total_hours}")
    return total_hours * speech_proportion


@dataclass(frozen=True)
class UtteranceAudioMetrics:
    utterance_id: str
    duration_s: float
    speech_s: float
    speech_proportion: float
    snr_db: float | None
    snr_note: str | None = None
    error: str | None = None
