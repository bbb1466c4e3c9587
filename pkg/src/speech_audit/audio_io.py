"""WAV decoding and the pluggable decoder registry.

Only uncompressed PCM WAV is handled natively. Anything else goes through a
decoder registered with :func:`register_decoder`, keyed by file suffix.
"""

from __future__ import annotations

import wave
from pathlib import Path
from typing import Callable

import numpy as np

from speech_audit.errors import AudioDecodeError

# A decoder returns mono-or-multichannel float samples in [-1, 1] and the rate.
Decoder = Callable[[Path], "tuple[np.ndarray, int]"]

_DECODERS: dict[str, Decoder] = {}


def register_decoder(suffix: str, decoder: Decoder) -> None:
    """Route files ending in ``suffix`` (e.g. ``".mp3"``) to ``decoder``."""
    _DECODERS[suffix.lower()] = decoder


def unregister_decoder(suffix: str) -> None:
    _DECODERS.pop(suffix.lower(), None)


def downmix(samples: np.ndarray) -> np.ndarray:
    """Average channels of a ``(n, channels)`` array into one."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1:
        return samples
    return samples.mean(axis=1)


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Decode an 8/16-bit PCM WAV into mono float64 samples in [-1, 1]."""
    path = Path(path)
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except (wave.Error, EOFError) as exc:
        raise AudioDecodeError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise AudioDecodeError(f"{path}: {exc}") from exc

    if width == 1:
        # 8-bit WAV is unsigned with a 128 offset
        data = (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    elif width == 2:
        data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    else:
        raise AudioDecodeError(f"{path}: unsupported sample width {8 * width} bits")
    if n_channels > 1:
        usable = len(data) - len(data) % n_channels
        data = data[:usable].reshape(-1, n_channels)
    return downmix(data), rate


def wav_duration(path: str | Path) -> float:
    """Duration from the RIFF header alone, without reading sample data."""
    path = Path(path)
    try:
        with wave.open(str(path), "rb") as wf:
            rate = wf.getframerate()
            n = wf.getnframes()
    except (wave.Error, EOFError, OSError) as exc:
        raise AudioDecodeError(f"{path}: {exc}") from exc
    if rate <= 0:
        raise AudioDecodeError(f"{path}: invalid sample rate {rate}")
    return n / rate


def decode_audio(path: str | Path) -> tuple[np.ndarray, int]:
    """Decode any supported file to mono float samples and sample rate."""
    path = Path(path)
    if not path.is_file():
        raise AudioDecodeError(f"{path}: no such file")
    suffix = path.suffix.lower()
    if suffix in _DECODERS:
        samples, rate = _DECODERS[suffix](path)
        return downmix(samples), int(rate)
    if suffix in ("", ".wav", ".wave"):
        return read_wav(path)
    raise AudioDecodeError(f"{path}: no decoder registered for '{suffix}'")


def write_wav(path: str | Path, samples: np.ndarray, sample_rate: int) -> None:
    """Write mono float samples as 16-bit PCM. Used by fixtures and demos."""
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 32767 / 32768)
    pcm = np.round(clipped * 32768.0).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(sample_rate)
        wf.writeframes(pcm.tobytes())
