"""Dataset manifest parsing.

Turns Common Voice TSVs, headerless FLEURS TSVs and generic CSVs into a flat,
immutable list of :class:`UtteranceRecord`. Rows that cannot be used are never
dropped silently: they land in ``DatasetManifest.rejects`` with their row number.
"""

from __future__ import annotations

import csv
import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from speech_audit import audio_io
from speech_audit.errors import (
    AudioDecodeError,
    ConfigError,
    EmptyInputError,
    ManifestIOError,
)

MAX_REPORTED_REJECTS = 1000

ROLES = ("utterance_id", "speaker_id", "audio_path", "transcript", "locale", "duration_s")


class SourceKind(str, enum.Enum):
    COMMON_VOICE_TSV = "CommonVoiceTsv"
    FLEURS_TSV = "FleursTsv"
    GENERIC_CSV = "GenericCsv"


# Common Voice release header names. Only client_id/path/sentence are required.
COMMON_VOICE_COLUMNS = {
    "client_id": "speaker_id",
    "path": "audio_path",
    "sentence": "transcript",
    "locale": "locale",
}
COMMON_VOICE_REQUIRED = ("client_id", "path", "sentence")

# FLEURS: id, file_name, raw_transcription, transcription, characters, num_samples, gender
FLEURS_COLUMNS = {
    "1": "audio_path",
    "2": "transcript",
}
FLEURS_EXTRA_NAMES = {
    "0": "sentence_id",
    "3": "normalized_transcription",
    "4": "characters",
    "5": "num_samples",
    "6": "gender",
}

GENERIC_COLUMNS = {
    "id": "utterance_id",
    "utterance_id": "utterance_id",
    "speaker": "speaker_id",
    "speaker_id": "speaker_id",
    "client_id": "speaker_id",
    "path": "audio_path",
    "audio_path": "audio_path",
    "audio": "audio_path",
    "file": "audio_path",
    "sentence": "transcript",
    "text": "transcript",
    "transcript": "transcript",
    "locale": "locale",
    "duration": "duration_s",
    "duration_s": "duration_s",
}


@dataclass(frozen=True)
class UtteranceRecord:
    utterance_id: str
    audio_path: str
    transcript: str
    locale: str
    speaker_id: str | None = None
    duration_s: float | None = None
    extra: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.utterance_id:
            raise ValueError("utterance_id must be non-empty")
        if self.duration_s is not None and not (
            math.isfinite(self.duration_s) and self.duration_s > 0
        ):
            raise ValueError(f"duration_s must be finite and > 0, got {self.duration_s}")


@dataclass(frozen=True)
class RejectedRow:
    row_number: int
    reason: str


@dataclass(frozen=True)
class UnresolvedDuration:
    utterance_id: str
    reason: str


@dataclass(frozen=True)
class DatasetManifest:
    records: tuple[UtteranceRecord, ...]
    locale: str
    source_kind: SourceKind
    column_map: Mapping[str, str]
    rejects: tuple[RejectedRow, ...] = ()
    reject_total: int = 0
    data_rows: int = 0
    unresolved: tuple[UnresolvedDuration, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def transcripts(self) -> list[str]:
        return [r.transcript for r in self.records]


def _read_rows(path: Path, delimiter: str) -> list[list[str]]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            # QUOTE_NONE: prompts routinely contain bare quote characters
            quoting = csv.QUOTE_NONE if delimiter == "\t" else csv.QUOTE_MINIMAL
            return [row for row in csv.reader(fh, delimiter=delimiter, quoting=quoting)]
    except FileNotFoundError as exc:
        raise ManifestIOError(f"manifest not found: {path}") from exc
    except UnicodeDecodeError as exc:
        raise ManifestIOError(f"{path}: not valid UTF-8 ({exc})") from exc
    except OSError as exc:
        raise ManifestIOError(f"{path}: {exc}") from exc


def _resolve_columns(
    header: list[str], source_kind: SourceKind, column_map: Mapping[str, str] | None
) -> dict[str, str]:
    """Return header-name -> role for every header column that has a role."""
    if source_kind is SourceKind.COMMON_VOICE_TSV:
        base = dict(COMMON_VOICE_COLUMNS)
    elif source_kind is SourceKind.FLEURS_TSV:
        base = dict(FLEURS_COLUMNS)
    else:
        base = dict(GENERIC_COLUMNS)
    if column_map:
        for name, role in column_map.items():
            if role not in ROLES:
                raise ConfigError(f"unknown column role '{role}' for column '{name}'")
        if source_kind is SourceKind.GENERIC_CSV:
            base = {}
        else:
            # an override replaces whichever column previously held that role
            overridden = set(column_map.values())
            base = {k: v for k, v in base.items() if v not in overridden}
        base.update(column_map)

    if source_kind is SourceKind.COMMON_VOICE_TSV:
        for col in COMMON_VOICE_REQUIRED:
            if col not in header and col in base:
                raise ConfigError(f"missing required column '{col}'")
    mapped = {name: role for name, role in base.items() if name in header}
    for role in ("audio_path", "transcript"):
        if role not in mapped.values():
            wanted = [n for n, r in base.items() if r == role]
            raise ConfigError(
                f"missing required column '{wanted[0] if wanted else role}' (role {role})"
            )
    return mapped


def parse_manifest(
    path: str | os.PathLike,
    source_kind: SourceKind | str = SourceKind.COMMON_VOICE_TSV,
    column_map: Mapping[str, str] | None = None,
    locale: str | None = None,
) -> DatasetManifest:
    """Parse a manifest file into a :class:`DatasetManifest`.

    ``column_map`` maps header names (or, for FLEURS, zero-based column indices
    as strings) to record roles. When ``locale`` is not given it is taken from
    a ``locale`` column, falling back to ``"und"``.
    """
    path = Path(path)
    source_kind = SourceKind(source_kind)
    delimiter = "," if source_kind is SourceKind.GENERIC_CSV else "\t"
    rows = _read_rows(path, delimiter)

    if source_kind is SourceKind.FLEURS_TSV:
        width = max((len(r) for r in rows), default=0)
        header = [str(i) for i in range(width)]
        data = rows
        first_data_row = 1
    else:
        if not rows:
            raise EmptyInputError(f"{path}: no header row")
        header = [h.strip().lstrip("﻿") for h in rows[0]]
        data = rows[1:]
        first_data_row = 2
    # trailing blank lines are not data rows
    while data and not any(cell.strip() for cell in data[-1]):
        data.pop()
    if not data:
        raise EmptyInputError(f"{path}: manifest has zero data rows")

    mapped = _resolve_columns(header, source_kind, column_map)
    role_index = {role: header.index(name) for name, role in mapped.items()}
    extra_names = {}
    for i, name in enumerate(header):
        if name in mapped:
            continue
        if source_kind is SourceKind.FLEURS_TSV:
            name = FLEURS_EXTRA_NAMES.get(name, f"col{name}")
        extra_names[i] = name

    manifest_locale = locale
    if manifest_locale is None and "locale" in role_index:
        col = role_index["locale"]
        for row in data:
            if len(row) > col and row[col].strip():
                manifest_locale = row[col].strip()
                break
    manifest_locale = manifest_locale or "und"

    records: list[UtteranceRecord] = []
    rejects: list[RejectedRow] = []
    reject_total = 0
    seen_ids: set[str] = set()

    def reject(row_number: int, reason: str) -> None:
        nonlocal reject_total
        reject_total += 1
        if len(rejects) < MAX_REPORTED_REJECTS:
            rejects.append(RejectedRow(row_number, reason))

    for offset, row in enumerate(data):
        row_number = first_data_row + offset
        if len(row) != len(header) and source_kind is not SourceKind.FLEURS_TSV:
            reject(row_number, f"expected {len(header)} fields, found {len(row)}")
            continue

        def get(role: str) -> str | None:
            idx = role_index.get(role)
            if idx is None or idx >= len(row):
                return None
            return row[idx].strip()

        transcript = get("transcript")
        audio_path = get("audio_path")
        if not transcript:
            reject(row_number, "empty transcript")
            continue
        if not audio_path:
            reject(row_number, "empty audio path")
            continue
        utt_id = get("utterance_id") or audio_path
        if utt_id in seen_ids:
            reject(row_number, f"duplicate utterance id '{utt_id}'")
            continue
        row_locale = get("locale")
        if row_locale and row_locale != manifest_locale:
            reject(row_number, f"locale '{row_locale}' differs from manifest '{manifest_locale}'")
            continue
        duration = None
        raw_duration = get("duration_s")
        if raw_duration:
            try:
                duration = float(raw_duration)
            except ValueError:
                duration = None
            if duration is None or not math.isfinite(duration) or duration <= 0:
                reject(row_number, f"invalid duration '{raw_duration}'")
                continue
        extra = {name: row[i] for i, name in extra_names.items() if i < len(row)}
        seen_ids.add(utt_id)
        records.append(
            UtteranceRecord(
                utterance_id=utt_id,
                audio_path=audio_path,
                transcript=transcript,
                locale=manifest_locale,
                speaker_id=get("speaker_id") or None,
                duration_s=duration,
                extra=extra,
            )
        )

    return DatasetManifest(
        records=tuple(records),
        locale=manifest_locale,
        source_kind=source_kind,
        column_map=dict(mapped),
        rejects=tuple(rejects),
        reject_total=reject_total,
        data_rows=len(data),
    )


def write_manifest(manifest: DatasetManifest, path: str | os.PathLike) -> None:
    """Serialize records as a Common Voice style TSV (mapped columns, then extras)."""
    extra_cols: list[str] = []
    for rec in manifest.records:
        for key in rec.extra:
            if key not in extra_cols:
                extra_cols.append(key)
    header = ["client_id", "path", "sentence", "utterance_id", "locale", "duration_s", *extra_cols]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(
            fh, delimiter="\t", quoting=csv.QUOTE_NONE, quotechar=None, lineterminator="\n"
        )
        writer.writerow(header)
        for rec in manifest.records:
            writer.writerow(
                [
                    rec.speaker_id or "",
                    rec.audio_path,
                    rec.transcript,
                    rec.utterance_id,
                    rec.locale,
                    "" if rec.duration_s is None else repr(rec.duration_s),
                    *(rec.extra.get(c, "") for c in extra_cols),
                ]
            )


# --- durations ---------------------------------------------------------------


def read_sidecar_durations(path: str | os.PathLike) -> dict[str, float]:
    """Read ``clip_name<TAB>duration_ms`` rows; header optional. Returns seconds."""
    path = Path(path)
    out: dict[str, float] = {}
    rows = _read_rows(path, "\t")
    for i, row in enumerate(rows):
        if len(row) < 2 or not row[0].strip():
            continue
        try:
            ms = float(row[1])
        except ValueError:
            if i == 0:
                continue  # header
            raise ManifestIOError(f"{path}:{i + 1}: bad duration '{row[1]}'") from None
        out[row[0].strip()] = ms / 1000.0
    return out


@dataclass(frozen=True)
class DecodeAudio:
    audio_root: str | os.PathLike
    workers: int = 1


@dataclass(frozen=True)
class SidecarTsv:
    path: str | os.PathLike


def _probe_duration(path: Path) -> float:
    if path.suffix.lower() in ("", ".wav", ".wave"):
        return audio_io.wav_duration(path)
    samples, rate = audio_io.decode_audio(path)
    return len(samples) / rate


def resolve_audio_path(root: str | os.PathLike, audio_path: str) -> Path:
    p = Path(audio_path)
    return p if p.is_absolute() else Path(root) / p


def attach_durations(
    manifest: DatasetManifest, source: DecodeAudio | SidecarTsv
) -> DatasetManifest:
    """Fill ``duration_s`` from audio headers or a sidecar file.

    Records whose duration cannot be found keep ``duration_s`` unchanged and
    are listed in ``unresolved``. Ordering and count never change.
    """
    results: list[float | str]
    if isinstance(source, SidecarTsv):
        table = read_sidecar_durations(source.path)
        results = []
        for rec in manifest.records:
            name = rec.audio_path
            value = table.get(name, table.get(Path(name).name))
            if value is None:
                results.append("not in sidecar")
            elif not (math.isfinite(value) and value > 0):
                results.append(f"non-positive duration {value}")
            else:
                results.append(value)
    elif isinstance(source, DecodeAudio):
        root = Path(source.audio_root)
        if not root.is_dir():
            raise ConfigError(f"audio root does not exist: {root}")

        def probe(rec: UtteranceRecord) -> float | str:
            try:
                d = _probe_duration(resolve_audio_path(root, rec.audio_path))
            except AudioDecodeError as exc:
                return str(exc)
            return d if d > 0 else "zero-length audio"

        if source.workers > 1:
            with ThreadPoolExecutor(max_workers=source.workers) as pool:
                results = list(pool.map(probe, manifest.records))
        else:
            results = [probe(r) for r in manifest.records]
    else:
        raise ConfigError(f"unknown duration source {source!r}")

    records = []
    unresolved = list(manifest.unresolved)
    for rec, res in zip(manifest.records, results):
        if isinstance(res, str):
            unresolved.append(UnresolvedDuration(rec.utterance_id, res))
            records.append(rec)
        else:
            records.append(replace(rec, duration_s=float(res)))
    return replace(manifest, records=tuple(records), unresolved=tuple(unresolved))


def records_with_durations(records: Iterable[UtteranceRecord]) -> list[UtteranceRecord]:
    return [r for r in records if r.duration_s is not None]
