"""Audit configuration file (YAML) and its validated model."""

from __future__ import annotations

import hashlib
import json
import re
from importlib import resources
from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from speech_audit.audio_metrics import VadConfig
from speech_audit.errors import ConfigError, ManifestIOError
from speech_audit.manifest import SourceKind
from speech_audit.report import Thresholds
from speech_audit.variety.classify import Category
from speech_audit.variety.lexicon import BUILTIN_LEXICONS, MarkerLexicon, builtin_lexicon, load_lexicon
from speech_audit.variety.scripts import SUPPORTED_SCRIPTS


class _ConfigLoader(yaml.SafeLoader):
    """SafeLoader where only true/false are booleans, so ``id: no`` stays a string."""


_ConfigLoader.yaml_implicit_resolvers = {
    first: [(tag, rx) for tag, rx in resolvers if tag != "tag:yaml.org,2002:bool"]
    for first, resolvers in yaml.SafeLoader.yaml_implicit_resolvers.items()
}
_ConfigLoader.add_implicit_resolver(
    "tag:yaml.org,2002:bool", re.compile(r"^(?:true|True|TRUE|false|False|FALSE)$"), list("tTfF")
)


def parse_yaml(text: str):
    return yaml.load(text, Loader=_ConfigLoader)


class ClassifierConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    lexicon: Optional[str] = None
    expected_category: Optional[Category] = None

    def load(self) -> MarkerLexicon:
        if self.lexicon:
            return load_lexicon(self.lexicon)
        return builtin_lexicon(self.id)


class TemplateConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k_prefix: int = Field(4, ge=1)
    min_cluster: int = Field(20, ge=1)
    min_similarity: float = Field(0.7, ge=0.0, le=1.0)


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: Optional[str] = "audit_report.json"
    format: Literal["json", "markdown", "both"] = "json"


class AuditConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    source_kind: SourceKind = SourceKind.COMMON_VOICE_TSV
    locale: Optional[str] = None
    column_map: Optional[dict[str, str]] = None
    durations: Literal["decode", "sidecar"] = "decode"
    audio_root: Optional[str] = "clips"
    sidecar_path: Optional[str] = None
    vad: dict = Field(default_factory=dict)
    thresholds: dict = Field(default_factory=dict)
    templates: TemplateConfig = Field(default_factory=TemplateConfig)
    classifiers: list[ClassifierConfig] = Field(default_factory=list)
    expected_script: Optional[str] = None
    output: OutputConfig = Field(default_factory=OutputConfig)
    parallelism: int = Field(1, ge=1)
    seed: int = 0

    @field_validator("expected_script")
    @classmethod
    def _known_script(cls, v):
        if v is not None and v not in SUPPORTED_SCRIPTS:
            raise ValueError(f"unknown script '{v}'")
        return v

    @field_validator("classifiers")
    @classmethod
    def _known_classifiers(cls, v):
        for c in v:
            if c.lexicon is None and c.id not in BUILTIN_LEXICONS:
                raise ValueError(f"unknown classifier '{c.id}' and no lexicon given")
        return v

    def vad_config(self) -> VadConfig:
        try:
            return VadConfig(**self.vad)
        except TypeError as exc:
            raise ConfigError(f"malformed vad section: {exc}") from None

    def threshold_config(self) -> Thresholds:
        return Thresholds.from_mapping(self.thresholds)

    def fingerprint(self) -> str:
        """Hash of every setting that can change report content."""
        data = self.model_dump(mode="json", exclude={"parallelism", "output", "audio_root", "sidecar_path"})
        blob = json.dumps(data, sort_keys=True, ensure_ascii=False).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]

    def resolve_paths(self, base: Path) -> "AuditConfig":
        def fix(p: Optional[str]) -> Optional[str]:
            if p is None:
                return None
            path = Path(p).expanduser()
            return str(path if path.is_absolute() else base / path)

        return self.model_copy(
            update={
                "audio_root": fix(self.audio_root),
                "sidecar_path": fix(self.sidecar_path),
                "classifiers": [
                    c.model_copy(update={"lexicon": fix(c.lexicon)}) for c in self.classifiers
                ],
                "output": self.output.model_copy(update={"path": fix(self.output.path)}),
            }
        )

    def check_launch(self) -> None:
        """Fail early on references that must exist before any work starts."""
        for c in self.classifiers:
            if c.lexicon and not Path(c.lexicon).is_file():
                raise ConfigError(f"lexicon file not found: {c.lexicon}")
        if self.durations == "decode":
            if not self.audio_root or not Path(self.audio_root).is_dir():
                raise ConfigError(f"audio root does not exist: {self.audio_root}")
        elif not self.sidecar_path or not Path(self.sidecar_path).is_file():
            raise ConfigError(f"sidecar duration file not found: {self.sidecar_path}")
        self.vad_config()
        self.threshold_config()


def default_config_text() -> str:
    return resources.files("speech_audit.data").joinpath("default_config.yaml").read_text(encoding="utf-8")


def config_from_mapping(data: dict | None, base: Path | None = None) -> AuditConfig:
    try:
        cfg = AuditConfig.model_validate(data or {})
    except ValidationError as exc:
        raise ConfigError(f"invalid config: {exc}") from None
    return cfg.resolve_paths(base) if base is not None else cfg


def load_config(path: str | Path | None) -> AuditConfig:
    """Load a YAML config; ``None`` gives the defaults relative to the working directory."""
    if path is None:
        return config_from_mapping(parse_yaml(default_config_text()), Path.cwd())
    path = Path(path)
    try:
        data = parse_yaml(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ManifestIOError(f"config not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from None
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_mapping(data, path.parent.resolve())
