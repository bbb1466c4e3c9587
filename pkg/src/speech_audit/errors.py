"""Exception hierarchy shared by all audit modules."""


class AuditError(Exception):
    """Base class for every error raised by speech_audit."""


class ConfigError(AuditError):
    """Bad configuration: missing column, unknown classifier, malformed thresholds."""


class EmptyInputError(AuditError):
    """An operation that needs at least one item received none."""


class ManifestIOError(AuditError, OSError):
    """A manifest, sidecar or lexicon file could not be read."""


class AudioDecodeError(AuditError):
    """Audio could not be decoded into samples."""


class TooShortAudioError(AuditError):
    """Fewer samples than one analysis frame."""


class InvalidAudioError(AuditError):
    """Samples contain NaN or infinity."""
