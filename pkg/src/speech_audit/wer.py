"""Token alignment and word/character error rates with Sub/Del/Ins breakdown."""

from __future__ import annotations

import csv
import enum
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from speech_audit.errors import EmptyInputError, ManifestIOError
from speech_audit.text_metrics import TokenMode, tokenize


class Op(str, enum.Enum):
    MATCH = "match"
    SUB = "sub"
    DEL = "del"
    INS = "ins"


@dataclass(frozen=True)
class AlignmentResult:
    n_ref: int
    hits: int
    substitutions: int
    deletions: int
    insertions: int
    # None when there are no reference tokens but there are hypothesis tokens
    wer: float | None
    alignment: tuple[tuple[Op, str | None, str | None], ...] = field(default=(), repr=False)
    substitution_pairs: Counter = field(default_factory=Counter, repr=False, compare=False)

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def n_hyp(self) -> int:
        return self.hits + self.substitutions + self.insertions

    def _rate(self, count: int) -> float | None:
        return 100.0 * count / self.n_ref if self.n_ref else None

    @property
    def substitution_rate(self) -> float | None:
        return self._rate(self.substitutions)

    @property
    def deletion_rate(self) -> float | None:
        return self._rate(self.deletions)

    @property
    def insertion_rate(self) -> float | None:
        return self._rate(self.insertions)

    def summary_line(self) -> str:
        if self.wer is None:
            return f"WER undefined (no reference tokens) | Ins {self.insertions}"
        return (
            f"WER {100 * self.wer:.1f} | Del {self.deletion_rate:.1f} / "
            f"Ins {self.insertion_rate:.1f} / Sub {self.substitution_rate:.1f}"
        )


def _wer(errors: int, n_ref: int, n_hyp: int) -> float | None:
    if n_ref:
        return errors / n_ref
    return 0.0 if n_hyp == 0 else None


def align(ref_tokens: Sequence[str], hyp_tokens: Sequence[str]) -> AlignmentResult:
    """Minimal unit-cost edit alignment of two token sequences.

    The backtrace starts at the ends of both sequences and, among optimal
    moves, prefers match, then substitution, then deletion, then insertion.
    """
    ref, hyp = list(ref_tokens), list(hyp_tokens)
    n, m = len(ref), len(hyp)
    # d[i][j] = distance between ref[:i] and hyp[:j]
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        d[i][0] = i
    for j in range(1, m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        ri = ref[i - 1]
        row, prev = d[i], d[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ri == hyp[j - 1] else 1
            row[j] = min(prev[j - 1] + cost, prev[j] + 1, row[j - 1] + 1)

    ops: list[tuple[Op, str | None, str | None]] = []
    subs: Counter = Counter()
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and d[i][j] == d[i - 1][j - 1]:
            ops.append((Op.MATCH, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and d[i][j] == d[i - 1][j - 1] + 1:
            ops.append((Op.SUB, ref[i - 1], hyp[j - 1]))
            subs[(ref[i - 1], hyp[j - 1])] += 1
            i, j = i - 1, j - 1
        elif i > 0 and d[i][j] == d[i - 1][j] + 1:
            ops.append((Op.DEL, ref[i - 1], None))
            i -= 1
        else:
            ops.append((Op.INS, None, hyp[j - 1]))
            j -= 1
    ops.reverse()

    counts = Counter(op for op, _, _ in ops)
    errors = counts[Op.SUB] + counts[Op.DEL] + counts[Op.INS]
    return AlignmentResult(
        n_ref=n,
        hits=counts[Op.MATCH],
        substitutions=counts[Op.SUB],
        deletions=counts[Op.DEL],
        insertions=counts[Op.INS],
        wer=_wer(errors, n, m),
        alignment=tuple(ops),
        substitution_pairs=subs,
    )


def align_text(ref: str, hyp: str, mode: TokenMode | str = TokenMode.WHITESPACE) -> AlignmentResult:
    return align(tokenize(ref, mode), tokenize(hyp, mode))


def corpus_wer(pairs: Iterable[tuple[Sequence[str], Sequence[str]] | AlignmentResult]) -> AlignmentResult:
    """Pool counts over many (ref_tokens, hyp_tokens) pairs or prior alignments.

    WER is None when no pair has reference tokens.
    """
    results = [p if isinstance(p, AlignmentResult) else align(*p) for p in pairs]
    if not results:
        raise EmptyInputError("corpus_wer needs at least one pair")
    n_ref = sum(r.n_ref for r in results)
    hits = sum(r.hits for r in results)
    s = sum(r.substitutions for r in results)
    d = sum(r.deletions for r in results)
    ins = sum(r.insertions for r in results)
    subs: Counter = Counter()
    for r in results:
        subs.update(r.substitution_pairs)
    return AlignmentResult(
        n_ref=n_ref,
        hits=hits,
        substitutions=s,
        deletions=d,
        insertions=ins,
        wer=(s + d + ins) / n_ref if n_ref else None,
        substitution_pairs=subs,
    )


def top_substitutions(result: AlignmentResult, k: int = 10) -> list[tuple[str, str, int]]:
    """Most frequent ref->hyp substitutions; ties broken by the pair itself."""
    items = sorted(result.substitution_pairs.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(r, h, c) for (r, h), c in items[:k]]


def read_id_tsv(path: str | Path) -> dict[str, str]:
    """Read ``utterance_id<TAB>text`` lines; a later duplicate id wins."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE))
    except FileNotFoundError as exc:
        raise ManifestIOError(f"file not found: {path}") from exc
    except (OSError, UnicodeDecodeError) as exc:
        raise ManifestIOError(f"{path}: {exc}") from exc
    out = {}
    for n, row in enumerate(rows):
        if not row or not row[0].strip():
            continue
        if n == 0 and row[0].strip().lower() in ("id", "utterance_id"):
            continue  # header
        out[row[0].strip()] = row[1] if len(row) > 1 else ""
    return out


@dataclass(frozen=True)
class JoinedPairs:
    pairs: list[tuple[str, str, str]]  # (id, ref, hyp)
    missing_in_hyp: list[str]
    missing_in_ref: list[str]


def join_on_id(ref: dict[str, str], hyp: dict[str, str]) -> JoinedPairs:
    common = [k for k in ref if k in hyp]
    return JoinedPairs(
        pairs=[(k, ref[k], hyp[k]) for k in common],
        missing_in_hyp=[k for k in ref if k not in hyp],
        missing_in_ref=[k for k in hyp if k not in ref],
    )
