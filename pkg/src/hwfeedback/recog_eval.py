"""Character error rate and recognizer correction-behaviour diagnostics."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidArgumentError

#: report cell for a page or corpus without any matched word
NO_DATA = "no data"


class EditOp(NamedTuple):
    """One alignment step.  ``i``/``j`` index the first/second string (-1 if none)."""

    kind: str  # "equal" | "sub" | "ins" | "del"
    i: int
    j: int


@dataclass(frozen=True)
class EditStats:
    distance: int
    ref_len: int
    hyp_len: int
    substitutions: int
    insertions: int
    deletions: int
    alignment: tuple[EditOp, ...] = ()


def levenshtein(a: str, b: str) -> EditStats:
    """Unit-cost edit distance from ``a`` to ``b`` with one optimal alignment.

    Insertions add characters of ``b``; deletions drop characters of ``a``.
    The backtrace prefers match/substitution, then deletion, then insertion.
    """
    n, m = len(a), len(b)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dist[i][0] = i
    for j in range(m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row, prev = dist[i], dist[i - 1]
        ai = a[i - 1]
        left = row[0]
        for j in range(1, m + 1):
            best = prev[j - 1] + (ai != b[j - 1])
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if left + 1 < best:
                best = left + 1
            row[j] = left = best

    ops: list[EditOp] = []
    subs = ins = dels = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + (a[i - 1] != b[j - 1]):
            if a[i - 1] == b[j - 1]:
                ops.append(EditOp("equal", i - 1, j - 1))
            else:
                ops.append(EditOp("sub", i - 1, j - 1))
                subs += 1
            i, j = i - 1, j - 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            ops.append(EditOp("del", i - 1, -1))
            dels += 1
            i -= 1
        else:
            ops.append(EditOp("ins", i, j - 1))
            ins += 1
            j -= 1
    ops.reverse()
    return EditStats(dist[n][m], n, m, subs, ins, dels, tuple(ops))


def cer(reference: str, hypothesis: str) -> float:
    """Edit distance over reference length; can exceed 1 for long spurious output."""
    if not reference:
        raise InvalidArgumentError("CER is undefined for an empty reference")
    return levenshtein(reference, hypothesis).distance / len(reference)


@dataclass(frozen=True)
class CerTally:
    """Additive CER counts so pages can be merged in any order."""

    edits: int = 0
    chars: int = 0
    words: int = 0
    word_cer_sum: float = 0.0

    def __add__(self, other: CerTally) -> CerTally:
        return CerTally(
            self.edits + other.edits,
            self.chars + other.chars,
            self.words + other.words,
            self.word_cer_sum + other.word_cer_sum,
        )

    @property
    def micro(self) -> float | None:
        return self.edits / self.chars if self.chars else None

    @property
    def macro(self) -> float | None:
        return self.word_cer_sum / self.words if self.words else None


def cer_tally(pairs: Iterable[tuple[str, str]]) -> CerTally:
    tally = CerTally()
    for ref, hyp in pairs:
        d = levenshtein(ref, hyp).distance
        per_word = d / len(ref) if ref else float(d > 0)
        tally = tally + CerTally(d, len(ref), 1, per_word)
    return tally


def corpus_cer(matched_pairs: Sequence[tuple[str, str]]) -> float | None:
    """Micro-averaged CER over (ground truth, prediction) pairs.

    Returns ``None`` when there is nothing to measure; callers report that as
    :data:`NO_DATA` and leave it out of aggregates.
    """
    return cer_tally(matched_pairs).micro


class CorrectionClass(str, enum.Enum):
    FAITHFUL = "faithful"
    OVER_CORRECTED = "over_corrected"
    DIVERGENT = "divergent"


def classify_recognition(written: str, intended: str, recognized: str) -> CorrectionClass:
    """How a recognizer treated a misspelling (case-insensitive)."""
    w, t, r = written.casefold(), intended.casefold(), recognized.casefold()
    if r == w:
        return CorrectionClass.FAITHFUL
    if r == t and t != w:
        return CorrectionClass.OVER_CORRECTED
    return CorrectionClass.DIVERGENT
