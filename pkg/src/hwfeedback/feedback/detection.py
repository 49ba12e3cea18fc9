"""Spelling and segmentation error detection with character highlights."""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass
from typing import Sequence

from ..recog_eval import levenshtein
from .lexicon import Lexicon, lexicon_key

DEFAULT_MAX_EDIT = 2
#: edit budget when a split compound's concatenation is itself misspelled
COMPOUND_MAX_EDIT = 1
UNKNOWN_LABEL = "?"


class ErrorKind(str, enum.Enum):
    SPELLING = "spelling"
    MERGED_WORDS = "merged_words"
    SPLIT_COMPOUND = "split_compound"


@dataclass(frozen=True)
class ErrorFlag:
    """A writing error on one word (two adjacent words for split compounds).

    ``suggestion`` is ``None`` for an out-of-lexicon word with no candidate
    within the edit budget.  ``highlights`` index into ``original``; for split
    compounds ``original`` is the two texts joined by one space.
    """

    word_ids: tuple[str, ...]
    kind: ErrorKind
    suggestion: str | None
    highlights: tuple[int, ...]
    original: str

    def __post_init__(self) -> None:
        if self.suggestion is not None and not self.suggestion:
            raise ValueError("suggestion must be non-empty or None")
        if any(not 0 <= i < len(self.original) for i in self.highlights):
            raise ValueError(f"highlight index out of range for {self.original!r}")

    @property
    def unknown(self) -> bool:
        return self.suggestion is None

    @property
    def label(self) -> str:
        return self.suggestion if self.suggestion is not None else UNKNOWN_LABEL


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def split_token(text: str) -> tuple[str, str, str]:
    """Split into leading punctuation, core, trailing punctuation."""
    start, end = 0, len(text)
    while start < end and _is_punct(text[start]):
        start += 1
    while end > start and _is_punct(text[end - 1]):
        end -= 1
    return text[:start], text[start:end], text[end:]


def _checkable(core: str) -> bool:
    return bool(core) and not any(ch.isdigit() for ch in core)


def char_highlights(original: str, suggestion: str) -> tuple[int, ...]:
    """Indices of ``original`` touched by one optimal edit alignment to ``suggestion``.

    Substituted and deleted characters are highlighted; an insertion marks
    the character just before the gap (index 0 at the start).
    """
    if not original:
        return ()
    marks: set[int] = set()
    for op in levenshtein(original, suggestion).alignment:
        if op.kind in ("sub", "del"):
            marks.add(op.i)
        elif op.kind == "ins":
            marks.add(max(op.i - 1, 0))
    return tuple(sorted(marks))


def _bounded_distance(a: str, b: str, limit: int) -> int:
    """Edit distance, or ``limit + 1`` as soon as it must exceed ``limit``."""
    if abs(len(a) - len(b)) > limit:
        return limit + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cur[j] = min(prev[j - 1] + (ca != cb), prev[j] + 1, cur[j - 1] + 1)
        if min(cur) > limit:
            return limit + 1
        prev = cur
    return prev[-1]


def nearest_entry(word: str, lex: Lexicon, max_edit: int) -> str | None:
    """Closest lexicon entry within ``max_edit``; ties go to higher frequency, then alphabetical."""
    best: tuple[int, int, str] | None = None
    for entry in lex.with_length(len(word) - max_edit, len(word) + max_edit):
        d = _bounded_distance(word, entry, max_edit)
        if d > max_edit:
            continue
        key = (d, -lex.freq(entry), entry)
        if best is None or key < best:
            best = key
    return best[2] if best else None


def _highlights_for(text: str, suggestion: str | None) -> tuple[int, ...]:
    lead, core, _ = split_token(text)
    lowered = core.lower()
    basis = lowered if len(lowered) == len(core) else core
    if suggestion is None:
        local = tuple(range(len(core)))
    else:
        local = char_highlights(basis, suggestion)
    return tuple(i + len(lead) for i in local)


def check_spelling(token: str, lex: Lexicon, max_edit: int = DEFAULT_MAX_EDIT, word_id: str = "") -> ErrorFlag | None:
    """Flag ``token`` unless its normalized form is in the lexicon.

    Leading/trailing punctuation is ignored and lookup is lowercase; tokens
    with digits are never flagged.
    """
    _, core, _ = split_token(token)
    if not _checkable(core):
        return None
    key = lexicon_key(core)
    if key in lex:
        return None
    suggestion = nearest_entry(key, lex, max_edit)
    return ErrorFlag((word_id,), ErrorKind.SPELLING, suggestion, _highlights_for(token, suggestion), token)


def _best_split(key: str, lex: Lexicon) -> tuple[str, str] | None:
    best: tuple[int, int] | None = None
    for pos in range(1, len(key)):
        left, right = key[:pos], key[pos:]
        if left in lex and right in lex:
            score = lex.freq(left) + lex.freq(right)
            if best is None or score > best[0]:
                best = (score, pos)
    if best is None:
        return None
    return key[: best[1]], key[best[1] :]


def _compound_for(a: str, b: str, lex: Lexicon, max_edit: int) -> str | None:
    joined = a + b
    if joined in lex:
        return joined
    if max_edit > 0 and len(joined) >= 4:
        cand = nearest_entry(joined, lex, max_edit)
        if cand is not None and cand not in (a, b):
            return cand
    return None


def detect_segmentation_errors(
    ordered_tokens: Sequence[tuple[str, str]],
    lex: Lexicon,
    compound_max_edit: int = COMPOUND_MAX_EDIT,
) -> list[ErrorFlag]:
    """Find merged words and split compounds in reading-ordered ``(word id, text)`` tokens.

    A merged word is an out-of-lexicon token that splits into two lexicon
    entries (highest summed frequency wins).  A split compound is a pair of
    adjacent tokens, at least one out of lexicon, whose concatenation is a
    lexicon entry or, failing that, within ``compound_max_edit`` of one.
    """
    keys = []
    for _, text in ordered_tokens:
        _, core, _ = split_token(text)
        keys.append(lexicon_key(core) if _checkable(core) else None)

    flags: list[ErrorFlag] = []
    i = 0
    while i < len(ordered_tokens):
        wid, text = ordered_tokens[i]
        key = keys[i]
        if key is None:
            i += 1
            continue
        nxt = keys[i + 1] if i + 1 < len(keys) else None
        if nxt is not None and (key not in lex or nxt not in lex):
            compound = _compound_for(key, nxt, lex, compound_max_edit)
            if compound is not None:
                nid, ntext = ordered_tokens[i + 1]
                original = f"{text} {ntext}"
                flags.append(
                    ErrorFlag(
                        (wid, nid),
                        ErrorKind.SPLIT_COMPOUND,
                        compound,
                        _joined_highlights(text, ntext, compound),
                        original,
                    )
                )
                i += 2
                continue
        if key not in lex:
            split = _best_split(key, lex)
            if split is not None:
                suggestion = f"{split[0]} {split[1]}"
                flags.append(
                    ErrorFlag((wid,), ErrorKind.MERGED_WORDS, suggestion, _highlights_for(text, suggestion), text)
                )
        i += 1
    return flags


def _joined_highlights(first: str, second: str, suggestion: str) -> tuple[int, ...]:
    lead1, core1, trail1 = split_token(first)
    lead2, core2, _ = split_token(second)
    joined = f"{core1} {core2}".lower()
    if len(joined) != len(core1) + len(core2) + 1:
        joined = f"{core1} {core2}"
    out = []
    for k in char_highlights(joined, suggestion):
        if k < len(core1):
            out.append(len(lead1) + k)
        elif k == len(core1):
            out.append(len(first))  # the separating space
        else:
            out.append(len(first) + 1 + len(lead2) + k - len(core1) - 1)
    return tuple(sorted(set(out)))


def find_errors(
    ordered_tokens: Sequence[tuple[str, str]],
    lex: Lexicon,
    max_edit: int = DEFAULT_MAX_EDIT,
    compound_max_edit: int = COMPOUND_MAX_EDIT,
) -> list[ErrorFlag]:
    """Segmentation flags first; remaining out-of-lexicon tokens get spelling flags."""
    seg = detect_segmentation_errors(ordered_tokens, lex, compound_max_edit)
    covered = {wid for f in seg for wid in f.word_ids}
    position = {wid: i for i, (wid, _) in enumerate(ordered_tokens)}
    flags = list(seg)
    for wid, text in ordered_tokens:
        if wid in covered:
            continue
        flag = check_spelling(text, lex, max_edit, wid)
        if flag is not None:
            flags.append(flag)
    flags.sort(key=lambda f: position[f.word_ids[0]])
    return flags
