from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..docmodel import IngestWarning
from ..errors import InvalidArgumentError, ParseError


def lexicon_key(text: str) -> str:
    return unicodedata.normalize("NFC", text).strip().lower()


@dataclass(frozen=True)
class Lexicon:
    """Immutable word list with optional frequencies (missing frequency counts as 0)."""

    entries: frozenset[str]
    frequency: Mapping[str, int] = field(default_factory=dict)
    _by_length: Mapping[int, tuple[str, ...]] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.entries:
            raise InvalidArgumentError("lexicon is empty")
        buckets: dict[int, list[str]] = {}
        for e in sorted(self.entries):
            buckets.setdefault(len(e), []).append(e)
        object.__setattr__(self, "_by_length", {k: tuple(v) for k, v in buckets.items()})

    @classmethod
    def from_words(cls, words: Iterable[str], frequency: Mapping[str, int] | None = None) -> Lexicon:
        entries = frozenset(lexicon_key(w) for w in words if lexicon_key(w))
        freq = {lexicon_key(k): v for k, v in (frequency or {}).items()}
        return cls(entries, freq)

    def __contains__(self, word: object) -> bool:
        return isinstance(word, str) and word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def freq(self, word: str) -> int:
        return self.frequency.get(word, 0)

    def with_length(self, lo: int, hi: int) -> Iterable[str]:
        for n in range(max(lo, 0), hi + 1):
            yield from self._by_length.get(n, ())


def load_lexicon(data: bytes | str, warnings: list[IngestWarning] | None = None, source: str = "lexicon") -> Lexicon:
    """Read a UTF-8 word list: one entry per line, optionally ``word<TAB>count``.

    Duplicate entries collapse to one, keeping the highest frequency.
    """
    sink = warnings if warnings is not None else []
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    entries: set[str] = set()
    freq: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        word, _, count = raw.partition("\t")
        key = lexicon_key(word)
        if not key:
            continue
        entries.add(key)
        count = count.strip()
        if not count:
            continue
        try:
            value = int(count)
            if value < 0:
                raise ValueError(count)
        except ValueError:
            sink.append(IngestWarning(source, f"malformed frequency {count!r}, ignored", str(lineno)))
            continue
        freq[key] = max(freq.get(key, value), value)
    if not entries:
        raise ParseError("lexicon file has no entries")
    return Lexicon(frozenset(entries), freq)
