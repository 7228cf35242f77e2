"""Words and alphabets.

A word is a tuple of symbol strings; the empty tuple is the empty word.
Symbols may be several characters long, so a plain string is accepted as
a word only when each of its characters is a symbol on its own.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InputError

Word = tuple[str, ...]

EPSILON: Word = ()


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct symbols.

    The order of `symbols` is total and fixed; it defines the
    length-lexicographic order on words used throughout the package.
    """

    symbols: tuple[str, ...]

    def __post_init__(self):
        if len(self.symbols) == 0:
            raise InputError("alphabet must contain at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise InputError("alphabet symbols must be distinct")
        for s in self.symbols:
            if not isinstance(s, str) or not s or any(c.isspace() for c in s):
                raise InputError(f"bad symbol {s!r}: symbols are nonempty strings without whitespace")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise InputError(f"symbol {symbol!r} not in alphabet {self.symbols}") from None

    def word(self, w: Iterable[str] | str) -> Word:
        """Canonicalize `w` into a validated tuple of symbols."""
        if isinstance(w, str):
            w = tuple(w)
        else:
            w = tuple(w)
        for s in w:
            if s not in self._index:
                raise InputError(f"symbol {s!r} not in alphabet {self.symbols}")
        return w

    def lenlex_key(self, w: Word) -> tuple:
        """Sort key realizing the length-lexicographic order."""
        return (len(w), tuple(self._index[s] for s in w))

    def words_of_length(self, k: int) -> Iterator[Word]:
        if k == 0:
            yield EPSILON
            return
        for prefix in self.words_of_length(k - 1):
            for s in self.symbols:
                yield prefix + (s,)

    def words_upto(self, k: int) -> Iterator[Word]:
        """All words of length ≤ k in length-lexicographic order."""
        for length in range(k + 1):
            yield from self.words_of_length(length)


def format_word(w: Word) -> str:
    """Render a word for the one-word-per-line sample format (ε → '')."""
    return " ".join(w)


def parse_word(line: str) -> Word:
    """Inverse of format_word; symbols are whitespace-separated."""
    return tuple(line.split())
