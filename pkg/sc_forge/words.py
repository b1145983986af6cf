"""Word algebra over symmetrized alphabets.

Words are plain ``str`` values over an internal letter encoding: generator
number ``i`` is ``chr(CODE_BASE + 2*i)`` and its formal inverse is the next
code point. Code-point order (x < x' < y < y' < ...) is the alphabet order
used for canonical forms. ``Alphabet`` translates between the encoding and
the ``x`` / ``x'`` text notation.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Optional, Sequence

from pydantic import BaseModel, ConfigDict, model_validator

from sc_forge.constants import CODE_BASE, INVERSE_MARK, MAX_GENERATORS, RESERVED_SYMBOLS
from sc_forge.errors import InputError, PresentationFormatError

logger = logging.getLogger(__name__)

Word = str
EMPTY: Word = ""

_CODE_LIMIT = CODE_BASE + 2 * MAX_GENERATORS
_INVERT_TABLE = {CODE_BASE + i: CODE_BASE + (i ^ 1) for i in range(2 * MAX_GENERATORS)}


def generator_code(index: int) -> str:
    return chr(CODE_BASE + 2 * index)


def inverse_letter(letter: str) -> str:
    return chr(ord(letter) ^ 1)


def is_inverse_letter(letter: str) -> bool:
    return (ord(letter) - CODE_BASE) & 1 == 1


def invert(w: Word) -> Word:
    """Formal inverse: reverse and invert every letter"""
    return w[::-1].translate(_INVERT_TABLE)


def _check_codes(w: Word) -> None:
    for position, letter in enumerate(w):
        if not CODE_BASE <= ord(letter) < _CODE_LIMIT:
            raise InputError(f"letter {letter!r} at position {position} is not in any alphabet")


def free_reduce(w: Word, alphabet: Optional["Alphabet"] = None) -> Word:
    """Unique reduced word freely equal to w (single stack pass)"""
    if alphabet is not None:
        alphabet.check_word(w)
    else:
        _check_codes(w)
    stack: list[str] = []
    for letter in w:
        if stack and stack[-1] == inverse_letter(letter):
            stack.pop()
        else:
            stack.append(letter)
    return "".join(stack)


def is_reduced(w: Word) -> bool:
    return all(w[i] != inverse_letter(w[i + 1]) for i in range(len(w) - 1))


def is_cyclically_reduced(w: Word) -> bool:
    if not is_reduced(w):
        return False
    return len(w) < 2 or w[0] != inverse_letter(w[-1])


def least_rotation(w: Word) -> Word:
    if not w:
        return w
    smallest = min(w)
    doubled = w + w
    n = len(w)
    return min(doubled[i:i + n] for i, letter in enumerate(w) if letter == smallest)


def distinct_rotations(w: Word) -> list[Word]:
    doubled = w + w
    n = len(w)
    return list(dict.fromkeys(doubled[i:i + n] for i in range(n)))


@dataclass(frozen=True, order=True)
class CyclicWord:
    """A cyclically reduced word up to rotation, stored by its least rotation"""

    word: Word

    @classmethod
    def of(cls, w: Word) -> "CyclicWord":
        if not is_cyclically_reduced(w):
            raise InputError("word is not cyclically reduced")
        return cls(least_rotation(w))

    def __len__(self) -> int:
        return len(self.word)

    @property
    def is_empty(self) -> bool:
        return not self.word

    def inverse(self) -> "CyclicWord":
        return CyclicWord(least_rotation(invert(self.word)))

    def rotations(self) -> list[Word]:
        return distinct_rotations(self.word)

    def closure(self) -> list[Word]:
        """Sorted distinct rotations of the word and of its inverse (r̄)"""
        return sorted(set(distinct_rotations(self.word)) | set(distinct_rotations(invert(self.word))))


def cyclic_reduce(w: Word) -> tuple[CyclicWord, Word]:
    """Split w = u c u⁻¹ with c cyclically reduced; returns (c, u)"""
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == inverse_letter(w[j - 1]):
        i += 1
        j -= 1
    core = w[i:j]
    if not core:
        logger.debug("word reduces to the empty cyclic word")
    return CyclicWord(least_rotation(core)), w[:i]


@dataclass(frozen=True)
class Occurrence:
    rotation: Word
    offset: int


def is_cyclic_subword(w: Word, r: CyclicWord) -> list[Occurrence]:
    """Every (element of r̄, offset) where w occurs; empty when w is not a cyclic subword"""
    if not w or len(w) > 2 * len(r):
        return []
    found: list[Occurrence] = []
    for rotation in r.closure():
        start = rotation.find(w)
        while start != -1:
            found.append(Occurrence(rotation, start))
            start = rotation.find(w, start + 1)
    return found


def iter_t_words(letters: Sequence[str]) -> Iterator[Word]:
    """Nonempty positive words over `letters`, by length then lexicographically"""
    ordered = sorted(letters)
    for length in itertools.count(1):
        for combo in itertools.product(ordered, repeat=length):
            yield "".join(combo)


def enumerate_t_words(letters: Sequence[str], count: int) -> list[Word]:
    if len(set(letters)) != 2:
        raise InputError("the T alphabet must consist of exactly two letters")
    if count < 1:
        raise InputError("count must be at least 1")
    return list(itertools.islice(iter_t_words(letters), count))


@lru_cache(maxsize=256)
def _symbol_table(generators: tuple[str, ...]) -> dict[str, int]:
    return {symbol: index for index, symbol in enumerate(generators)}


class Alphabet(BaseModel):
    """Ordered generators, split into the declared parts S, T and {a}"""

    model_config = ConfigDict(frozen=True)

    base: tuple[str, ...]
    t_letters: tuple[str, ...] = ()
    morse_letter: Optional[str] = None

    @model_validator(mode="after")
    def _check_symbols(self) -> "Alphabet":
        symbols = self.generators
        for symbol in symbols:
            if len(symbol) != 1 or symbol.isspace() or symbol in RESERVED_SYMBOLS:
                raise ValueError(f"invalid letter {symbol!r}: letters are single characters other than ' # :")
        if len(set(symbols)) != len(symbols):
            repeated = sorted({s for s in symbols if symbols.count(s) > 1})
            raise ValueError(f"letters declared twice: {' '.join(repeated)}")
        if len(symbols) > MAX_GENERATORS:
            raise ValueError(f"at most {MAX_GENERATORS} generators are supported")
        return self

    @property
    def generators(self) -> tuple[str, ...]:
        extra = (self.morse_letter,) if self.morse_letter else ()
        return self.base + self.t_letters + extra

    def collisions(self, t_letters: Sequence[str], morse_letter: Optional[str]) -> list[str]:
        """Symbols of the proposed T / {a} parts that clash with existing letters or each other"""
        proposed = list(t_letters) + ([morse_letter] if morse_letter else [])
        taken = set(self.generators)
        clashes = [s for s in proposed if s in taken or proposed.count(s) > 1]
        return sorted(set(clashes))

    def extend(self, t_letters: Sequence[str], morse_letter: str) -> "Alphabet":
        if self.t_letters or self.morse_letter:
            raise InputError("alphabet already carries T letters or a Morse letter")
        clashes = self.collisions(t_letters, morse_letter)
        if clashes:
            raise InputError(f"alphabet collision: {' '.join(clashes)} already used")
        return Alphabet(base=self.base, t_letters=tuple(t_letters), morse_letter=morse_letter)

    def code(self, symbol: str, inverse: bool = False) -> str:
        table = _symbol_table(self.generators)
        if symbol not in table:
            raise InputError(f"letter {symbol!r} is not in the alphabet")
        letter = generator_code(table[symbol])
        return inverse_letter(letter) if inverse else letter

    def codes(self, symbols: Iterable[str]) -> tuple[str, ...]:
        return tuple(self.code(s) for s in symbols)

    @property
    def base_codes(self) -> tuple[str, ...]:
        return self.codes(self.base)

    @property
    def t_codes(self) -> tuple[str, ...]:
        return self.codes(self.t_letters)

    @property
    def morse_code(self) -> Optional[str]:
        return self.code(self.morse_letter) if self.morse_letter else None

    def check_word(self, w: Word) -> None:
        limit = CODE_BASE + 2 * len(self.generators)
        for position, letter in enumerate(w):
            if not CODE_BASE <= ord(letter) < limit:
                raise InputError(f"letter at position {position} is not in the alphabet")

    def parse_letters(self, text: str, line: int = 1, source: Optional[str] = None) -> list[tuple[str, int]]:
        """(code, 1-based column) pairs for text in the X / X' notation"""
        table = _symbol_table(self.generators)
        letters: list[tuple[str, int]] = []
        for column, char in enumerate(text, start=1):
            if char.isspace():
                continue
            if char == INVERSE_MARK:
                if not letters or letters[-1][1] != column - 1 or is_inverse_letter(letters[-1][0]):
                    raise PresentationFormatError("inverse mark must follow a letter", line, column, source)
                code, start = letters[-1]
                letters[-1] = (inverse_letter(code), start)
                continue
            if char not in table:
                raise PresentationFormatError(f"letter {char!r} is not in the alphabet", line, column, source)
            letters.append((generator_code(table[char]), column))
        return letters

    def parse_word(self, text: str, line: int = 1, source: Optional[str] = None) -> Word:
        return "".join(code for code, _ in self.parse_letters(text, line, source))

    def format_word(self, w: Word) -> str:
        generators = self.generators
        parts = []
        for letter in w:
            offset = ord(letter) - CODE_BASE
            parts.append(generators[offset >> 1] + (INVERSE_MARK if offset & 1 else ""))
        return "".join(parts)


@dataclass(frozen=True)
class Presentation:
    """⟨S | R⟩ with R stored canonically: sorted by (length, least rotation)"""

    alphabet: Alphabet
    relators: tuple[CyclicWord, ...]

    @classmethod
    def build(cls, alphabet: Alphabet, words: Iterable[Word]) -> "Presentation":
        seen: set[CyclicWord] = set()
        for w in words:
            alphabet.check_word(w)
            relator = CyclicWord.of(w)
            if relator.is_empty:
                raise InputError("empty relator")
            if relator in seen:
                logger.warning("dropping duplicate relator %s", alphabet.format_word(relator.word))
            seen.add(relator)
        return cls(alphabet, tuple(sorted(seen, key=lambda r: (len(r), r.word))))

    def with_relators(self, words: Iterable[Word], alphabet: Optional[Alphabet] = None) -> "Presentation":
        return Presentation.build(alphabet or self.alphabet, [r.word for r in self.relators] + list(words))

    @cached_property
    def symmetrized(self) -> frozenset[Word]:
        closure: set[Word] = set()
        for r in self.relators:
            closure.update(r.closure())
        return frozenset(closure)

    @property
    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)

    def show(self, w: Word) -> str:
        return self.alphabet.format_word(w)


def symmetrize(presentation: Presentation) -> frozenset[Word]:
    """R̄: all rotations of all relators and of their inverses"""
    return presentation.symmetrized
