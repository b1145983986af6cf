"""Text formats: presentations, edge lists and cycle files."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from sc_forge.constants import (
    COMMENT_MARK,
    HEADER_ALPHABET,
    HEADER_MORSE_LETTER,
    HEADER_T_ALPHABET,
)
from sc_forge.errors import PresentationFormatError
from sc_forge.words import Alphabet, CyclicWord, Presentation, inverse_letter

logger = logging.getLogger(__name__)

_HEADERS = (HEADER_ALPHABET, HEADER_T_ALPHABET, HEADER_MORSE_LETTER)


def _strip_comment(line: str) -> str:
    return line.split(COMMENT_MARK, 1)[0]


def parse_presentation(text: str, source: Optional[str] = None) -> Presentation:
    headers: dict[str, tuple[tuple[str, ...], int]] = {}
    relator_lines: list[tuple[int, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            key = key.strip().lower()
            if key not in _HEADERS:
                raise PresentationFormatError(f"unknown header {key!r}", lineno, 1, source)
            if key in headers:
                raise PresentationFormatError(f"header {key!r} given twice", lineno, 1, source)
            if relator_lines:
                raise PresentationFormatError("headers must precede relators", lineno, 1, source)
            headers[key] = (tuple(value.split()), lineno)
        else:
            relator_lines.append((lineno, line))

    if HEADER_ALPHABET not in headers:
        raise PresentationFormatError("missing 'alphabet:' header", 1, 1, source)
    morse = headers.get(HEADER_MORSE_LETTER)
    if morse is not None and len(morse[0]) != 1:
        raise PresentationFormatError("morse-letter takes exactly one letter", morse[1], 1, source)

    try:
        alphabet = Alphabet(
            base=headers[HEADER_ALPHABET][0],
            t_letters=headers.get(HEADER_T_ALPHABET, ((), 0))[0],
            morse_letter=morse[0][0] if morse else None,
        )
    except ValidationError as exc:
        line = max(lineno for _, lineno in headers.values())
        raise PresentationFormatError(exc.errors()[0]["msg"], line, 1, source) from exc

    words = []
    seen: set[CyclicWord] = set()
    for lineno, line in relator_lines:
        letters = alphabet.parse_letters(line, lineno, source)
        if not letters:
            continue
        for (left, _), (right, column) in zip(letters, letters[1:]):
            if right == inverse_letter(left):
                raise PresentationFormatError("relator is not freely reduced", lineno, column, source)
        if len(letters) > 1 and letters[0][0] == inverse_letter(letters[-1][0]):
            raise PresentationFormatError("relator is not cyclically reduced", lineno, letters[-1][1], source)
        word = "".join(code for code, _ in letters)
        relator = CyclicWord.of(word)
        if relator in seen:
            logger.warning("%s:%d: duplicate relator dropped", source or "<input>", lineno)
            continue
        seen.add(relator)
        words.append(word)
    return Presentation.build(alphabet, words)


def dump_presentation(presentation: Presentation) -> str:
    alphabet = presentation.alphabet
    lines = [f"{HEADER_ALPHABET}: {' '.join(alphabet.base)}"]
    if alphabet.t_letters:
        lines.append(f"{HEADER_T_ALPHABET}: {' '.join(alphabet.t_letters)}")
    if alphabet.morse_letter:
        lines.append(f"{HEADER_MORSE_LETTER}: {alphabet.morse_letter}")
    lines.extend(alphabet.format_word(r.word) for r in presentation.relators)
    return "\n".join(lines) + "\n"


def load_presentation(path: str | Path) -> Presentation:
    path = Path(path)
    return parse_presentation(path.read_text(encoding="utf-8"), source=str(path))


def parse_edges(text: str, source: Optional[str] = None) -> list[tuple[str, str]]:
    """Edge list, one `u v` pair per line"""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = _strip_comment(raw).split()
        if not tokens:
            continue
        if len(tokens) != 2:
            raise PresentationFormatError("expected exactly two vertex labels", lineno, 1, source)
        edges.append((tokens[0], tokens[1]))
    if not edges:
        raise PresentationFormatError("graph has no edges", 1, 1, source)
    return edges


def parse_cycle(text: str, source: Optional[str] = None) -> list[str]:
    labels = _strip_comment_all(text).split()
    if not labels:
        raise PresentationFormatError("cycle has no vertices", 1, 1, source)
    return labels


def _strip_comment_all(text: str) -> str:
    return "\n".join(_strip_comment(line) for line in text.splitlines())
