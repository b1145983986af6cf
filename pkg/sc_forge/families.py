"""Shipped base presentations."""

from __future__ import annotations

import logging
from pathlib import Path

from sc_forge.constants import DATA_PATH
from sc_forge.errors import InputError
from sc_forge.words import Alphabet, Presentation

logger = logging.getLogger(__name__)


def shipped_data_dir() -> Path:
    """Directory of the shipped presentation, graph and cycle files"""
    return Path(__file__).resolve().parent.parent / DATA_PATH


def surface_genus2() -> Presentation:
    """⟨a, b, c, d | [a, b][c, d]⟩"""
    alphabet = Alphabet(base=("a", "b", "c", "d"))
    return Presentation.build(alphabet, [alphabet.parse_word("a b a' b' c d c' d'")])


def staircase_relator(n: int, alphabet: Alphabet) -> str:
    """x y x y² … x yⁿ over the first two letters of the alphabet"""
    x, y = alphabet.base[:2]
    return alphabet.parse_word("".join(x + y * k for k in range(1, n + 1)))


def staircase_family(n_max: int, n_min: int = 1) -> Presentation:
    if not 1 <= n_min <= n_max:
        raise InputError("staircase family needs 1 ≤ n_min ≤ n_max")
    alphabet = Alphabet(base=("x", "y"))
    return Presentation.build(alphabet, [staircase_relator(n, alphabet) for n in range(n_min, n_max + 1)])


def codeword(j: int, width: int, zero: str, one: str) -> str:
    return "".join(one if (j >> bit) & 1 else zero for bit in range(width - 1, -1, -1))


def codeword_family(width: int = 7, first_blocks: int = 13, count: int = 7) -> Presentation:
    """Relator k is x c_j x c_{j+1} … with first_blocks + k blocks.

    c_j spells j in binary over {y, z}, most significant bit first; the
    block counter runs on across relators, so no codeword is used twice.
    """
    total = sum(first_blocks + k for k in range(count))
    if total > 1 << width:
        raise InputError(f"{total} blocks need more than {width}-bit codewords")
    alphabet = Alphabet(base=("x", "y", "z"))
    relators = []
    j = 0
    for k in range(count):
        blocks = []
        for _ in range(first_blocks + k):
            blocks.append("x" + codeword(j, width, "y", "z"))
            j += 1
        relators.append(alphabet.parse_word("".join(blocks)))
    logger.debug("codeword family: %d relators, %d blocks", count, total)
    return Presentation.build(alphabet, relators)
