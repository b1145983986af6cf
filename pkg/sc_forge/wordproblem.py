"""Dehn reduction for C'(1/6) presentations and a bounded breadth-first identity oracle."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from sc_forge.config import get_settings
from sc_forge.errors import InputError, InternalInvariantError, PreconditionError
from sc_forge.pieces import PieceTable, check_c_prime
from sc_forge.words import Presentation, Word, free_reduce, invert

logger = logging.getLogger(__name__)

DEHN_LAMBDA = Fraction(1, 6)

IDENTITY = "identity"
NOT_IDENTITY = "not-identity-within-radius"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DehnStep:
    position: int
    relator: Word
    replaced: int
    replacement: int


@dataclass
class DehnTrace:
    steps: list[DehnStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)


def _elements_by_letter(presentation: Presentation) -> dict[str, list[Word]]:
    table: dict[str, list[Word]] = {}
    for element in sorted(presentation.symmetrized):
        table.setdefault(element[0], []).append(element)
    return table


def _match_length(w: Word, start: int, element: Word) -> int:
    limit = min(len(w) - start, len(element))
    k = 0
    while k < limit and w[start + k] == element[k]:
        k += 1
    return k


def _leftmost_longest(w: Word, elements: dict[str, list[Word]]) -> Optional[tuple[int, int, Word]]:
    for start, letter in enumerate(w):
        best: Optional[tuple[int, Word]] = None
        for element in elements.get(letter, ()):
            k = _match_length(w, start, element)
            if 2 * k > len(element) and (best is None or k > best[0]):
                best = (k, element)
        if best is not None:
            return start, best[0], best[1]
    return None


def dehn_reduce(
    w: Word, presentation: Presentation, table: Optional[PieceTable] = None, checked: bool = False
) -> tuple[Word, DehnTrace]:
    """Shorten w by replacing more than half of a relator with the inverse of the rest.

    The terminal word is empty iff w is trivial in the group. Refuses
    presentations that are not C'(1/6).
    """
    if not checked and not check_c_prime(presentation, DEHN_LAMBDA, table).passed:
        raise PreconditionError("Dehn reduction needs a C'(1/6) presentation")
    elements = _elements_by_letter(presentation)
    trace = DehnTrace()
    current = free_reduce(w, presentation.alphabet)
    while True:
        found = _leftmost_longest(current, elements)
        if found is None:
            break
        start, k, element = found
        replacement = invert(element[k:])
        reduced = free_reduce(current[:start] + replacement + current[start + k:])
        if len(reduced) >= len(current):
            raise InternalInvariantError("Dehn step did not shorten the word")
        trace.steps.append(DehnStep(start, element, k, len(replacement)))
        current = reduced
    logger.debug("Dehn reduction finished after %d steps", len(trace))
    return current, trace


@dataclass(frozen=True)
class BfsResult:
    verdict: str
    explored: int
    cap: int


def is_identity_bfs(w: Word, presentation: Presentation, radius: int, cap: Optional[int] = None) -> BfsResult:
    """Breadth-first rewriting closure of w among reduced words of length ≤ radius.

    A move replaces an occurrence of a prefix of some r ∈ R̄ by the inverse of
    the remaining suffix (k = 0 inserts a whole relator), then reduces freely.
    """
    start = free_reduce(w, presentation.alphabet)
    if radius < len(start):
        raise InputError(f"radius {radius} is shorter than the word ({len(start)})")
    cap = cap or get_settings().bfs_cap
    elements = sorted(presentation.symmetrized)
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if not u:
            return BfsResult(IDENTITY, len(seen), cap)
        for i in range(len(u) + 1):
            for element in elements:
                k_max = _match_length(u, i, element)
                for k in range(k_max + 1):
                    candidate = free_reduce(u[:i] + invert(element[k:]) + u[i + k:])
                    if not candidate:
                        return BfsResult(IDENTITY, len(seen) + 1, cap)
                    if len(candidate) > radius or candidate in seen:
                        continue
                    if len(seen) >= cap:
                        logger.warning("BFS identity oracle hit its state cap (%d)", cap)
                        return BfsResult(INCONCLUSIVE, len(seen), cap)
                    seen.add(candidate)
                    queue.append(candidate)
    return BfsResult(NOT_IDENTITY, len(seen), cap)


def identity_ball(presentation: Presentation, radius: int, cap: Optional[int] = None) -> frozenset[Word]:
    """All reduced words of length ≤ radius reachable from ε by the moves of is_identity_bfs"""
    cap = cap or get_settings().bfs_cap
    elements = sorted(presentation.symmetrized)
    seen = {""}
    queue = deque([""])
    while queue:
        u = queue.popleft()
        for i in range(len(u) + 1):
            for element in elements:
                for k in range(_match_length(u, i, element) + 1):
                    candidate = free_reduce(u[:i] + invert(element[k:]) + u[i + k:])
                    if len(candidate) > radius or candidate in seen:
                        continue
                    if len(seen) >= cap:
                        raise InputError(f"identity ball of radius {radius} exceeds {cap} words")
                    seen.add(candidate)
                    queue.append(candidate)
    return frozenset(seen)
