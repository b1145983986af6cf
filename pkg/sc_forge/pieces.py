"""Pieces of a presentation and the C'(λ), C'(1/f) and pair conditions.

The symmetrized set R̄ is never materialized. Each element is a window of a
doubled relator (or doubled inverse); elements are sorted by a short key,
ties refined by the full word. In sorted order the longest piece that is a
prefix of an element is its longest common prefix with either neighbour.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from sc_forge.constants import PIECE_KEY_WIDTH
from sc_forge.errors import InputError
from sc_forge.functions import FunctionSpec
from sc_forge.parallel import ordered_map
from sc_forge.suffix import SuffixAutomaton
from sc_forge.words import Presentation, Word, invert

logger = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"


def common_prefix_length(a: str, b: str) -> int:
    lo, hi = 0, min(len(a), len(b))
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if a[:mid] == b[:mid]:
            lo = mid
        else:
            hi = mid - 1
    return lo


@dataclass(frozen=True)
class SymmetrizedEntry:
    """One distinct element of R̄: sources[source][offset:offset + length]"""

    source: int
    offset: int
    length: int
    owners: tuple[int, ...]

    @property
    def relator(self) -> int:
        return self.owners[0]

    @property
    def inverted(self) -> bool:
        return self.source & 1 == 1


@dataclass(frozen=True)
class PieceWitness:
    """`piece` is a common prefix of the distinct elements `element` and `partner`"""

    piece: Word
    element: Word
    partner: Word
    relator: int
    partner_relator: int

    @property
    def length(self) -> int:
        return len(self.piece)


@dataclass(frozen=True)
class PieceTable:
    presentation: Presentation
    sources: tuple[str, ...]
    entries: tuple[SymmetrizedEntry, ...]
    adjacent_lcp: tuple[int, ...]
    longest: tuple[int, ...]
    partner: tuple[Optional[int], ...]
    max_piece: tuple[int, ...]
    max_position: tuple[Optional[int], ...] = field(repr=False)

    def word(self, position: int) -> Word:
        entry = self.entries[position]
        return self.sources[entry.source][entry.offset:entry.offset + entry.length]

    def witness(self, position: int, length: Optional[int] = None) -> Optional[PieceWitness]:
        other = self.partner[position]
        if other is None:
            return None
        length = self.longest[position] if length is None else length
        element = self.word(position)
        return PieceWitness(
            piece=element[:length],
            element=element,
            partner=self.word(other),
            relator=self.entries[position].relator,
            partner_relator=self.entries[other].relator,
        )

    def max_piece_len(self, relator: int) -> int:
        return self.max_piece[relator]

    def relator_witness(self, relator: int) -> Optional[PieceWitness]:
        position = self.max_position[relator]
        return None if position is None else self.witness(position)

    def maximal_pieces(self) -> list[PieceWitness]:
        """Longest piece at every element of R̄ that has one"""
        return [self.witness(i) for i in range(len(self.entries)) if self.longest[i] > 0]

    def positions_of(self, relator: int) -> list[int]:
        return [i for i, entry in enumerate(self.entries) if relator in entry.owners]


def _sources(presentation: Presentation) -> list[str]:
    doubled = []
    for relator in presentation.relators:
        doubled.append(relator.word * 2)
        doubled.append(invert(relator.word) * 2)
    return doubled


def _sorted_entries(sources: Sequence[str], lengths: Sequence[int]) -> list[SymmetrizedEntry]:
    width = PIECE_KEY_WIDTH
    raw = [(s, offset) for s in range(len(sources)) for offset in range(lengths[s >> 1])]

    def key(item: tuple[int, int]) -> str:
        s, offset = item
        return sources[s][offset:offset + min(width, lengths[s >> 1])]

    def full(item: tuple[int, int]) -> str:
        s, offset = item
        return sources[s][offset:offset + lengths[s >> 1]]

    raw.sort(key=key)
    ordered: list[tuple[int, int]] = []
    start = 0
    while start < len(raw):
        stop = start + 1
        head = key(raw[start])
        while stop < len(raw) and key(raw[stop]) == head:
            stop += 1
        group = raw[start:stop]
        if len(group) > 1:
            group.sort(key=full)
        ordered.extend(group)
        start = stop

    entries: list[SymmetrizedEntry] = []
    previous: Optional[str] = None
    for s, offset in ordered:
        word = full((s, offset))
        relator = s >> 1
        if word == previous:
            last = entries[-1]
            if relator not in last.owners:
                entries[-1] = SymmetrizedEntry(last.source, last.offset, last.length, last.owners + (relator,))
            continue
        entries.append(SymmetrizedEntry(s, offset, lengths[relator], (relator,)))
        previous = word
    return entries


def enumerate_pieces(presentation: Presentation) -> PieceTable:
    """Exact longest-piece data for every element of R̄ and every relator"""
    lengths = [len(r) for r in presentation.relators]
    sources = _sources(presentation)
    entries = _sorted_entries(sources, lengths)

    def word(entry: SymmetrizedEntry) -> str:
        return sources[entry.source][entry.offset:entry.offset + entry.length]

    adjacent = [common_prefix_length(word(a), word(b)) for a, b in zip(entries, entries[1:])]

    longest: list[int] = []
    partner: list[Optional[int]] = []
    for i in range(len(entries)):
        before = adjacent[i - 1] if i > 0 else -1
        after = adjacent[i] if i < len(adjacent) else -1
        if before < 0 and after < 0:
            longest.append(0)
            partner.append(None)
        elif before >= after:
            longest.append(before)
            partner.append(i - 1)
        else:
            longest.append(after)
            partner.append(i + 1)

    max_piece = [0] * len(lengths)
    max_position: list[Optional[int]] = [None] * len(lengths)
    for i, entry in enumerate(entries):
        for owner in entry.owners:
            if longest[i] > max_piece[owner]:
                max_piece[owner] = longest[i]
                max_position[owner] = i

    logger.debug("enumerated pieces over %d symmetrized words", len(entries))
    return PieceTable(
        presentation=presentation,
        sources=tuple(sources),
        entries=tuple(entries),
        adjacent_lcp=tuple(adjacent),
        longest=tuple(longest),
        partner=tuple(partner),
        max_piece=tuple(max_piece),
        max_position=tuple(max_position),
    )


def nearest_class_pieces(table: PieceTable, classify: Callable[[int], int]) -> list[dict[int, tuple[int, int]]]:
    """For each element, the longest piece shared with an element of each relator class.

    `classify` maps a relator index to a class label. Result entries map a
    class to (piece length, partner position); classes with no other
    element are absent.
    """
    count = len(table.entries)
    classes = [classify(entry.relator) for entry in table.entries]
    result: list[dict[int, tuple[int, int]]] = [{} for _ in range(count)]

    def sweep(order: range, step: int) -> None:
        running: dict[int, tuple[int, int]] = {}
        for i in order:
            if running:
                lcp = table.adjacent_lcp[i - 1] if step > 0 else table.adjacent_lcp[i]
                running = {c: (min(length, lcp), where) for c, (length, where) in running.items()}
                for c, (length, where) in running.items():
                    if c not in result[i] or length > result[i][c][0]:
                        result[i][c] = (length, where)
            running[classes[i]] = (math.inf, i)

    sweep(range(count), 1)
    sweep(range(count - 1, -1, -1), -1)
    for row in result:
        for c, (length, where) in list(row.items()):
            row[c] = (int(length), where)
    return result


@dataclass
class RelatorRow:
    relator: Word
    length: int
    max_piece: int
    bound: Fraction


@dataclass
class CPrimeVerdict:
    verdict: str
    rows: list[RelatorRow]
    violations: list[PieceWitness]

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def _grade(table: PieceTable, bound: Callable[[int], Fraction]) -> CPrimeVerdict:
    rows = []
    for index, relator in enumerate(table.presentation.relators):
        rows.append(RelatorRow(relator.word, len(relator), table.max_piece[index], bound(len(relator))))
    violations = [
        table.witness(i)
        for i, entry in enumerate(table.entries)
        if table.longest[i] > 0 and table.longest[i] >= bound(entry.length)
    ]
    return CPrimeVerdict(FAIL if violations else PASS, rows, violations)


def check_c_prime(presentation: Presentation, lam: Fraction, table: Optional[PieceTable] = None) -> CPrimeVerdict:
    """PASS iff every piece p of every r ∈ R̄ has |p| < λ|r|"""
    lam = Fraction(lam)
    if lam <= 0:
        raise InputError("λ must be positive")
    table = table or enumerate_pieces(presentation)
    return _grade(table, lambda n: lam * n)


def _require_viable(f: FunctionSpec) -> None:
    if not f.viable:
        raise InputError(f"function {f.describe()} is not flagged viable")


def check_c_prime_f(presentation: Presentation, f: FunctionSpec, table: Optional[PieceTable] = None) -> CPrimeVerdict:
    """PASS iff every piece p of every relator r has |p| < |r|/f(|r|)"""
    _require_viable(f)
    table = table or enumerate_pieces(presentation)
    return _grade(table, lambda n: Fraction(n) / f.value(n))


def check_pair_condition(
    x: Word, presentation: Presentation, f: FunctionSpec, table: Optional[PieceTable] = None
) -> CPrimeVerdict:
    """PASS iff every piece that is a subword of x and of some r ∈ R̄ has |p| < |r|/f(|r|)"""
    table = table or enumerate_pieces(presentation)
    rows = [
        RelatorRow(r.word, len(r), table.max_piece[i], Fraction(len(r)) / f.value(len(r)))
        for i, r in enumerate(presentation.relators)
    ]
    if not x:
        return CPrimeVerdict(PASS, rows, [])
    automaton = SuffixAutomaton([x])
    violations = []
    for i, entry in enumerate(table.entries):
        if table.longest[i] == 0:
            continue
        bound = Fraction(entry.length) / f.value(entry.length)
        if table.longest[i] < bound:
            continue
        prefix = table.word(i)[:table.longest[i]]
        state, matched = 0, 0
        for letter in prefix:
            state = automaton.trans[state].get(letter)
            if state is None:
                break
            matched += 1
        if matched >= bound:
            violations.append(table.witness(i, matched))
    return CPrimeVerdict(FAIL if violations else PASS, rows, violations)


def all_pairs_piece_oracle(presentation: Presentation) -> list[int]:
    """Per-relator longest piece by comparing every pair of distinct elements of R̄"""
    owners: dict[Word, set[int]] = {}
    for index, relator in enumerate(presentation.relators):
        for element in relator.closure():
            owners.setdefault(element, set()).add(index)
    elements = sorted(owners)

    def scan(index: int) -> int:
        best = 0
        for element in elements:
            if index not in owners[element]:
                continue
            for other in elements:
                if other == element:
                    continue
                shared = 0
                while shared < min(len(element), len(other)) and element[shared] == other[shared]:
                    shared += 1
                best = max(best, shared)
        return best

    return ordered_map(scan, range(len(presentation.relators)))
