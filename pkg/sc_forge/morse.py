"""Intersection functions of paths and the Morse criteria built on them.

ρ(t) is the longest word that is a subword of the path label and of some
element of R̄ whose relator has length at most t. Labels are finite; a
periodic label is truncated once every subword of length ≤ tMax has
appeared.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from sc_forge.constants import CERT_PROBE
from sc_forge.errors import InputError
from sc_forge.parallel import ordered_map
from sc_forge.pieces import FAIL, PASS
from sc_forge.suffix import SuffixAutomaton
from sc_forge.words import Alphabet, Presentation, Word, invert, is_cyclically_reduced, is_reduced

logger = logging.getLogger(__name__)

PERIODIC_PREFIX = "periodic:"
PROBE_SCALES = 3
MIN_PROBE_TMAX = 100


def periodic_path(period: Word, t_max: int) -> Word:
    """Prefix of period^∞ long enough to contain every subword of length ≤ t_max"""
    if not period:
        raise InputError("periodic path needs a nonempty period")
    if not is_cyclically_reduced(period):
        raise InputError("periodic path period must be cyclically reduced")
    length = t_max + len(period)
    return (period * (length // len(period) + 1))[:length]


def parse_path(text: str, alphabet: Alphabet, t_max: int) -> Word:
    """`x y x'` letters, or `periodic:<letters>`"""
    text = text.strip()
    if text.startswith(PERIODIC_PREFIX):
        return periodic_path(alphabet.parse_word(text[len(PERIODIC_PREFIX):]), t_max)
    path = alphabet.parse_word(text)
    if not is_reduced(path):
        raise InputError("path label must be reduced")
    return path


@dataclass(frozen=True)
class RhoWitness:
    relator: int
    subword: Word


@dataclass(frozen=True)
class IntersectionTable:
    t_max: int
    values: tuple[int, ...]
    witnesses: tuple[Optional[RhoWitness], ...]
    relator_overlaps: tuple[int, ...]

    def rho(self, t: int) -> int:
        if not 1 <= t <= self.t_max:
            raise InputError(f"t={t} outside [1, {self.t_max}]")
        return self.values[t - 1]

    def witness(self, t: int) -> Optional[RhoWitness]:
        return self.witnesses[t - 1]


def _cumulative(presentation: Presentation, overlaps: list[tuple[int, Word]], t_max: int) -> IntersectionTable:
    best = 0
    best_witness: Optional[RhoWitness] = None
    values: list[int] = []
    witnesses: list[Optional[RhoWitness]] = []
    # relators are sorted by length
    order = iter(enumerate(presentation.relators))
    pending = next(order, None)
    for t in range(1, t_max + 1):
        while pending is not None and len(pending[1]) <= t:
            index, _ = pending
            length, subword = overlaps[index]
            if length > best:
                best, best_witness = length, RhoWitness(index, subword)
            pending = next(order, None)
        values.append(best)
        witnesses.append(best_witness)
    return IntersectionTable(t_max, tuple(values), tuple(witnesses), tuple(m for m, _ in overlaps))


def intersection_function(path: Word, presentation: Presentation, t_max: int) -> IntersectionTable:
    if t_max < 1:
        raise InputError("tMax must be at least 1")
    if not is_reduced(path):
        raise InputError("path label must be reduced")
    automaton = SuffixAutomaton([path])

    def overlap(relator_word: Word) -> tuple[int, Word]:
        n = len(relator_word)
        best = (0, "")
        for element in (relator_word, invert(relator_word)):
            doubled = element * 2
            match = automaton.longest_common_substring(doubled, cap=n)
            if match.length > best[0]:
                best = (match.length, doubled[match.end - match.length:match.end])
        return best

    relevant = [r.word for r in presentation.relators]
    overlaps = ordered_map(overlap, relevant)
    table = _cumulative(presentation, overlaps, t_max)
    logger.debug("intersection function computed up to t=%d", t_max)
    return table


def common_substring_oracle(path: Word, presentation: Presentation, t_max: int) -> IntersectionTable:
    """ρ by checking every subword of every element of R̄ against the path"""
    overlaps: list[tuple[int, Word]] = []
    for relator in presentation.relators:
        best = (0, "")
        for element in relator.closure():
            for start in range(len(element)):
                for stop in range(start + best[0] + 1, len(element) + 1):
                    if element[start:stop] not in path:
                        break
                    best = (stop - start, element[start:stop])
        overlaps.append(best)
    return _cumulative(presentation, overlaps, t_max)


@dataclass
class GeodesicVerdict:
    verdict: str
    violations: list[int]

    @property
    def first_failure(self) -> Optional[int]:
        return self.violations[0] if self.violations else None


def check_geodesic_criterion(table: IntersectionTable) -> GeodesicVerdict:
    """PASS iff ρ(t) ≤ t/3 for every t ≤ tMax"""
    violations = [t for t in range(1, table.t_max + 1) if 3 * table.values[t - 1] > t]
    return GeodesicVerdict(FAIL if violations else PASS, violations)


@dataclass(frozen=True)
class ScaleMaximum:
    exponent: int
    start: int
    stop: int
    ratio: Fraction


@dataclass
class SublinearityReport:
    consistent: bool
    scales: list[ScaleMaximum]
    max_ratio: Fraction
    max_ratio_at: int
    growth_exponent: Optional[float]
    certificate: str = CERT_PROBE
    note: str = "finite-scale probe of ρ(t)/t over dyadic scales; not a proof of sublinearity"

    @property
    def verdict(self) -> str:
        return "consistent-with-sublinear" if self.consistent else "not-consistent"


def sublinearity_probe(table: IntersectionTable) -> SublinearityReport:
    """Dyadic-scale envelope of ρ(t)/t.

    Consistent when the per-scale maximum strictly decreases across the top
    PROBE_SCALES scales, or is zero on all of them. A flat nonzero ratio, as
    for ρ(t) = ⌊t/2⌋, is not consistent.
    """
    if table.t_max < MIN_PROBE_TMAX:
        raise InputError(f"sublinearity probe needs tMax ≥ {MIN_PROBE_TMAX}")
    scales: list[ScaleMaximum] = []
    k = 0
    while (1 << k) <= table.t_max:
        start, stop = 1 << k, min((1 << (k + 1)) - 1, table.t_max)
        ratio = max(Fraction(table.values[t - 1], t) for t in range(start, stop + 1))
        scales.append(ScaleMaximum(k, start, stop, ratio))
        k += 1

    dyadic = [(Fraction(table.values[(1 << j) - 1], 1 << j), 1 << j) for j in range(len(scales))]
    max_ratio, max_at = max(dyadic, key=lambda item: (item[0], -item[1]))

    top = scales[-PROBE_SCALES:]
    consistent = all(
        later.ratio < earlier.ratio or (later.ratio == 0 and earlier.ratio == 0)
        for earlier, later in zip(top, top[1:])
    )

    points = [(j, table.values[(1 << j) - 1]) for j in range(len(scales)) if table.values[(1 << j) - 1] > 0]
    growth = None
    if len(points) >= 2:
        xs = np.array([j for j, _ in points], dtype=float)
        ys = np.log2(np.array([v for _, v in points], dtype=float))
        growth = float(np.polyfit(xs, ys, 1)[0])
        if math.isnan(growth):
            growth = None
    return SublinearityReport(consistent, scales, max_ratio, max_at, growth)
