"""Relator synthesis G' = ⟨S ∪ T ∪ {a} | R ∪ C⟩ and its verification.

For every selected base relator r and every window subword w of r the
construction adds

    c_w = a^k · w u_{i+1} · w u_{i+2} · … · w u_{i+M},     k = ⌈f(|r|)⌉,

where u_1, u_2, … is the global stream of positive words over T. The
verifiers grade every inequality the correctness argument needs, with
exact integer or rational arithmetic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from sc_forge.constants import DEFAULT_MORSE_LETTER, DEFAULT_T_LETTERS, PARAM_FLOOR
from sc_forge.errors import InputError, PreconditionError
from sc_forge.exact import log2_bounds
from sc_forge.functions import FunctionSpec, default_f, default_g, ratio_nonincreasing
from sc_forge.ipsc import Decomposition, DecompositionPart, check_combination_decomposition
from sc_forge.morse import (
    GeodesicVerdict,
    SublinearityReport,
    check_geodesic_criterion,
    intersection_function,
    periodic_path,
    sublinearity_probe,
)
from sc_forge.parallel import ordered_map
from sc_forge.pieces import FAIL, PASS, CPrimeVerdict, PieceTable, check_c_prime, enumerate_pieces, nearest_class_pieces
from sc_forge.words import CyclicWord, Presentation, Word, invert, iter_t_words, least_rotation

logger = logging.getLogger(__name__)

GROWTH_SAMPLES = [1 << k for k in range(10, 25)]

BASE_CLASS = 0
SYNTHETIC_CLASS = 1


class ConstructionParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int = Field(ge=1)
    M: int = Field(ge=1)
    L: int = Field(ge=1)
    U: int = Field(ge=1)
    V: int = Field(ge=1)
    f: FunctionSpec = Field(default_factory=default_f)
    g: FunctionSpec = Field(default_factory=default_g)
    t_letters: tuple[str, str] = DEFAULT_T_LETTERS
    morse_letter: str = DEFAULT_MORSE_LETTER
    strict: bool = True

    @model_validator(mode="after")
    def _check(self) -> "ConstructionParams":
        if self.L < self.U:
            raise ValueError(f"L={self.L} must be at least U={self.U}")
        if not self.strict:
            return self
        small = [name for name in ("N", "M", "L", "U", "V") if getattr(self, name) < PARAM_FLOOR]
        if small:
            raise ValueError(f"{', '.join(small)} below {PARAM_FLOOR} (pass strict=False for desk-scale runs)")
        if not (self.f.sublinear and self.f.superlogarithmic):
            raise ValueError(f"f = {self.f.describe()} must be declared sublinear and superlogarithmic")
        if not ratio_nonincreasing(self.g, self.f, GROWTH_SAMPLES):
            raise ValueError("g/f is not nonincreasing on the sampled scales")
        return self

    @property
    def lam(self) -> Fraction:
        """λ = max{N, M, U}/4"""
        return Fraction(max(self.N, self.M, self.U), 4)

    def with_v(self, V: int) -> "ConstructionParams":
        return self.model_copy(update={"V": V})

    @classmethod
    def parse(cls, text: str, **extra) -> "ConstructionParams":
        """`N=36,M=36,U=36,L=1152,V=120`"""
        values: dict[str, int] = {}
        for item in text.split(","):
            if not item.strip():
                continue
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in ("N", "M", "L", "U", "V"):
                raise InputError(f"unknown construction parameter {item.strip()!r}")
            try:
                values[key] = int(value)
            except ValueError as exc:
                raise InputError(f"parameter {key} must be an integer") from exc
        values.setdefault("V", PARAM_FLOOR)
        try:
            return cls(**values, **extra)
        except ValidationError as exc:
            raise InputError(f"invalid construction parameters: {exc.errors()[0]['msg']}") from exc


@dataclass(frozen=True)
class CwRelator:
    base_index: int
    base: Word
    w: Word
    a_power: int
    t_words: tuple[Word, ...]
    start_index: int
    word: Word

    @property
    def length(self) -> int:
        return len(self.word)


@dataclass
class Construction:
    base: Presentation
    params: ConstructionParams
    max_base_len: int
    r1: tuple[CyclicWord, ...]
    windows: dict[int, list[Word]]
    relators: tuple[CwRelator, ...]
    presentation: Presentation

    @property
    def vacuous(self) -> bool:
        return not self.relators

    def lengths(self) -> list[int]:
        return [len(r) for r in self.r1]


def truncate_base(base: Presentation, max_base_len: int) -> Presentation:
    kept = [r for r in base.relators if len(r) <= max_base_len]
    if len(kept) < len(base.relators):
        logger.info("truncated base to %d of %d relators (length ≤ %d)", len(kept), len(base.relators), max_base_len)
    return Presentation(base.alphabet, tuple(kept))


def select_R1(base: Presentation, V: int) -> list[CyclicWord]:
    """One relator per length ≥ V: the least canonical form"""
    chosen: dict[int, CyclicWord] = {}
    for relator in base.relators:
        if len(relator) >= V and len(relator) not in chosen:
            chosen[len(relator)] = relator
    return [chosen[length] for length in sorted(chosen)]


def window_subwords(r: CyclicWord, L: int, U: int) -> list[Word]:
    """Distinct cyclic subwords of r̄ with |r|/L < |w| < |r|/U, ordered by (length, word)"""
    if not 1 <= U <= L:
        raise InputError("window needs 1 ≤ U ≤ L")
    n = len(r)
    found: set[Word] = set()
    for m in range(1, n + 1):
        if m * L <= n or m * U >= n:
            continue
        for element in (r.word, invert(r.word)):
            doubled = element * 2
            found.update(doubled[i:i + m] for i in range(n))
    return sorted(found, key=lambda w: (len(w), w))


def build_presentation(
    base: Presentation, params: ConstructionParams, max_base_len: int, table: Optional[PieceTable] = None
) -> Construction:
    truncated = truncate_base(base, max_base_len)
    if not truncated.relators:
        raise InputError(f"no base relator has length ≤ {max_base_len}")
    standing = check_c_prime(truncated, Fraction(4, params.N), table)
    if not standing.passed:
        raise PreconditionError(f"base presentation is not C'(4/{params.N}): {len(standing.violations)} violating pieces")
    alphabet = truncated.alphabet.extend(params.t_letters, params.morse_letter)
    a = alphabet.morse_code
    stream: Iterator[Word] = iter_t_words(alphabet.t_codes)

    r1 = select_R1(truncated, params.V)
    index_of = {relator: i for i, relator in enumerate(truncated.relators)}
    windows: dict[int, list[Word]] = {}
    relators: list[CwRelator] = []
    used = 0
    for r in r1:
        k = params.f.ceil_value(len(r))
        windows[index_of[r]] = window_subwords(r, params.L, params.U)
        for w in windows[index_of[r]]:
            t_words = tuple(next(stream) for _ in range(params.M))
            word = a * k + "".join(w + u for u in t_words)
            relators.append(CwRelator(index_of[r], r.word, w, k, t_words, used, word))
            used += params.M
    if not relators:
        logger.warning("R₁ is empty for V=%d: the construction adds no relators", params.V)
    else:
        logger.info("built %d relators from %d base relators (%d t-words)", len(relators), len(r1), used)
    presentation = Presentation(
        alphabet,
        tuple(sorted(
            list(truncated.relators) + [CyclicWord(least_rotation(c.word)) for c in relators],
            key=lambda r: (len(r), r.word),
        )),
    )
    return Construction(truncated, params, max_base_len, tuple(r1), windows, tuple(relators), presentation)


# --- verification --------------------------------------------------------


def t_word_bound(M: int, n: int) -> int:
    """⌊log₂(2M n³)⌋ + 1, the largest |u| with 2^(|u|-1) ≤ 2M n³"""
    return (2 * M * n ** 3).bit_length()


@dataclass
class TWordVerdict:
    short_t_words: bool
    relative_t_words: bool
    index_bound: bool
    fresh: bool
    violations: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        ok = self.short_t_words and self.relative_t_words and self.index_bound and self.fresh
        return PASS if ok else FAIL


def verify_t_words(construction: Construction) -> TWordVerdict:
    """|u| ≤ log₂(2M|r|³)+1 and 2M|u| ≤ |c_w| for every t-word; i_w ≤ M|r|³; no t-word reused"""
    M = construction.params.M
    result = TWordVerdict(True, True, True, True)
    seen: set[Word] = set()
    for c in construction.relators:
        n = len(c.base)
        bound = t_word_bound(M, n)
        for u in c.t_words:
            if len(u) > bound:
                result.short_t_words = False
                result.violations.append(f"c_w #{c.start_index // M}: |u| = {len(u)} > {bound}")
            if 2 * M * len(u) > c.length:
                result.relative_t_words = False
                result.violations.append(f"c_w #{c.start_index // M}: 2M|u| = {2 * M * len(u)} > |c_w| = {c.length}")
            if u in seen:
                result.fresh = False
                result.violations.append(f"c_w #{c.start_index // M}: t-word reused")
            seen.add(u)
        if c.start_index > M * n ** 3:
            result.index_bound = False
            result.violations.append(f"c_w #{c.start_index // M}: i_w = {c.start_index} > M|r|³")
    return result


@dataclass
class LengthBoundVerdict:
    additive: bool
    upper: bool
    lower: bool
    violations: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return PASS if self.additive and self.upper and self.lower else FAIL


def verify_cw_length_bound(construction: Construction) -> LengthBoundVerdict:
    """|c_w| = k + M|w| + Σ|u| and M|r|/L ≤ |c_w| ≤ 2M|r|/U"""
    params = construction.params
    M, L, U = params.M, params.L, params.U
    result = LengthBoundVerdict(True, True, True)
    for c in construction.relators:
        n = len(c.base)
        label = f"c_w #{c.start_index // M}"
        if c.length != c.a_power + M * len(c.w) + sum(len(u) for u in c.t_words):
            result.additive = False
            result.violations.append(f"{label}: length is not additive")
        if c.length * U > 2 * M * n:
            result.upper = False
            result.violations.append(f"{label}: |c_w| = {c.length} > 2M|r|/U = {Fraction(2 * M * n, U)}")
        if c.length * L < M * n:
            result.lower = False
            result.violations.append(f"{label}: |c_w| = {c.length} < M|r|/L = {Fraction(M * n, L)}")
    return result


@dataclass(frozen=True)
class CaseViolation:
    case: int
    relator: Word
    piece: int
    window: int
    partner: Word


@dataclass
class SmallCancellationVerdict:
    lam: Fraction
    c_prime: CPrimeVerdict
    case_violations: list[CaseViolation]

    @property
    def cases_hold(self) -> bool:
        return not self.case_violations

    @property
    def agree(self) -> bool:
        return self.c_prime.passed == self.cases_hold

    @property
    def verdict(self) -> str:
        return PASS if self.c_prime.passed and self.cases_hold else FAIL


def verify_small_cancellation(construction: Construction, table: Optional[PieceTable] = None) -> SmallCancellationVerdict:
    """C'(1/λ) for G' with λ = max{N, M, U}/4, plus the per-piece case bounds for pieces of c_w relators"""
    params = construction.params
    presentation = construction.presentation
    M = params.M
    table = table or enumerate_pieces(presentation)
    c_prime = check_c_prime(presentation, 1 / params.lam, table)

    by_relator: dict[CyclicWord, CwRelator] = {CyclicWord(least_rotation(c.word)): c for c in construction.relators}
    owner = [by_relator.get(r) for r in presentation.relators]
    nearest = nearest_class_pieces(table, lambda i: SYNTHETIC_CLASS if owner[i] is not None else BASE_CLASS)

    violations: list[CaseViolation] = []
    for position, entry in enumerate(table.entries):
        c = owner[entry.relator]
        if c is None:
            continue
        size, window = entry.length, len(c.w)
        shared = nearest[position]
        if BASE_CLASS in shared:
            piece, partner = shared[BASE_CLASS]
            if piece > 0 and not (piece <= window and M * window < size):
                violations.append(CaseViolation(1, table.word(position), piece, window, table.word(partner)))
        if SYNTHETIC_CLASS in shared:
            piece, partner = shared[SYNTHETIC_CLASS]
            if piece > 0 and not (piece * M < 2 * size + M * window and M * window < 2 * size):
                violations.append(CaseViolation(2, table.word(position), piece, window, table.word(partner)))
    if c_prime.passed != (not violations):
        logger.warning("C'(1/λ) verdict and case bounds disagree")
    return SmallCancellationVerdict(params.lam, c_prime, violations)


# --- links to the combination argument -----------------------------------


def _base_element(construction: Construction, c: CwRelator) -> Word:
    base = construction.base.relators[c.base_index]
    return next(element for element in base.closure() if element.startswith(c.w))


def canonical_decomposition(construction: Construction, c: CwRelator, B: int, rho: FunctionSpec) -> Decomposition:
    """Rotation starting at the last w: parts (w, u_M a^k), (w, u_1), …, (w, u_{M-1})"""
    element = _base_element(construction, c)
    a = construction.presentation.alphabet.morse_code
    fillers = [c.t_words[-1] + a * c.a_power] + list(c.t_words[:-1])
    parts = tuple(DecompositionPart(c.w, element, v) for v in fillers)
    return Decomposition(c.word, parts, construction.params.M, B, rho)


def admissible_constants(construction: Construction) -> tuple[int, FunctionSpec]:
    """Least B for conditions (b)–(c), and ρ(|c_w|) = k + ⌊log₂(2M|r|³)⌋ + 1 as a table"""
    B = 1
    filler: dict[int, int] = {}
    M = construction.params.M
    for c in construction.relators:
        n = len(c.base)
        B = max(B, -(-n // len(c.w)), -(-n // c.length), -(-c.length // n))
        filler[c.length] = max(filler.get(c.length, 0), c.a_power + t_word_bound(M, n))
    if not filler:
        return B, FunctionSpec(kind="formula", formula="constant")
    return B, FunctionSpec(kind="table", table=tuple((length, str(v)) for length, v in sorted(filler.items())))


@dataclass
class DecompositionSummary:
    B: int
    rho: FunctionSpec
    checked: int
    failures: list[str]

    @property
    def verdict(self) -> str:
        return FAIL if self.failures else PASS


def verify_decompositions(construction: Construction) -> DecompositionSummary:
    B, rho = admissible_constants(construction)

    def check(c: CwRelator) -> list[str]:
        verdict = check_combination_decomposition(canonical_decomposition(construction, c, B, rho), construction.base)
        return [f"c_w #{c.start_index // construction.params.M}: {msg}" for msg in verdict.failures]

    failures = [msg for messages in ordered_map(check, construction.relators) for msg in messages]
    return DecompositionSummary(B, rho, len(construction.relators), failures)


# --- Morse path and obstruction bound -------------------------------------


@dataclass
class MorsePathVerdict:
    t_max: int
    values: set[int]
    expected: set[int]
    witnesses_synthetic: bool
    geodesic: GeodesicVerdict
    probe: Optional[SublinearityReport]

    @property
    def values_match(self) -> bool:
        return self.values <= self.expected | {0}

    @property
    def verdict(self) -> str:
        ok = self.values_match and self.witnesses_synthetic and self.geodesic.verdict == PASS
        return PASS if ok else FAIL


def verify_morse_path(construction: Construction, t_max: int) -> MorsePathVerdict:
    """The a^∞ path against G': ρ takes only the values ⌈f(|r|)⌉, all witnessed by c_w relators"""
    presentation = construction.presentation
    path = periodic_path(presentation.alphabet.morse_code, t_max)
    table = intersection_function(path, presentation, t_max)
    synthetic = {CyclicWord(least_rotation(c.word)) for c in construction.relators}
    witnesses_synthetic = all(
        w is None or presentation.relators[w.relator] in synthetic for w in table.witnesses
    )
    probe = sublinearity_probe(table) if t_max >= 100 else None
    return MorsePathVerdict(
        t_max=t_max,
        values=set(table.values),
        expected={c.a_power for c in construction.relators},
        witnesses_synthetic=witnesses_synthetic,
        geodesic=check_geodesic_criterion(table),
        probe=probe,
    )


@dataclass(frozen=True)
class ObstructionBound:
    length: int
    lower: Fraction
    upper: Fraction
    delta: Fraction
    applies: Optional[bool] = None

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def loxodromic_obstruction_bound(
    relator: CyclicWord | int, delta: Fraction, g: FunctionSpec, M: int, U: Optional[int] = None
) -> ObstructionBound:
    """A(|r|) = M·g(|r|) + M·log₂(2M|r|³) + M, enclosed in [lower, upper].

    `relator` is r itself or just |r|; the bound depends on r only through
    its length. δ does not enter A. With U given, `applies` says whether |r|
    reaches the cycle length from which short window subwords are
    guaranteed in a δ-hyperbolic space.
    """
    length = len(relator) if isinstance(relator, CyclicWord) else relator
    if length < 1:
        raise InputError("relator length must be positive")
    low, high = log2_bounds(2 * M * length ** 3)
    fixed = M * g.value(length) + M
    applies = None
    if U is not None:
        from sc_forge.hypgeo import required_cycle_length

        applies = length >= required_cycle_length(Fraction(delta), U, g)
    return ObstructionBound(length, fixed + M * low, fixed + M * high, Fraction(delta), applies)


@dataclass
class RatioRow:
    length: int
    f_value: Fraction
    lower: Fraction
    upper: Fraction


@dataclass
class RatioTable:
    rows: list[RatioRow]
    threshold_index: Optional[int]

    @property
    def decreasing_tail(self) -> list[RatioRow]:
        return [] if self.threshold_index is None else self.rows[self.threshold_index:]


def obstruction_ratio_table(lengths: list[int], f: FunctionSpec, g: FunctionSpec, M: int) -> RatioTable:
    """A(|r|)/f(|r|) per length; threshold_index is where the ratios start to decrease strictly"""
    rows = []
    for n in sorted(set(lengths)):
        bound = loxodromic_obstruction_bound(n, Fraction(0), g, M)
        value = f.value(n)
        if value <= 0:
            raise InputError(f"f({n}) must be positive")
        rows.append(RatioRow(n, value, bound.lower / value, bound.upper / value))
    if not rows:
        return RatioTable(rows, None)
    index = len(rows) - 1
    while index > 0 and rows[index].upper < rows[index - 1].lower:
        index -= 1
    return RatioTable(rows, index)


# --- full report and V search ----------------------------------------------


@dataclass
class ConstructionReport:
    construction: Construction
    t_word_check: TWordVerdict
    length_bound: LengthBoundVerdict
    small_cancellation: Optional[SmallCancellationVerdict]
    decompositions: Optional[DecompositionSummary] = None
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        verdicts = [self.t_word_check.verdict, self.length_bound.verdict]
        if self.small_cancellation is not None:
            verdicts.append(self.small_cancellation.verdict)
        if self.decompositions is not None:
            verdicts.append(self.decompositions.verdict)
        return PASS if all(v == PASS for v in verdicts) else FAIL

    @property
    def failing(self) -> Optional[str]:
        for name, verdict in (
            ("t_word_check", self.t_word_check),
            ("length_bound", self.length_bound),
            ("small_cancellation", self.small_cancellation),
            ("decompositions", self.decompositions),
        ):
            if verdict is not None and verdict.verdict != PASS:
                return name
        return None


def verify_construction(construction: Construction, cheap_first: bool = False) -> ConstructionReport:
    """All graded checks; with cheap_first the piece check is skipped once a cheaper one fails"""
    report = ConstructionReport(
        construction,
        verify_t_words(construction),
        verify_cw_length_bound(construction),
        None,
    )
    if cheap_first and report.verdict == FAIL:
        report.notes.append("piece check not evaluated: a cheaper check already failed")
        return report
    report.small_cancellation = verify_small_cancellation(construction)
    report.decompositions = verify_decompositions(construction)
    report.notes.append("R₁ keeps the least canonical relator of each length")
    if construction.vacuous:
        report.notes.append("R₁ is empty: every construction check holds vacuously")
    return report


@dataclass
class MinVResult:
    V: int
    vacuous: bool
    evaluated: list[tuple[int, str, Optional[str]]]
    report: ConstructionReport


def find_min_v(base: Presentation, params: ConstructionParams, max_base_len: int) -> MinVResult:
    """Binary search over the V values at which R₁ changes, for the least V passing every graded check"""
    truncated = truncate_base(base, max_base_len)
    floor = PARAM_FLOOR if params.strict else 1
    candidates = sorted({len(r) for r in truncated.relators if len(r) >= floor} | {max(max_base_len + 1, floor)})
    table = enumerate_pieces(truncated)
    evaluated: list[tuple[int, str, Optional[str]]] = []
    reports: dict[int, ConstructionReport] = {}

    def passes(V: int) -> bool:
        construction = build_presentation(truncated, params.with_v(V), max_base_len, table)
        report = verify_construction(construction, cheap_first=True)
        reports[V] = report
        evaluated.append((V, report.verdict, report.failing))
        logger.info("V=%d: %s", V, report.verdict)
        return report.verdict == PASS

    lo, hi = 0, len(candidates) - 1
    if not passes(candidates[hi]):
        raise PreconditionError("no V passes: the construction fails even with R₁ = ∅")
    while lo < hi:
        mid = (lo + hi) // 2
        if passes(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    V = candidates[lo]
    report = reports[V]
    if report.small_cancellation is None:
        report = verify_construction(report.construction)
    if report.construction.vacuous:
        logger.warning("least passing V=%d leaves R₁ empty", V)
    return MinVResult(V, report.construction.vacuous, evaluated, report)
