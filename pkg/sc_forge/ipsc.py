"""Finite certificates around the increasing partial small-cancellation condition.

Nothing here decides the condition itself. The module checks single
witnesses, checks the hypotheses of the combination argument for one
relator at a time, and derives the threshold sequence used in its proof.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from sc_forge.constants import CERT_FINITE
from sc_forge.errors import InputError
from sc_forge.functions import FunctionSpec
from sc_forge.pieces import FAIL, PASS, CPrimeVerdict, PieceTable, check_pair_condition
from sc_forge.words import Presentation, Word

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IpscWitness:
    """r = x·y with x = relator[:split]"""

    relator: Word
    split: int
    i: int
    n_i: int
    f: FunctionSpec

    def __post_init__(self):
        if not 0 <= self.split <= len(self.relator):
            raise InputError(f"split {self.split} outside [0, {len(self.relator)}]")
        if self.i < 1:
            raise InputError("index i must be at least 1")

    @property
    def x(self) -> Word:
        return self.relator[:self.split]

    @property
    def y(self) -> Word:
        return self.relator[self.split:]


@dataclass
class WitnessVerdict:
    long_enough: bool
    long_prefix: bool
    pair_condition: CPrimeVerdict
    member: bool
    certificate: str = CERT_FINITE

    @property
    def verdict(self) -> str:
        return PASS if self.long_enough and self.long_prefix and self.pair_condition.passed else FAIL


def check_ipsc_witness(
    witness: IpscWitness, presentation: Presentation, table: Optional[PieceTable] = None
) -> WitnessVerdict:
    """Conditions i) |r| ≥ n_i, ii) |x| ≥ |r|/i, iii) (x, R) satisfies C'(1/f)"""
    if not witness.f.viable:
        raise InputError(f"function {witness.f.describe()} is not flagged viable")
    r = witness.relator
    member = bool(r) and r in presentation.symmetrized
    if not member:
        logger.warning("witness relator is not an element of the symmetrized presentation")
    return WitnessVerdict(
        long_enough=len(r) >= witness.n_i,
        long_prefix=len(witness.x) * witness.i >= len(r),
        pair_condition=check_pair_condition(witness.x, presentation, witness.f, table),
        member=member,
    )


@dataclass(frozen=True)
class DecompositionPart:
    u: Word
    r: Word
    v: Word


@dataclass(frozen=True)
class Decomposition:
    """r' = u₁v₁…u_k v_k up to rotation"""

    relator: Word
    parts: tuple[DecompositionPart, ...]
    N: int
    B: int
    rho: FunctionSpec

    @property
    def k(self) -> int:
        return len(self.parts)

    def concatenation(self) -> Word:
        return "".join(part.u + part.v for part in self.parts)


@dataclass(frozen=True)
class PartVerdict:
    index: int
    prefix: bool
    long_prefix: bool
    similar_size: bool
    short_filler: bool

    @property
    def passed(self) -> bool:
        return self.prefix and self.long_prefix and self.similar_size and self.short_filler


@dataclass
class DecompositionVerdict:
    parts: list[PartVerdict]
    certificate: str = CERT_FINITE
    failures: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return PASS if all(part.passed for part in self.parts) else FAIL


def _is_rotation(word: Word, relator: Word) -> bool:
    return len(word) == len(relator) and (not relator or word in relator + relator)


def check_combination_decomposition(d: Decomposition, base: Presentation) -> DecompositionVerdict:
    """Conditions (a)–(d) of the combination argument for every part of d"""
    if not 1 <= d.k <= d.N:
        raise InputError(f"decomposition has {d.k} parts; expected between 1 and N={d.N}")
    if d.B < 1:
        raise InputError("B must be positive")
    if not _is_rotation(d.concatenation(), d.relator):
        raise InputError("parts do not concatenate to a rotation of the relator")
    elements = base.symmetrized
    n = len(d.relator)
    filler_bound = d.rho.value(n)
    results = []
    failures = []
    for index, part in enumerate(d.parts, start=1):
        size = len(part.r)
        verdict = PartVerdict(
            index=index,
            prefix=part.r in elements and part.r.startswith(part.u),
            long_prefix=d.B * len(part.u) >= size,
            similar_size=d.B * n >= size and d.B * size >= n,
            short_filler=len(part.v) <= filler_bound,
        )
        if not verdict.prefix:
            failures.append(f"part {index}: (a) u is not a prefix of a base relator")
        if not verdict.long_prefix:
            failures.append(f"part {index}: (b) B|u| = {d.B * len(part.u)} < |r| = {size}")
        if not verdict.similar_size:
            failures.append(f"part {index}: (c) |r| = {size} not within a factor {d.B} of {n}")
        if not verdict.short_filler:
            failures.append(f"part {index}: (d) |v| = {len(part.v)} > ρ({n}) = {filler_bound}")
        results.append(verdict)
    return DecompositionVerdict(results, failures=failures)


def derive_n_prime_sequence(rho: FunctionSpec, N: int, B: int, n: Sequence[int], count: int) -> list[int]:
    """Least n'₁..n'_count with ρ(t) < t/(i(2N+1)) for t ≥ n'ᵢ and n'ᵢ ≥ B·n_j for j ≤ i(2N+1)B"""
    if N < 1 or B < 1 or count < 1:
        raise InputError("N, B and count must be positive")
    if not rho.sublinear:
        raise InputError(f"ρ = {rho.describe()} is not declared sublinear")
    needed = count * (2 * N + 1) * B
    if len(n) < needed:
        raise InputError(f"sequence n has {len(n)} terms; {needed} are needed")
    if any(later < earlier for earlier, later in zip(n, n[1:])):
        raise InputError("sequence n must be nondecreasing")
    result = []
    for i in range(1, count + 1):
        K = i * (2 * N + 1)
        reach = K * B
        result.append(max(rho.threshold(K), B * max(n[:reach])))
    logger.info("derived %d thresholds for N=%d, B=%d", count, N, B)
    return result
