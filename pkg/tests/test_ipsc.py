import random

import pytest

from sc_forge.errors import InputError
from sc_forge.functions import FunctionSpec
from sc_forge.ipsc import (
    Decomposition,
    DecompositionPart,
    IpscWitness,
    check_combination_decomposition,
    check_ipsc_witness,
    derive_n_prime_sequence,
)
from sc_forge.pieces import FAIL, PASS
from sc_forge.words import Alphabet, Presentation

VIABLE = FunctionSpec.parse("const:6", viable=True)


def test_surface_witness_passes(surface):
    relator = surface.alphabet.parse_word("a b a' b' c d c' d'")
    verdict = check_ipsc_witness(IpscWitness(relator, 4, 2, 8, VIABLE), surface)
    assert verdict.verdict == PASS
    assert verdict.member
    assert verdict.long_enough and verdict.long_prefix


def test_witness_conditions_fail_independently(surface):
    relator = surface.alphabet.parse_word("a b a' b' c d c' d'")
    short_prefix = check_ipsc_witness(IpscWitness(relator, 1, 2, 8, VIABLE), surface)
    assert short_prefix.verdict == FAIL and not short_prefix.long_prefix
    too_short = check_ipsc_witness(IpscWitness(relator, 4, 2, 9, VIABLE), surface)
    assert too_short.verdict == FAIL and not too_short.long_enough


def test_pair_condition_failure_in_witness():
    alphabet = Alphabet(base=("a", "b"))
    relator = alphabet.parse_word("a" * 10 + "b")
    presentation = Presentation.build(alphabet, [relator])
    verdict = check_ipsc_witness(IpscWitness(relator, 5, 3, 11, VIABLE), presentation)
    assert verdict.long_enough and verdict.long_prefix
    assert verdict.pair_condition.verdict == FAIL
    assert verdict.verdict == FAIL


def test_witness_input_errors(surface):
    relator = surface.alphabet.parse_word("a b a' b' c d c' d'")
    with pytest.raises(InputError):
        IpscWitness(relator, 9, 2, 8, VIABLE)
    with pytest.raises(InputError):
        IpscWitness(relator, 4, 0, 8, VIABLE)
    with pytest.raises(InputError):
        check_ipsc_witness(IpscWitness(relator, 4, 2, 8, FunctionSpec.parse("const:1")), surface)


def test_non_member_relator_is_reported(surface):
    word = surface.alphabet.parse_word("a a b b")
    verdict = check_ipsc_witness(IpscWitness(word, 2, 2, 4, VIABLE), surface)
    assert not verdict.member


def surface_decomposition(surface, rho: str, N: int = 2, B: int = 2) -> Decomposition:
    p = surface.alphabet.parse_word
    parts = (
        DecompositionPart(p("a b a' b'"), p("a b a' b' c d c' d'"), p("c")),
        DecompositionPart(p("c d c' d'"), p("c d c' d' a b a' b'"), p("a")),
    )
    return Decomposition(p("a b a' b' c c d c' d' a"), parts, N, B, FunctionSpec.parse(rho))


def test_decomposition_passes(surface):
    verdict = check_combination_decomposition(surface_decomposition(surface, "const:2"), surface)
    assert verdict.verdict == PASS
    assert verdict.failures == []
    assert [part.index for part in verdict.parts] == [1, 2]


def test_decomposition_failures_name_the_condition(surface):
    verdict = check_combination_decomposition(surface_decomposition(surface, "const:0"), surface)
    assert verdict.verdict == FAIL
    assert all("(d)" in failure for failure in verdict.failures)
    assert len(verdict.failures) == 2

    loose = check_combination_decomposition(surface_decomposition(surface, "const:2", B=1), surface)
    assert any("(b)" in failure for failure in loose.failures)


def test_decomposition_input_errors(surface):
    with pytest.raises(InputError):
        check_combination_decomposition(surface_decomposition(surface, "const:2", N=1), surface)
    with pytest.raises(InputError):
        check_combination_decomposition(surface_decomposition(surface, "const:2", B=0), surface)
    broken = surface_decomposition(surface, "const:2")
    broken = Decomposition(surface.alphabet.parse_word("a b"), broken.parts, 2, 2, broken.rho)
    with pytest.raises(InputError):
        check_combination_decomposition(broken, surface)


def test_decomposition_accepts_rotations(surface):
    d = surface_decomposition(surface, "const:2")
    rotated = Decomposition(d.relator[3:] + d.relator[:3], d.parts, d.N, d.B, d.rho)
    assert check_combination_decomposition(rotated, surface).verdict == PASS


def test_n_prime_for_sqrt():
    assert derive_n_prime_sequence(FunctionSpec.parse("sqrt"), 1, 1, [1] * 30, 10)[:4] == [13, 43, 91, 157]


def test_n_prime_revalidates_independently():
    rng = random.Random(5)
    for rho_text in ("sqrt", "sqrt:c=2", "nlog2sq", "const:4"):
        rho = FunctionSpec.parse(rho_text)
        for N in (1, 2, 3):
            for B in (1, 2, 3):
                count = 4
                needed = count * (2 * N + 1) * B
                n = sorted(rng.randint(1, 60) for _ in range(needed))
                sequence = derive_n_prime_sequence(rho, N, B, n, count)
                for i, value in enumerate(sequence, start=1):
                    K = i * (2 * N + 1)
                    assert all(rho.value(t) * K < t for t in range(value, 2 * value + 1))
                    assert value >= B * max(n[:K * B])
                    if value > max(B * max(n[:K * B]), 1):
                        assert rho.value(value - 1) * K >= value - 1


def test_n_prime_input_errors():
    sqrt = FunctionSpec.parse("sqrt")
    with pytest.raises(InputError):
        derive_n_prime_sequence(sqrt, 1, 1, [1] * 5, 10)
    with pytest.raises(InputError):
        derive_n_prime_sequence(sqrt, 1, 1, [2, 1, 3], 1)
    with pytest.raises(InputError):
        derive_n_prime_sequence(FunctionSpec.parse("affine:a=1"), 1, 1, [1] * 3, 1)
    with pytest.raises(InputError):
        derive_n_prime_sequence(sqrt, 0, 1, [1] * 3, 1)
