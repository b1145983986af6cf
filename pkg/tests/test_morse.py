import math
import random

import pytest

from sc_forge.errors import InputError
from sc_forge.morse import (
    IntersectionTable,
    check_geodesic_criterion,
    common_substring_oracle,
    intersection_function,
    parse_path,
    periodic_path,
    sublinearity_probe,
)
from sc_forge.pieces import FAIL, PASS
from sc_forge.words import Alphabet, Presentation, is_cyclic_subword

from tests.generators import random_cyclic_word, random_presentation

AB = Alphabet(base=("a", "b"))


def presentation(*texts: str) -> Presentation:
    return Presentation.build(AB, [AB.parse_word(text) for text in texts])


def test_rho_on_a_short_relator():
    table = intersection_function(AB.parse_word("a a a a"), presentation("a a a b"), 4)
    assert table.values == (0, 0, 0, 3)
    assert table.rho(4) == 3
    assert table.witness(3) is None
    assert table.witness(4).subword == AB.parse_word("a a a")
    verdict = check_geodesic_criterion(table)
    assert verdict.verdict == FAIL
    assert verdict.first_failure == 4
    with pytest.raises(InputError):
        table.rho(5)


def test_geodesic_criterion_passes_on_the_surface(surface):
    table = intersection_function(surface.alphabet.parse_word("a b"), surface, 20)
    assert set(table.values) == {0, 2}
    assert check_geodesic_criterion(table).verdict == PASS


def test_inverse_relators_count():
    table = intersection_function(AB.parse_word("b' a' a'"), presentation("a a a b"), 4)
    assert table.rho(4) == 3


def test_matches_common_substring_oracle():
    rng = random.Random(99)
    for _ in range(150):
        p = random_presentation(rng, max_generators=2, max_relators=4, max_length=9)
        path = random_cyclic_word(rng, p.alphabet.base_codes, rng.randint(1, 20))
        fast = intersection_function(path, p, 15)
        slow = common_substring_oracle(path, p, 15)
        assert fast.values == slow.values
        assert fast.relator_overlaps == slow.relator_overlaps


def test_periodic_paths():
    assert periodic_path(AB.parse_word("a b"), 5) == AB.parse_word("a b a b a b a")
    assert len(parse_path("periodic:a", AB, 10)) == 11
    with pytest.raises(InputError):
        periodic_path(AB.parse_word("a a'"), 5)
    with pytest.raises(InputError):
        periodic_path("", 5)
    with pytest.raises(InputError):
        parse_path("a a'", AB, 5)


def test_argument_checks():
    with pytest.raises(InputError):
        intersection_function(AB.parse_word("a"), presentation("a b"), 0)
    with pytest.raises(InputError):
        intersection_function(AB.parse_word("a a'"), presentation("a b"), 4)
    short = intersection_function(AB.parse_word("a"), presentation("a b"), 50)
    with pytest.raises(InputError):
        sublinearity_probe(short)


def test_probe_on_a_bounded_intersection_function():
    table = intersection_function(parse_path("periodic:a", AB, 128), presentation("a a a b"), 128)
    probe = sublinearity_probe(table)
    assert [s.exponent for s in probe.scales] == list(range(8))
    assert probe.consistent
    assert probe.verdict == "consistent-with-sublinear"
    assert probe.max_ratio_at == 4
    assert abs(probe.growth_exponent) < 1e-9


def test_probe_flags_linear_growth():
    relators = ["a" * k + "b" for k in (39, 69, 99, 119)]
    table = intersection_function(parse_path("periodic:a", AB, 128), presentation(*relators), 128)
    assert table.rho(128) == 119
    probe = sublinearity_probe(table)
    assert not probe.consistent
    assert probe.verdict == "not-consistent"


def test_probe_on_zero_function():
    table = intersection_function(parse_path("periodic:a", AB, 100), presentation("b b b b b b b"), 100)
    probe = sublinearity_probe(table)
    assert probe.consistent
    assert probe.growth_exponent is None


def synthetic_table(rho, t_max: int = 4095) -> IntersectionTable:
    return IntersectionTable(t_max, tuple(rho(t) for t in range(1, t_max + 1)), (None,) * t_max, ())


def test_square_root_growth_is_consistent():
    envelope = sublinearity_probe(synthetic_table(lambda t: math.isqrt(t - 1) + 1))
    assert len(envelope.scales) == 12
    assert envelope.consistent
    assert 0.4 < envelope.growth_exponent < 0.6


def test_half_linear_growth_is_not_consistent():
    envelope = sublinearity_probe(synthetic_table(lambda t: t // 2))
    assert not envelope.consistent
    assert envelope.verdict == "not-consistent"


def test_random_relator_pairs_keep_rho_invariants():
    rng = random.Random(404)
    for _ in range(200):
        words = [random_cyclic_word(rng, AB.base_codes, rng.randint(1, 14)) for _ in range(2)]
        pair = Presentation.build(AB, words)
        path = random_cyclic_word(rng, AB.base_codes, rng.randint(1, 40))
        t_max = rng.randint(1, 30)
        table = intersection_function(path, pair, t_max)
        previous = 0
        for t in range(1, t_max + 1):
            rho = table.rho(t)
            assert previous <= rho <= t
            previous = rho
            witness = table.witness(t)
            if rho == 0:
                continue
            assert len(witness.subword) == rho
            assert witness.subword in path
            assert is_cyclic_subword(witness.subword, pair.relators[witness.relator])
