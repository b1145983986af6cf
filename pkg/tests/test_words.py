import random

import pytest

from sc_forge.errors import InputError, PresentationFormatError
from sc_forge.words import (
    Alphabet,
    CyclicWord,
    Presentation,
    cyclic_reduce,
    enumerate_t_words,
    free_reduce,
    inverse_letter,
    invert,
    is_cyclic_subword,
    is_cyclically_reduced,
    is_reduced,
    least_rotation,
    symmetrize,
)

from tests.generators import random_cyclic_word, random_presentation

ABC = Alphabet(base=("a", "b", "c"))


def w(text: str) -> str:
    return ABC.parse_word(text)


def test_invert_reverses_and_inverts_letters():
    assert invert(w("a b' c")) == w("c' b a'")
    assert invert(invert(w("a b c' a"))) == w("a b c' a")


def test_free_reduce_cancels_adjacent_inverses():
    assert free_reduce(w("a b b' a'")) == ""
    assert free_reduce(w("a b' b c c'")) == w("a")
    assert free_reduce(w("c a a' c' b")) == w("b")


def test_free_reduce_rejects_letters_outside_the_alphabet():
    small = Alphabet(base=("a",))
    with pytest.raises(InputError):
        free_reduce(w("a b"), small)


def test_reducedness_predicates():
    assert is_reduced(w("a b a'"))
    assert not is_reduced(w("a a' b"))
    assert not is_cyclically_reduced(w("a b a'"))
    assert is_cyclically_reduced(w("a b"))
    assert is_cyclically_reduced("")


def test_least_rotation_uses_alphabet_order():
    assert least_rotation(w("b' a b")) == w("a b b'")
    assert least_rotation(w("c a")) == w("a c")


def test_cyclic_word_is_rotation_invariant():
    assert CyclicWord.of(w("b c a")) == CyclicWord.of(w("a b c"))
    assert CyclicWord.of(w("a b")).inverse() == CyclicWord.of(w("b' a'"))
    with pytest.raises(InputError):
        CyclicWord.of(w("a b a'"))


def test_closure_counts_rotations_of_relator_and_inverse(surface):
    (relator,) = surface.relators
    assert len(relator.closure()) == 16
    power = CyclicWord.of(w("a b a b"))
    assert len(power.closure()) == 4


def test_symmetrize_collects_rotations_and_inverses():
    assert symmetrize(Presentation.build(ABC, [w("a a a")])) == {w("a a a"), w("a' a' a'")}
    assert symmetrize(Presentation.build(ABC, [w("a b")])) == {w("a b"), w("b a"), w("b' a'"), w("a' b'")}
    closure = symmetrize(Presentation.build(ABC, [w("a b c"), w("c c b")]))
    assert len(closure) == 12
    assert all(invert(element) in closure for element in closure)
    assert all(element[1:] + element[0] in closure for element in closure)


def test_cyclic_reduce_splits_off_the_conjugator():
    core, conjugator = cyclic_reduce(w("a b c b' a'"))
    assert core == CyclicWord(w("c"))
    assert conjugator == w("a b")
    core, _ = cyclic_reduce(w("a b b' a'"))
    assert core.is_empty


def test_is_cyclic_subword_sees_wraparound(surface):
    (relator,) = surface.relators
    codes = surface.alphabet
    wrapping = codes.parse_word("d' a")
    assert is_cyclic_subword(wrapping, relator)
    assert is_cyclic_subword(codes.parse_word("a' d"), relator)  # inverse only
    assert not is_cyclic_subword(codes.parse_word("a a"), relator)


def test_t_words_run_by_length_then_lexicographically():
    assert enumerate_t_words(("t", "s"), 6) == ["s", "t", "ss", "st", "ts", "tt"]
    with pytest.raises(InputError):
        enumerate_t_words(("s",), 3)
    with pytest.raises(InputError):
        enumerate_t_words(("s", "t"), 0)


def test_alphabet_rejects_bad_symbols():
    with pytest.raises(ValueError):
        Alphabet(base=("a", "a"))
    with pytest.raises(ValueError):
        Alphabet(base=("a", "'"))
    with pytest.raises(ValueError):
        Alphabet(base=("ab",))


def test_alphabet_extension_reports_collisions(surface):
    with pytest.raises(InputError, match="a"):
        surface.alphabet.extend(("s", "t"), "a")
    extended = surface.alphabet.extend(("s", "t"), "m")
    assert extended.generators == ("a", "b", "c", "d", "s", "t", "m")
    assert extended.format_word(extended.t_codes[0] + extended.morse_code) == "sm"


def test_inverse_mark_must_follow_a_letter():
    with pytest.raises(PresentationFormatError) as leading:
        ABC.parse_word("'a")
    assert leading.value.column == 1
    with pytest.raises(PresentationFormatError) as doubled:
        ABC.parse_word("a''")
    assert doubled.value.column == 3
    with pytest.raises(PresentationFormatError):
        ABC.parse_word("a '")


def test_format_word_round_trips():
    assert ABC.format_word(w("a b' c")) == "ab'c"
    assert ABC.parse_word(ABC.format_word(w("c' c' a b"))) == w("c' c' a b")


def test_presentation_is_canonical():
    first = Presentation.build(ABC, [w("b c a"), w("a a")])
    second = Presentation.build(ABC, [w("a a"), w("a b c"), w("c a b")])
    assert first.relators == second.relators
    assert [len(r) for r in first.relators] == [2, 3]
    with pytest.raises(InputError):
        Presentation.build(ABC, [w("a b a'")])


LETTERS = ABC.base_codes + tuple(inverse_letter(c) for c in ABC.base_codes)


def random_word(rng: random.Random, length: int) -> str:
    return "".join(rng.choice(LETTERS) for _ in range(length))


def naive_reduce(word: str) -> str:
    while True:
        for i in range(len(word) - 1):
            if word[i] == inverse_letter(word[i + 1]):
                word = word[:i] + word[i + 2:]
                break
        else:
            return word


def test_free_reduce_matches_repeated_cancellation():
    rng = random.Random(5)
    for _ in range(2000):
        word = random_word(rng, rng.randint(0, 20))
        reduced = free_reduce(word)
        assert reduced == naive_reduce(word)
        assert is_reduced(reduced)
        assert free_reduce(reduced) == reduced


def test_cyclic_reduce_recovers_the_conjugacy_class():
    rng = random.Random(8)
    for _ in range(1000):
        c = random_cyclic_word(rng, ABC.base_codes, rng.randint(1, 12))
        u = random_word(rng, rng.randint(0, 8))
        core, conjugator = cyclic_reduce(u + c + invert(u))
        assert core.word == least_rotation(c)
        reduced = free_reduce(u + c + invert(u))
        assert reduced.startswith(conjugator)
        assert reduced.endswith(invert(conjugator))
        assert len(reduced) == 2 * len(conjugator) + len(c)
        middle = reduced[len(conjugator):len(reduced) - len(conjugator)]
        assert is_cyclically_reduced(middle)
        assert least_rotation(middle) == core.word


def test_is_cyclic_subword_matches_doubled_words():
    rng = random.Random(13)
    for _ in range(1000):
        r = CyclicWord.of(random_cyclic_word(rng, ABC.base_codes, rng.randint(1, 10)))
        forward = r.word + r.word
        backward = invert(r.word) * 2
        if rng.random() < 0.5:
            source = rng.choice([forward, backward])
            i = rng.randrange(len(r))
            candidate = source[i:i + rng.randint(1, len(r))]
        else:
            candidate = random_word(rng, rng.randint(1, 6))
        expected = len(candidate) <= len(r) and (candidate in forward or candidate in backward)
        found = is_cyclic_subword(candidate, r)
        assert bool(found) == expected
        for occurrence in found:
            assert occurrence.rotation in r.closure()
            assert occurrence.rotation[occurrence.offset:occurrence.offset + len(candidate)] == candidate


def test_t_words_are_distinct_and_short():
    t_words = enumerate_t_words(("s", "t"), 10_000)
    assert len(set(t_words)) == 10_000
    for i, u in enumerate(t_words, start=1):
        assert len(u) <= i.bit_length()
        assert set(u) <= {"s", "t"}


def test_symmetrize_matches_direct_enumeration():
    rng = random.Random(21)
    for _ in range(300):
        presentation = random_presentation(rng)
        expected = set()
        for r in presentation.relators:
            for word in (r.word, invert(r.word)):
                expected.update(word[i:] + word[:i] for i in range(len(word)))
        assert symmetrize(presentation) == expected
