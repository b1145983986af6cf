import pytest

from sc_forge.errors import PresentationFormatError
from sc_forge.textformat import (
    dump_presentation,
    load_presentation,
    parse_cycle,
    parse_edges,
    parse_presentation,
)


def test_shipped_surface_loads(data_dir, surface):
    loaded = load_presentation(data_dir / "surface_genus2.pres")
    assert loaded.relators == surface.relators
    assert loaded.alphabet.base == ("a", "b", "c", "d")


def test_dump_and_parse_round_trip(data_dir):
    original = load_presentation(data_dir / "codeword_base.pres")
    again = parse_presentation(dump_presentation(original))
    assert again == original
    assert dump_presentation(again) == dump_presentation(original)


def test_headers_for_extended_alphabets():
    text = "alphabet: x y\nt-alphabet: s t\nmorse-letter: a\n# comment\n\nx y s a\n"
    presentation = parse_presentation(text)
    assert presentation.alphabet.t_letters == ("s", "t")
    assert presentation.alphabet.morse_letter == "a"
    assert dump_presentation(presentation).splitlines()[:3] == ["alphabet: x y", "t-alphabet: s t", "morse-letter: a"]


def test_duplicate_relators_are_dropped():
    presentation = parse_presentation("alphabet: a b\na b\nb a\n")
    assert len(presentation.relators) == 1


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("alphabet: a b\na c\n", 2, 3),
        ("alphabet: a b\na a'\n", 2, 3),
        ("alphabet: a b\na b a'\n", 2, 5),
        ("a b\n", 1, 1),
        ("alphabet: a b\nfoo: x\n", 2, 1),
        ("alphabet: a\na\nt-alphabet: s t\n", 3, 1),
        ("alphabet: a a\n", 1, 1),
        ("alphabet: a\nalphabet: b\n", 2, 1),
        ("alphabet: x y\nmorse-letter: a b\n", 2, 1),
    ],
)
def test_malformed_presentations_report_line_and_column(text, line, column):
    with pytest.raises(PresentationFormatError) as excinfo:
        parse_presentation(text, source="bad.pres")
    assert (excinfo.value.line, excinfo.value.column) == (line, column)
    assert str(excinfo.value).startswith(f"bad.pres:{line}:{column}:")


def test_load_names_the_file_in_errors(tmp_path):
    path = tmp_path / "broken.pres"
    path.write_text("alphabet: a\nq\n", encoding="utf-8")
    with pytest.raises(PresentationFormatError, match="broken.pres:2:1"):
        load_presentation(path)


def test_edge_lists():
    assert parse_edges("# square\n0 1\n1 2\n\n2 3\n3 0\n") == [("0", "1"), ("1", "2"), ("2", "3"), ("3", "0")]
    with pytest.raises(PresentationFormatError) as excinfo:
        parse_edges("0 1\n1 2 3\n")
    assert excinfo.value.line == 2
    with pytest.raises(PresentationFormatError):
        parse_edges("# nothing\n")


def test_cycle_files():
    assert parse_cycle("v0 v1 # start\nv2\nv1\n") == ["v0", "v1", "v2", "v1"]
    with pytest.raises(PresentationFormatError):
        parse_cycle("# empty\n")
