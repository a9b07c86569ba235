import pytest

from uniformity_forge.constructions import hadamard
from uniformity_forge.errors import FormatError, InputError
from uniformity_forge.formats import (
    detect_kind,
    format_ds,
    format_moa,
    format_qst,
    parse_ds,
    parse_moa,
    parse_qst,
    read_moa,
    read_qst,
    write_moa,
    write_qst,
)
from uniformity_forge.shipped import SHIPPED, load, shipped_path
from uniformity_forge.states import PureState, ghz


CODECS = {
    "array": (parse_moa, format_moa),
    "scheme": (parse_ds, format_ds),
    "state": (parse_qst, format_qst),
}


@pytest.mark.parametrize("name", sorted(SHIPPED))
def test_shipped_round_trip(name):
    path = shipped_path(name)
    parse, fmt = CODECS[detect_kind(path)]
    text = path.read_text()
    obj = parse(text)
    assert fmt(obj) == text
    assert fmt(parse(fmt(obj))) == text


def test_file_round_trip(tmp_path):
    M = load("moa_18_3x7_2")
    write_moa(M, tmp_path / "a.moa")
    assert read_moa(tmp_path / "a.moa") == M
    s = PureState.create((3, 2), {(0, 0): 0.6, (2, 1): 0.8j})
    write_qst(s, tmp_path / "s.qst")
    back = read_qst(tmp_path / "s.qst")
    assert back.dims == s.dims and back.amplitudes == s.amplitudes


def test_complex_amplitudes_exact():
    s = ghz(3, 2)
    s2 = parse_qst(format_qst(s))
    assert s2.amplitudes == s.amplitudes


def test_comments_and_blank_lines():
    M = parse_moa("# header\n2 1 1\n\n2   # levels\n0\n1\n")
    assert M.describe() == "OA(2,2^1,1)"


def test_pm_scheme():
    text = "2 2 2 2\n1 1\n1 -1\n"
    D = parse_ds(text, pm=True)
    assert D.matrix.tolist() == [[1, 1], [1, 0]]
    with pytest.raises(FormatError):
        parse_ds("2 2 3 2\n1 1\n1 -1\n", pm=True)
    assert parse_ds(format_ds(hadamard(8))) == hadamard(8)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("3 2 1\n2 2\n0 0\n1 1\n", 5, None),  # truncated
        ("2 2 1\n2 2\n0 0\n1 2\n", 4, 2),  # symbol out of range
        ("2 2 1\n2 2\n0 x\n1 1\n", 3, 2),  # not an integer
        ("2 2 1\n2 2\n0 0 0\n1 1\n", 3, None),  # wrong width
        ("2 2 1\n2 2\n0 0\n1 1\n1 0\n", 5, None),  # extra row
        ("2 2\n", 1, None),  # bad header
        ("2 2 1\n2 1\n0 0\n", 2, 2),  # level below 2
    ],
)
def test_moa_diagnostics(text, line, column):
    with pytest.raises(FormatError) as info:
        parse_moa(text)
    assert info.value.line == line
    assert info.value.column == column
    assert str(info.value).startswith(f"line {line}")


def test_empty_and_missing_lines():
    with pytest.raises(FormatError):
        parse_moa("")
    with pytest.raises(FormatError):
        parse_moa("1 1 1\n")
    with pytest.raises(FormatError):
        parse_qst("2\n")


def test_qst_diagnostics():
    with pytest.raises(FormatError, match="duplicate"):
        parse_qst("1\n2\n0 1 0\n0 0 0\n")
    with pytest.raises(FormatError, match="outside"):
        parse_qst("1\n2\n2 1 0\n")
    with pytest.raises(FormatError, match="real numbers"):
        parse_qst("1\n2\n0 a 0\n")
    with pytest.raises(FormatError, match="norm"):
        parse_qst("1\n2\n0 0.5 0\n")


def test_format_errors_are_input_errors():
    assert issubclass(FormatError, InputError)


def test_detect_kind():
    assert detect_kind("x.MOA") == "array"
    with pytest.raises(InputError):
        detect_kind("x.txt")
