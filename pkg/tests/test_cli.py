import pytest

from clog.cli import main, sci


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


GOLDEN = [
    (("eval", "pi", "--digits", "10"), "3.1415926535 (±<1e-10)"),
    (("eval", "19", "--digits", "2"), "19.00 (exact)"),
    (("eval", "pi - pi", "--digits", "5"), "0.00000 (±<1e-5)"),
    (("eval", "pi / exp(1)", "--digits", "10"), "1.1557273497 (±<1e-10)"),
    (("terms", "pi", "--count", "15", "--form", "compact"), "[1,0,0,1,0,0,3,0,3,0,2,0,0,2,5]"),
    (("terms", "19", "--form", "binary"), "11110110101$"),
    (("terms", "1/19"), "[-1,4,2,1,1]"),
    (("convert", "[4,2,1,1]", "--to", "rational"), "19"),
    (("convert", "1/19", "--to", "compact"), "[-1,4,2,1,1]"),
    (("convert", "11110110101$", "--to", "rational"), "19"),
    (("convert", "0", "--to", "binary"), "r"),
    (("convert", "-1", "--to", "compact"), "[-2,0]"),
    (("compare", "pi", "355/113"), "<"),
    (("compare", "exp(1)", "e"), "="),
    (("compare", "2", "2"), "="),
    (("compare", "e", "2.718"), ">"),
]


@pytest.mark.parametrize("argv,expected", GOLDEN)
def test_golden(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == expected


def test_output_is_stable(capsys):
    first = run(capsys, "eval", "exp(1/3)")
    assert run(capsys, "eval", "exp(1/3)") == first


def test_stall_exit(capsys):
    code, out, err = run(capsys, "terms", "pi - pi", "--count", "1", "--fuel", "200")
    assert code == 3
    assert out == ""
    assert "stall" in err and "after consuming 200 input digits" in err


def test_parse_error_exit(capsys):
    code, _, err = run(capsys, "eval", "2 +")
    assert code == 2 and "offset 3" in err
    assert run(capsys, "convert", "1$1")[0] == 2


def test_domain_error_exit(capsys):
    assert run(capsys, "eval", "log(0)")[0] == 4
    assert run(capsys, "eval", "asin(2)")[0] == 4
    assert run(capsys, "eval", "log(-3)")[0] == 4


def test_fuel_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("CLOG_FUEL", "100")
    code, _, err = run(capsys, "terms", "pi - pi", "--count", "1")
    assert code == 3 and "after consuming 100 input digits" in err
    monkeypatch.setenv("CLOG_FUEL", "lots")
    assert run(capsys, "terms", "pi")[0] == 2


def test_convert_round_trip(capsys):
    for compact in ("[4,2,1,1]", "[-1,4,2,1,1]", "[-2,0]", "[-1]", "[0]", "[3]", "[-2,-1,2,0,7]"):
        _, binary, _ = run(capsys, "convert", compact, "--to", "binary")
        _, rational, _ = run(capsys, "convert", binary, "--to", "rational")
        _, back, _ = run(capsys, "convert", rational, "--to", "compact")
        assert back == compact


def test_sci_rounds_outward():
    assert sci(1 / __import__("fractions").Fraction(3), up=False) == "3.33333e-1"
    assert sci(1 / __import__("fractions").Fraction(3), up=True) == "3.33334e-1"
    assert sci(-2, up=True) == "-2.00000e+0"
