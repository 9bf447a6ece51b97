import csv
import io
import json

import pytest
from hypothesis import given, strategies as st

from klein import cli
from klein.dsl import (format_potential, format_potential_json, parse_potential,
                       parse_potential_json)
from klein.errors import DomainError, PotentialSyntaxError
from klein.output import format_float, jsonable, to_csv, to_json


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_step():
    doc = parse_potential("mass 1\nleft 0\nright 5\n")
    prof = doc.profile()
    assert prof.segments == () and prof.delta_V == 5.0 and prof.mass == 1.0


def test_parse_ramp():
    prof = parse_potential("left 0\nright 5\nramp 0 20 0 10 200\n").profile()
    assert len(prof.segments) == 200
    assert prof.segments[-1].x_end == 20.0


def test_comments_and_columns():
    with pytest.raises(PotentialSyntaxError) as exc:
        parse_potential("# header\nleft 0   # comment\nright 5\nsegment 0 1 abc\n")
    assert exc.value.line == 4 and exc.value.column == 13


@pytest.mark.parametrize("text,line,fragment", [
    ("segment 0 2 1\nsegment 1 3 2\n", 2, "segment overlaps previous"),
    ("left 0\nright 1\nsegment 0 1 1\nsegment 2 3 1\n", 4, "gap"),
    ("left 0\nleft 1\n", 2, "duplicate"),
    ("left 0\n", 1, "missing 'right'"),
    ("left 0\nright 1\nramp 0 1 0 1 2.5\n", 3, "positive integer"),
    ("left 0\nright 1\nsegment 1 0 1\n", 3, "empty or reversed"),
    ("mass -1\nleft 0\nright 1\n", 1, "mass"),
    ("wobble 3\n", 1, "unknown directive"),
])
def test_parse_errors(text, line, fragment):
    with pytest.raises(PotentialSyntaxError) as exc:
        parse_potential(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)


def test_json_form():
    text = '{"mass": 1, "left": 0, "right": 10, "pieces": [["segment", -1, 0, 0.5], ["ramp", 0, 20, 0.5, 10, 50]]}'
    doc = parse_potential(text)
    assert len(doc.profile().segments) == 51
    with pytest.raises(DomainError, match="entry 2"):
        parse_potential_json('{"left": 0, "right": 1, "pieces": [["segment", 0, 1, 1], ["segment", 0.5, 2, 1]]}')
    with pytest.raises(PotentialSyntaxError):
        parse_potential('{"left": 0,,}')


coords = st.floats(-100, 100, allow_nan=False).map(lambda x: round(x, 6))


@given(st.lists(st.tuples(st.floats(0.01, 5), st.floats(-50, 50), st.booleans(), st.integers(1, 5)),
                max_size=5), st.floats(-50, 50), st.floats(-50, 50), st.floats(0.1, 3))
def test_round_trip(pieces, left, right, mass):
    lines = [f"mass {mass!r}", f"left {left!r}", f"right {right!r}"]
    x = 0.0
    for w, v, is_ramp, n in pieces:
        if is_ramp:
            lines.append(f"ramp {x!r} {x + w!r} {v!r} {-v!r} {n}")
        else:
            lines.append(f"segment {x!r} {x + w!r} {v!r}")
        x = x + w
    doc = parse_potential("\n".join(lines))
    again = parse_potential(format_potential(doc))
    assert again.profile() == doc.profile()
    assert parse_potential(format_potential_json(doc)).profile() == doc.profile()


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_csv_float_round_trip(x):
    text = to_csv(["x"], [[x]])
    row = list(csv.reader(io.StringIO(text)))[1]
    assert float(row[0]) == x


def test_output_helpers():
    assert format_float(0.1) == "0.10000000000000001"
    assert jsonable(float("nan")) is None
    assert json.loads(to_json({"b": 1, "a": complex(1, 2)})) == {"b": 1, "a": {"re": 1.0, "im": 2.0}}
    assert to_csv(["a"], [[1]]).endswith("\n") and "\r" not in to_csv(["a"], [[1]])


def test_scatter_json(capsys):
    code, out, _ = run(capsys, "scatter", "--potential", "step", "--V", "5", "--E", "1.5")
    assert code == 0
    rec = json.loads(out)
    assert (rec["kappa"], rec["R"], rec["T"]) == (3.0, 0.25, 0.75)


def test_scatter_numeric_sauter(capsys):
    code, out, _ = run(capsys, "scatter", "--potential", "sauter", "--E", "5", "--n", "800")
    assert code == 0 and json.loads(out)["T"] == pytest.approx(0.001875, rel=1e-3)


def test_current(capsys):
    code, out, _ = run(capsys, "current", "--potential", "step", "--V", "5")
    rep = json.loads(out)
    assert code == 0 and rep["j_vacuum"] == pytest.approx(-0.354528, abs=1e-6)
    code, out, _ = run(capsys, "current", "--V", "5", "--format", "csv", "--esteps", "10")
    assert out.splitlines()[0] == "E,T,integrand" and len(out.splitlines()) == 11
    code, out, _ = run(capsys, "current", "--V", "2")
    assert json.loads(out)["subcritical"] is True


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--well", "--V", "3", "--a", "10")
    rec = json.loads(out)
    assert code == 0 and rec["ledger"]["Q_S"] == 11 and rec["ledger"]["Q_p"] == 18
    code, out, _ = run(capsys, "spectrum", "--delta", "--lam", "3.5")
    assert json.loads(out)["states"][0]["parity"] == "odd"


def test_adiabatic_json_lines(capsys):
    code, out, _ = run(capsys, "adiabatic", "--delta", "--lam", "3.5")
    lines = [json.loads(s) for s in out.splitlines()]
    assert [d["event"] for d in lines] == ["crosses-zero", "goes-supercritical"]
    code, out, _ = run(capsys, "adiabatic", "--a", "1.5707963267948966", "--V", "3", "--format", "csv")
    assert out.splitlines()[0] == "V,event,parity,N,E,Q_p,Q_0,Q_S,Q_total"


def test_other_commands(capsys):
    assert run(capsys, "modes", "--xsteps", "5", "--format", "csv")[0] == 0
    code, out, _ = run(capsys, "emission", "--V", "2.02", "--a", "50")
    assert json.loads(out)["Q_S"] == 6
    code, out, _ = run(capsys, "coulomb", "--Z", "10")
    assert json.loads(out)["rho"] == pytest.approx(0.632227, abs=1e-6)
    code, out, _ = run(capsys, "resonances", "--V", "5", "--a", "1")
    assert [r["N"] for r in json.loads(out)["resonances"]] == [1, 2]
    code, out, err = run(capsys, "sweep", "--emin", "1.1", "--emax", "6", "--esteps", "5", "--format", "csv")
    assert code == 0 and "skipped" in err and len(out.splitlines()) == 5


def test_exit_codes(capsys):
    assert run(capsys, "scatter", "--E", "0.5")[0] == 2
    assert run(capsys, "scatter", "--potential", "/nonexistent/file")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "scatter", "--E", "oops")[0] == 2
    code, _, err = run(capsys, "emission", "--V", "1.5")
    assert code == 2 and "Traceback" not in err


def test_numerical_failure_exit_code(capsys, monkeypatch):
    from klein import errors, spectrum

    def boom(*a, **k):
        raise errors.SweepResolutionError("two events", diagnostic=0.0)

    monkeypatch.setattr(spectrum, "adiabatic_sweep", boom)
    code, _, err = run(capsys, "adiabatic")
    assert code == 3 and err.startswith("numerical failure")


def test_out_file_and_env_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("KLEIN_OUTPUT_DIR", str(tmp_path))
    assert run(capsys, "resonances", "--out", "res.json")[0] == 0
    assert json.loads((tmp_path / "res.json").read_text())["V"] == 5.0
