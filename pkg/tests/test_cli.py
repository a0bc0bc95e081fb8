import hashlib
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pirep.cache import Cache, envelope_from_json, envelope_to_json, threads
from pirep.cli import EXIT_FAIL, EXIT_GUARD, EXIT_INPUT, EXIT_NONSPLIT, EXIT_OK, main
from pirep.exponent import pi_exponent
from pirep.growth import (FAIL, INCONCLUSIVE, PASS, GrowthOptions, brackets, fit_envelope,
                          growth_verdict, in_root_window, run_growth)
from pirep.pipeline import structures
from pirep.repspec import (SpecError, bundled_names, format_rational, parse_rational, parse_spec,
                           parse_spec_text)


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


# --- spec parsing ----------------------------------------------------------------

def test_parse_bundled_sl2():
    spec = parse_spec("sl2_natural")
    assert spec.dim_v == 2 and len(spec.generators) == 3


def test_parse_rational_string_roundtrip():
    spec = parse_spec_text('dim_v = 1\ngenerators = [[["1/3"]]]\n')
    assert spec.generators[0][0, 0] == Fraction(1, 3)
    assert spec.to_dict()["generators"] == [[["1/3"]]]


@pytest.mark.parametrize("text,fragment", [
    ('dim_v = 1\ngenerators = [[["1.5"]]]\n', "malformed"),
    ('dim_v = 1\ngenerators = [[[1.5]]]\n', "float"),
    ('dim_v = 2\ngenerators = [[[1, 0], [0]]]\n', "ragged"),
    ('dim_v = 2\ngenerators = [[[1, 0]]]\n', "expected 2 rows"),
    ('dim_v = 1\ngenerators = [[["1/0"]]]\n', "zero denominator"),
    ('generators = []\n', "missing dim_v"),
    ('dim_v = 0\n', "positive integer"),
    ('dim_v = 1\ngenerators = [[[true]]]\n', "boolean"),
    ('dim_v = [\n', "<string>"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(SpecError, match=fragment):
        parse_spec_text(text)


def test_parse_error_reports_line():
    text = 'name = "x"\ndim_v = 2\ngenerators = [\n  [[0, 1], [0, "2.5"]],\n]\n'
    with pytest.raises(SpecError, match="line 4"):
        parse_spec_text(text)


def test_empty_and_duplicate_generators_allowed():
    spec = parse_spec_text('dim_v = 2\ngenerators = [[[0, 1], [0, 0]], [[0, 1], [0, 0]], '
                           '[[0, 0], [0, 0]]]\n')
    assert len(spec.generators) == 3
    assert structures(spec).rep.dim_l == 1
    assert parse_spec_text("dim_v = 3\n").generators == ()


@given(st.fractions(max_denominator=10**6))
def test_rational_format_roundtrip(x):
    assert parse_rational(format_rational(x), "t") == x


def test_content_hash_depends_on_content_only():
    a = parse_spec_text('name = "a"\ndim_v = 1\ngenerators = [[["2/4"]]]\n')
    b = parse_spec_text('name = "a"\ndim_v = 1\ngenerators = [[["1/2"]]]\n')
    c = parse_spec_text('name = "a"\ndim_v = 1\ngenerators = [[["1/3"]]]\n')
    assert a.content_hash() == b.content_hash() != c.content_hash()


# --- growth fitting -----------------------------------------------------------------

def test_growth_zero_rep():
    rep = run_growth(parse_spec("zero"), 4)
    assert rep.d == 0 and rep.codims == [0, 0, 0, 0] and rep.verdict == PASS


def test_growth_scalar_rep():
    rep = run_growth(parse_spec("scalar1"), 5)
    assert rep.d == 1 and rep.codims == [1] * 5 and rep.verdict == PASS
    f = rep.fit
    assert (f.r1, f.r2, f.c1_sq, f.c2_sq) == (0, 0, 1, 1)


def test_growth_sl2_natural_small():
    rep = run_growth(parse_spec("sl2_natural"), 5)
    assert rep.d == 3 and rep.codims == [1, 2, 4, 9, 21]
    assert brackets(rep.codims, rep.d, rep.fit)


def test_growth_polynomial_example_fails_root_window():
    # c_n = n with d = 1: the law holds with r = 1, but n^(1/n) is still far
    # from 1 at desk scale, so the heuristic window rejects it
    rep = run_growth(parse_spec("ut2_e11_e12"), 5)
    assert rep.codims == [1, 2, 3, 4, 5] and rep.d == 1
    assert rep.fit.r1 == rep.fit.r2 == 1
    assert rep.verdict == FAIL


def test_growth_d0_with_nonzero_tail_fails():
    assert growth_verdict([1, 2], 0)[0] == FAIL
    assert growth_verdict([1, 2, 0, 0], 0)[0] == PASS
    assert growth_verdict([0], 0)[0] == FAIL


def test_growth_inconclusive_when_capped():
    rep = run_growth(parse_spec("gl2"), 2, GrowthOptions(state_cap=1))
    assert rep.verdict == INCONCLUSIVE and rep.d_lower_bound


@given(st.lists(st.integers(1, 10**4), min_size=1, max_size=7), st.integers(1, 5))
def test_fit_brackets_whenever_found(codims, d):
    fit = fit_envelope(codims, d)
    if fit is not None:
        assert brackets(codims, d, fit)
        assert fit.twice_r1 <= fit.twice_r2 or len(codims) == 1


@given(st.lists(st.integers(0, 10**4), min_size=2, max_size=7), st.integers(0, 5))
def test_verdict_never_passes_a_violating_point(codims, d):
    verdict, fit, _ = growth_verdict(codims, d)
    if verdict == PASS and d > 0:
        assert min(codims) >= 1 and brackets(codims, d, fit)
        n = len(codims)
        assert (0.6 * d) ** n <= codims[-1] * (1 + 1e-9) and codims[-1] <= (1.05 * d) ** n * (1 + 1e-9)
    if verdict == PASS and d == 0:
        assert codims[-1] == codims[-2] == 0


def test_root_window_exact_edges():
    assert in_root_window(3 ** 4, 4, 5)      # 3 = 0.6 * 5 exactly
    assert not in_root_window(3 ** 4 - 1, 4, 5)


# --- cache -----------------------------------------------------------------------------

def test_cache_roundtrip_gives_identical_results(tmp_path):
    spec = parse_spec("ut2_e11_e12")
    cache = Cache(tmp_path)
    cold = structures(spec, 0, None)
    structures(spec, 0, cache)
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files and not any(f.endswith(".tmp") for f in files)
    warm = structures(spec, 0, cache)
    assert warm.env == cold.env
    assert envelope_from_json(envelope_to_json(cold.env)) == cold.env
    a = pi_exponent(cold.rep, cold.env, cold.levi)
    b = pi_exponent(warm.rep, warm.env, warm.levi)
    assert (a.d, a.witness_indices) == (b.d, b.witness_indices)


def test_growth_report_identical_cold_and_cached(tmp_path):
    spec = parse_spec("sl2_natural")
    cache = Cache(tmp_path)
    r1 = json.dumps(run_growth(spec, 4, cache=cache).to_dict(), sort_keys=True)
    r2 = json.dumps(run_growth(spec, 4, cache=cache).to_dict(), sort_keys=True)
    r3 = json.dumps(run_growth(spec, 4).to_dict(), sort_keys=True)
    assert hashlib.sha256(r1.encode()).digest() == hashlib.sha256(r2.encode()).digest()
    assert r1 == r3


def test_corrupt_cache_ignored(tmp_path):
    spec = parse_spec("gl2")
    cache = Cache(tmp_path)
    structures(spec, 0, cache)
    for p in tmp_path.iterdir():
        p.write_text("{not json")
    assert structures(spec, 0, cache).env.dim_a == 4


def test_cache_env_vars(monkeypatch, tmp_path):
    monkeypatch.setenv("PI_CACHE_DIR", str(tmp_path / "here"))
    assert Cache().root == tmp_path / "here"
    monkeypatch.setenv("PI_THREADS", "3")
    assert threads() == 3
    monkeypatch.setenv("PI_THREADS", "junk")
    assert threads() == 1


# --- command line ----------------------------------------------------------------------

def test_cli_analyze():
    code, out = run("analyze", "gl2")
    data = json.loads(out)
    assert code == EXIT_OK
    assert (data["dim_L"], data["dim_A"], data["dim_G"], data["dim_R"], data["dim_S"]) == \
        (4, 4, 3, 1, 1)
    assert data["factor_kinds"] == ["irreducible", "irreducible"]
    assert all(data["lemmas"].values())


def test_cli_codim_csv():
    code, out = run("codim", "sl2_natural", "--max-n", "3")
    assert code == EXIT_OK
    assert out == "n,c_n,method,seed\n1,1,exact,\n2,2,exact,\n3,4,exact,\n"
    code, out = run("codim", "sl2_natural", "--max-n", "2", "--method", "modular", "--seed", "5")
    assert out.splitlines()[1:] == ["1,1,modular,5", "2,2,modular,5"]


def test_cli_cochar_csv():
    code, out = run("cochar", "gl2", "--n", "3")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0] == "lambda,m,dim,product"
    assert lines[-1] == "# sum=6 c_n=6 consistent=true"


def test_cli_exponent_and_verify():
    code, out = run("exponent", "sl2_natural")
    data = json.loads(out)
    assert code == EXIT_OK and data["d"] == 3 and data["witness"]
    code, out = run("verify", "heisenberg3")
    assert code == EXIT_OK and "AnnGS: pass" in out


def test_cli_growth_exit_codes():
    assert run("growth", "scalar1", "--max-n", "3")[0] == EXIT_OK
    assert run("growth", "ut2_e11_e12", "--max-n", "4")[0] == EXIT_FAIL
    assert run("growth", "gl2", "--max-n", "2", "--state-cap", "1")[0] == EXIT_GUARD


def test_cli_error_exit_codes(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('dim_v = 2\ngenerators = [[["1.5", "0"], ["0", "0"]]]\n')
    assert run("analyze", str(bad))[0] == EXIT_INPUT
    assert run("analyze", str(tmp_path / "missing.toml"))[0] == EXIT_INPUT
    assert run("frobnicate")[0] == EXIT_INPUT
    assert run("codim", "gl2", "--max-n", "4", "--budget", "100")[0] == EXIT_GUARD
    rot = tmp_path / "rot.toml"
    rot.write_text('dim_v = 2\ngenerators = [[[0, -1], [1, 0]]]\n')
    assert run("analyze", str(rot))[0] == EXIT_NONSPLIT


@pytest.mark.parametrize("argv", [
    ("analyze", "sl2_adjoint"),
    ("codim", "gl2", "--max-n", "5"),
    ("cochar", "sl2_natural", "--n", "4"),
    ("exponent", "ut2_e11_e12"),
    ("growth", "sl2_natural", "--max-n", "4"),
])
def test_cli_byte_deterministic(argv, tmp_path, monkeypatch):
    first = run(*argv, "--no-cache")
    monkeypatch.setenv("PI_CACHE_DIR", str(tmp_path / "c1"))
    second = run(*argv)
    third = run(*argv)  # warm cache
    assert first == second == third


def test_cli_threads_do_not_change_output(monkeypatch):
    monkeypatch.setenv("PI_THREADS", "1")
    a = run("cochar", "sl2_adjoint", "--n", "4")
    monkeypatch.setenv("PI_THREADS", "4")
    assert run("cochar", "sl2_adjoint", "--n", "4") == a


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pirep.cli", "exponent", "scalar1",
                           "--no-cache"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["d"] == 1


def test_bundled_names():
    assert set(bundled_names()) >= {"sl2_natural", "sl2_adjoint", "gl2", "ut2_e11_e12", "e12",
                                    "heisenberg3", "zero", "scalar1"}
