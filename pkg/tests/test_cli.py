import csv
import json
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nnapprox.cli import EXIT_CONFIG, EXIT_FLAGGED, EXIT_OK, main
from nnapprox.config import RunConfig, load_config
from nnapprox.errors import ConfigError


def run(tmp_path, command, **cfg):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    code = main([command, "--config", str(path), "--out", str(out), "--quiet"])
    return code, out


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- config ----------------------------------------------------------------------

def test_default_roundtrip():
    cfg = RunConfig()
    assert RunConfig.from_dict(json.loads(cfg.to_json())) == cfg


@given(st.integers(2, 4), st.lists(st.sampled_from(["sin", "square", "const"]), min_size=1),
       st.floats(0.05, 1.0), st.booleans())
def test_roundtrip_property(m, functions, delta, neg):
    cfg = RunConfig(m=m, functions=functions, delta=delta, negative_control=neg,
                    beta=2 * m + 1.5, x_list=[1.25], nu_max=m)
    again = RunConfig.from_dict(json.loads(cfg.to_json()))
    assert again == cfg
    assert again.to_json() == cfg.to_json()


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"activation": "logistic", "colour": "red"})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"tolerances": {"nope": 1.0}})


@pytest.mark.parametrize("bad", [
    {"activation": "relu"},
    {"interval": [0.5, 3]},
    {"delta": 2.0},
    {"m": 1},
    {"functions": ["missing"]},
    {"nu_max": 3},
    {"s_list": [0, 3]},
    {"n_list": [0, 4]},
    {"decay": {"K": [1.0], "C": [1.0]}},
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(bad)


def test_load_config_errors(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


# -- subcommands -----------------------------------------------------------------

def test_moments_contains_second_moment(tmp_path):
    code, out = run(tmp_path, "moments", x_list=[0.3], n_list=[50])
    assert code == EXIT_OK
    rows = read(out / "moments.csv")
    assert list(rows[0]) == ["activation", "s", "nu", "n_or_inf", "x", "value", "tail_bound", "method"]
    hit = [r for r in rows if (r["s"], r["nu"], r["n_or_inf"], r["method"]) == ("0", "2", "inf", "direct-sum")]
    assert hit and abs(float(hit[0]["value"]) - 3.6232) < 1e-3
    fourier = [r for r in rows if r["method"] == "poisson-fourier" and r["nu"] == "2"]
    assert abs(float(fourier[0]["value"]) - float(hit[0]["value"])) < 1e-4


def test_moments_hypothesis_and_config_errors(tmp_path):
    code, _ = run(tmp_path, "moments", beta=3)
    assert code == EXIT_FLAGGED
    code, _ = run(tmp_path, "moments", n_list=[])
    assert code == EXIT_CONFIG


def test_strangfix_pass(tmp_path):
    code, out = run(tmp_path, "strangfix", k_max=3)
    assert code == EXIT_OK
    rows = read(out / "strangfix.csv")
    assert rows[-1]["check"] == "overall" and rows[-1]["passed"] == "1"


def test_strangfix_negative_control(tmp_path):
    code, out = run(tmp_path, "strangfix", negative_control=True)
    assert code == EXIT_OK
    rows = read(out / "strangfix.csv")
    assert rows[-1]["passed"] == "0"
    assert rows[0]["kernel"] == "logistic@x2"


def test_strangfix_failure_without_flag(tmp_path):
    code, _ = run(tmp_path, "strangfix", kernel_scale=2.0)
    assert code == EXIT_FLAGGED


def test_strangfix_nu_max_too_large(tmp_path):
    code, _ = run(tmp_path, "strangfix", nu_max=3)
    assert code == EXIT_CONFIG


def test_converge_default(tmp_path):
    code, out = run(tmp_path, "converge")
    assert code == EXIT_OK
    rows = read(out / "converge.csv")
    assert {r["s"] for r in rows} == {"0", "1", "2"}
    for s in ("0", "1", "2"):
        errs = [float(r["sup_error"]) for r in rows if r["s"] == s]
        assert all(b < a for a, b in zip(errs, errs[1:]))


def test_converge_unknown_function(tmp_path):
    code, _ = run(tmp_path, "converge", functions=["nope"])
    assert code == EXIT_CONFIG


def test_converge_deterministic(tmp_path):
    outs = []
    for sub in ("a", "b"):
        (tmp_path / sub).mkdir()
        outs.append(run(tmp_path / sub, "converge")[1] / "converge.csv")
    assert outs[0].read_bytes() == outs[1].read_bytes()


def test_voronovskaja_square_and_linear(tmp_path):
    code, out = run(tmp_path, "voronovskaja", functions=["square", "identity"], n_list=[100, 400, 800])
    assert code == EXIT_OK
    rows = read(out / "voronovskaja.csv")
    sq = [float(r["scaled_residual"]) for r in rows if r["function"] == "square"]
    lin = [float(r["scaled_residual"]) for r in rows if r["function"] == "identity"]
    assert all(abs(v - 3.6232) < 1e-3 for v in sq)
    assert all(abs(v) < 1e-4 for v in lin)


def test_voronovskaja_m3_rejected(tmp_path):
    code, _ = run(tmp_path, "voronovskaja", m=3, functions=["square"])
    assert code == EXIT_FLAGGED


def test_eval_output(tmp_path):
    code, out = run(tmp_path, "eval", n_list=[20], s_list=[0, 1, 2], grid_resolution=13)
    assert code == EXIT_OK
    rows = read(out / "eval_sin_n20.csv")
    assert list(rows[0]) == ["x", "F_n", "F_tilde_n", "d1F_tilde_n", "d2F_tilde_n", "guarantee_flag"]
    assert len(rows) == 13
    assert rows[0]["guarantee_flag"] == "0" and rows[6]["guarantee_flag"] == "1"


def test_bound_output(tmp_path):
    code, out = run(tmp_path, "bound", n_list=[40, 80])
    assert code == EXIT_OK
    rows = read(out / "bound.csv")
    kinds = {r["kind"] for r in rows}
    assert kinds == {"simultaneous", "voronovskaja"}
    for r in rows:
        assert float(r["bound"]) == pytest.approx(float(r["tail_term"]) + float(r["modulus_term"]))


def test_no_temp_files_left(tmp_path):
    _, out = run(tmp_path, "strangfix")
    assert [p.name for p in out.iterdir()] == ["strangfix.csv"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nnapprox", "strangfix", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
