import io
import json
import os
import subprocess
import sys

import pytest

from bellcorr import cli
from bellcorr.cli import EXIT_GUARD, EXIT_OK, EXIT_VALIDATION, RunConfig, main, parse_function, parse_setting
from bellcorr.modfunc import Setting


def run(args, out_dir):
    buf = io.StringIO()
    code = main(["--out", str(out_dir), "--format", "json", *args], stdout=buf)
    return code, (json.loads(buf.getvalue()) if code == EXIT_OK else None)


@pytest.mark.parametrize("args,key,expected", [
    (["vertices", "2,2,5"], "vertices", 125),
    (["vertices", "1,2,2"], "vertices", 4),
    (["vertices", "2,3,2,2"], "vertices", 16),
    (["facets", "2,2,3"], "facets", 66),
    (["classes", "2,2,3"], "classes", 2),
    (["nontrivial", "s1*s2", "--setting", "2,2,2"], "gamma_L", "3/4"),
    (["prbox", "s1*s2", "--setting", "2,2,2"], "unique", True),
    (["prbox", "s1*s2", "--setting", "2,2,2", "--method", "lp"], "unique", True),
    (["prbox", "s1+s2", "--setting", "2,2,2"], "bipartite_linear", True),
])
def test_commands(tmp_path, args, key, expected):
    code, res = run(args, tmp_path)
    assert code == EXIT_OK
    assert res[key] == expected
    assert os.path.isdir(res["result_dir"])


def test_boost_with_target(tmp_path):
    code, res = run(["boost", "--n", "2", "--x-len", "2", "--d", "3", "--target", "x1*x2"], tmp_path)
    assert code == EXIT_OK
    assert res["achievable"] == 729 and res["strict_superset"]
    wit = res["target"]["witness"]
    pts = [(a, b) for a in range(3) for b in range(3)]
    for (a, b), v in zip(pts, res["target"]["table"]):
        s = [(c[0] * a + c[1] * b) % 3 for c in wit["coefficients"]]
        assert (wit["constant"] + sum(g[x] for g, x in zip(wit["site_maps"], s))) % 3 == v


def test_qbound_small(tmp_path):
    code, res = run(["--seed", "1", "qbound", "CHSH", "--restarts", "3"], tmp_path)
    assert code == EXIT_OK
    assert abs(float(res["value"]) - 2.41421356) <= 1e-6
    assert res["violation"]


@pytest.mark.parametrize("args,code", [
    (["vertices", "2,2"], EXIT_VALIDATION),
    (["vertices", "2,2,x"], EXIT_VALIDATION),
    (["nontrivial", "s1*s9", "--setting", "2,2,2"], EXIT_VALIDATION),
    (["nontrivial", "0,1,2", "--setting", "2,2,2"], EXIT_VALIDATION),
    (["qbound", "NoSuchFamily"], EXIT_VALIDATION),
    (["nosuchcommand"], EXIT_VALIDATION),
    (["facets", "3,2,3"], EXIT_GUARD),
    (["--budget", "100", "boost", "--n", "3", "--x-len", "2", "--d", "3"], EXIT_GUARD),
    (["--jobs", "0", "vertices", "2,2,2"], EXIT_VALIDATION),
])
def test_exit_codes(tmp_path, args, code, capsys):
    assert main(["--out", str(tmp_path), *args], stdout=io.StringIO()) == code


def test_cache_hit_skips_computation(tmp_path, monkeypatch):
    calls = []
    orig = cli.COMMANDS["vertices"]

    def counting(cfg, cat):
        calls.append(cfg)
        return orig(cfg, cat)

    monkeypatch.setitem(cli.COMMANDS, "vertices", counting)
    a = run(["vertices", "2,2,3"], tmp_path)
    b = run(["vertices", "2,2,3"], tmp_path)
    assert a == b and len(calls) == 1
    # a different seed does not change the vertex computation key
    run(["--seed", "9", "vertices", "2,2,3"], tmp_path)
    assert len(calls) == 1


def test_corrupted_cache_is_recomputed(tmp_path):
    _, res = run(["facets", "2,2,2"], tmp_path)
    path = os.path.join(res["result_dir"], "facets.txt")
    with open(path, "a") as fh:
        fh.write("garbage\n")
    _, res2 = run(["facets", "2,2,2"], tmp_path)
    assert res2 == res
    assert "garbage" not in open(path).read()


def test_flag_order_does_not_matter(tmp_path):
    a = io.StringIO()
    b = io.StringIO()
    assert main(["--out", str(tmp_path), "--seed", "2", "--format", "json", "vertices", "2,2,2"], stdout=a) == 0
    assert main(["vertices", "2,2,2", "--format", "json", "--seed", "2", "--out", str(tmp_path)], stdout=b) == 0
    assert a.getvalue() == b.getvalue()


def test_outputs_are_byte_identical(tmp_path):
    res = []
    for sub in ("a", "b"):
        _, r = run(["classes", "2,2,3"], tmp_path / sub)
        files = sorted(os.listdir(r["result_dir"]))
        res.append({f: open(os.path.join(r["result_dir"], f), "rb").read() for f in files})
    assert res[0] == res[1]
    assert "classes.csv" in res[0]


@pytest.mark.parametrize("fmt", ["json", "csv", "text"])
def test_formats(tmp_path, fmt):
    buf = io.StringIO()
    assert main(["--out", str(tmp_path), "--format", fmt, "vertices", "2,2,2"], stdout=buf) == 0
    assert "8" in buf.getvalue()


def test_semantic_key():
    a = RunConfig("vertices", {"setting": "2,2,2,2"}, seed=1, out="x")
    b = RunConfig("vertices", {"setting": "2,2,2,2"}, seed=2, out="y", format="json", jobs=4)
    c = RunConfig("qbound", {"inequality": "CHSH"}, seed=1)
    d = RunConfig("qbound", {"inequality": "CHSH"}, seed=2)
    assert a.key() == b.key()
    assert c.key() != d.key()


def test_parse_helpers(tmp_path):
    s = parse_setting("2,2,3")
    assert s == Setting.of(2, 2, 3)
    assert parse_setting("2,3,2,2") == Setting((3, 2), 2)
    assert parse_function("s1*s2", s).table == (0, 0, 0, 1)
    assert parse_function("0,0,0,1", Setting.of(2, 2, 2)).table == (0, 0, 0, 1)
    p = tmp_path / "f.txt"
    p.write_text(parse_function("s1+s2", Setting.of(2, 2, 2)).to_text())
    assert parse_function(f"@{p}", Setting.of(2, 2, 2)).table == (0, 1, 1, 0)
    with pytest.raises(Exception):
        parse_function("__import__('os')", s)


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "bellcorr.cli", "--out", str(tmp_path), "vertices", "2,2,2"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    r = subprocess.run([sys.executable, "-m", "bellcorr.cli", "vertices", "bad"], capture_output=True, text=True,
                       cwd=tmp_path)
    assert r.returncode == EXIT_VALIDATION
