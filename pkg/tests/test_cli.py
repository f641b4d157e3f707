import csv
import json

import pytest

from drsubmax.cli import main, summary_path

D1 = """
seeds = [1, 2]

[body]
box = { lo = [0.0], hi = [1.0] }

[objective]
kind = "dr_quadratic"
H = [[-1.0]]
h0 = [1.0]

[oracle]
case = 1

[run]
variant = "A"
N = 100
"""

ONLINE = """
seeds = [0]

[body]
box = { lo = [0.0], hi = [1.0] }

[objective]
kind = "dr_quadratic"
H = [[-1.0]]
h0 = [1.0]

[oracle]
sigma = 0.1

[online]
T = 10000
feedback = "%s"
"""


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def cfg(tmp_path):
    def make(text, name="cfg.toml"):
        p = tmp_path / name
        p.write_text(text)
        return p
    return make


def test_offline_d1(cfg, tmp_path):
    out = tmp_path / "off.csv"
    assert main(["offline", "--config", str(cfg(D1)), "--out", str(out)]) == 0
    body = rows(out)
    assert len(body) == 2 * 101
    assert {r["seed"] for r in body} == {"1", "2"}
    s = rows(summary_path(out))[0]
    assert float(s["F_final"]) == 0.5 and s["pass"] == "true"
    assert body[-1]["query_count"] == "100"


def test_offline_reproducible(cfg, tmp_path):
    c = cfg(D1.replace("case = 1", "case = 2\nsigma = 0.3"))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["offline", "--config", str(c), "--out", str(a)]) == 0
    assert main(["offline", "--config", str(c), "--out", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert summary_path(a).read_bytes() == summary_path(b).read_bytes()


def test_seed_override(cfg, tmp_path):
    out = tmp_path / "o.csv"
    assert main(["offline", "--config", str(cfg(D1)), "--out", str(out), "--seeds", "5"]) == 0
    assert {r["seed"] for r in rows(out)} == {"5"}


def test_unknown_variant(cfg, tmp_path, capsys):
    c = cfg(D1.replace('variant = "A"', 'variant = "Q"'))
    assert main(["offline", "--config", str(c), "--out", str(tmp_path / "x.csv")]) == 1
    assert "run.variant" in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert main(["offline", "--config", str(tmp_path / "nope.toml"), "--out", "x.csv"]) == 1


def test_bad_mode_exits_one(cfg):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate", "--config", str(cfg(D1)), "--out", "x.csv"])
    assert e.value.code == 1


def test_json_config(cfg, tmp_path):
    spec = {"seeds": [0], "body": {"box": {"lo": [0.0], "hi": [1.0]}},
            "objective": {"kind": "dr_quadratic", "H": [[-1.0]], "h0": [1.0]},
            "oracle": {"case": 1}, "run": {"variant": "C", "N": 10}}
    c = cfg(json.dumps(spec), "cfg.json")
    out = tmp_path / "j.csv"
    assert main(["offline", "--config", str(c), "--out", str(out)]) == 0


def test_body_file(cfg, tmp_path):
    (tmp_path / "tri.json").write_text(json.dumps({"d": 2, "A": [[1, 1]], "b": [1]}))
    text = D1.replace('[body]\nbox = { lo = [0.0], hi = [1.0] }', 'body_file = "tri.json"')
    text = text.replace("H = [[-1.0]]\nh0 = [1.0]", "H = [[-1.0, -0.5], [-0.5, -1.0]]\nh0 = [1.0, 0.9]")
    text = text.replace('variant = "A"', 'variant = "B"')
    out = tmp_path / "t.csv"
    assert main(["offline", "--config", str(cfg(text)), "--out", str(out)]) == 0
    assert float(rows(summary_path(out))[0]["F_star"]) == pytest.approx(0.58)


def test_variant_body_mismatch(cfg, tmp_path):
    text = D1.replace("box = { lo = [0.0], hi = [1.0] }", "box = { lo = [0.2], hi = [0.8] }")
    assert main(["offline", "--config", str(cfg(text)), "--out", str(tmp_path / "m.csv")]) == 1


def test_runtime_error_exit_two(cfg, tmp_path):
    text = D1 + "\n[baseline]\nm = 200000000\n"
    assert main(["baseline", "--config", str(cfg(text)), "--out", str(tmp_path / "b.csv")]) == 2


def test_epsilon_target(cfg, tmp_path):
    text = D1.replace("N = 100", "epsilon_target = 0.01")
    out = tmp_path / "e.csv"
    assert main(["offline", "--config", str(cfg(text)), "--out", str(out), "--seeds", "0"]) == 0
    assert rows(summary_path(out))[0]["N"] == "50"


@pytest.mark.parametrize("fb", ["bandit", "semi_bandit"])
def test_online(cfg, tmp_path, fb):
    out = tmp_path / "on.csv"
    assert main(["online", "--config", str(cfg(ONLINE % fb)), "--out", str(out)]) == 0
    body = rows(out)
    assert len(body) == 10 ** 4
    assert list(body[0].keys()) == ["seed", "t", "z1", "F_exact", "reward"]
    s = rows(summary_path(out))[0]
    assert s["T0"] == ("2155" if fb == "bandit" else "1000")
    if fb == "semi_bandit":
        assert s["delta"] == "0" and s["B"] == "1"


def test_sweep_n(cfg, tmp_path):
    text = D1.replace("seeds = [1, 2]", "seeds = " + str(list(range(20))))
    text = text.replace("case = 1", "case = 2\nsigma = 0.2") + "\n[sweep]\nN_grid = [10, 20, 40]\n"
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", str(cfg(text)), "--out", str(out)]) == 0
    assert len(rows(out)) == 60
    summ = rows(summary_path(out))
    assert len(summ) == 3 and len({r["slope"] for r in summ}) == 1


def test_sweep_t(cfg, tmp_path):
    text = ONLINE % "bandit" + "\n[sweep]\nT_grid = [500, 1000]\n"
    out = tmp_path / "st.csv"
    assert main(["sweep", "--config", str(cfg(text)), "--out", str(out)]) == 0
    assert len(rows(summary_path(out))) == 2


def test_empty_grid(cfg, tmp_path):
    text = D1 + "\n[sweep]\nN_grid = []\n"
    assert main(["sweep", "--config", str(cfg(text)), "--out", str(tmp_path / "s.csv")]) == 1


def test_baseline(cfg, tmp_path):
    out = tmp_path / "b.csv"
    assert main(["baseline", "--config", str(cfg(D1 + "\n[baseline]\nm = 201\n")), "--out", str(out)]) == 0
    r = rows(out)[0]
    assert float(r["z1"]) == 1.0 and float(r["F_star"]) == 0.5
