import json

import pytest

from latmax.cli import main
from latmax.experiments import ExperimentConfig, replay, run_experiment


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


FIG3 = {"domain": {"type": "int_lattice", "n": 3, "C": 2},
        "function": {"family": "fig3", "params": {"epsilon": 0.1}}}
FIG4_DL = {"domain": {"type": "dl", "poset": {"elements": 4, "covers": [[0, 1], [2, 3]]}},
           "function": {"family": "fig4", "params": {"x": 100}}}


def test_solve_exact_and_replay(tmp_path, capsys):
    inst = write(tmp_path / "fig3.json", FIG3)
    trace = str(tmp_path / "trace.json")
    code, out = run(capsys, ["solve", "--algo", "dg13", "--instance", inst, "--trace", trace])
    assert code == 0 and out["solution"] == [2, 0, 2] and out["value"] == pytest.approx(1.1)
    assert out["queries"] == 14
    code, out = run(capsys, ["exact", "--instance", inst])
    assert code == 0 and out["optimum"] == 3 and out["argmax"] == [1, 1, 1]
    code, out = run(capsys, ["replay", trace])
    assert code == 0 and out["valid"]
    d = json.loads(open(trace).read())
    d["steps"][2]["fa"] = 0.5
    bad = write(tmp_path / "bad.json", d)
    code, out = run(capsys, ["replay", bad])
    assert code == 1 and any(v.startswith("step 3:") for v in out["violations"])


def test_check_exit_codes(tmp_path, capsys):
    inst = write(tmp_path / "fig3.json", FIG3)
    code, out = run(capsys, ["check", "--instance", inst, "--property", "submodular"])
    assert code == 0 and out["holds"]
    code, out = run(capsys, ["check", "--instance", inst, "--property", "monotone"])
    assert code == 1 and not out["holds"]
    dl = write(tmp_path / "fig4.json", FIG4_DL)
    code, out = run(capsys, ["check", "--instance", dl, "--property", "dr"])
    assert code == 1 and out["witness"]


def test_poset_matroid_check(tmp_path, capsys):
    inst = write(tmp_path / "i.json", {
        "domain": {"type": "dl", "poset": {"elements": 3, "covers": [[0, 1]]}},
        "function": {"family": "random_dr_dl", "params": {"seed": 2}}})
    good = write(tmp_path / "u.json", {"kind": "uniform", "k": 2})
    bad = write(tmp_path / "f.json", {"kind": "family", "independent": [[], [0, 1]]})
    assert run(capsys, ["check", "--instance", inst, "--property", "poset-matroid", "--matroid", good])[0] == 0
    assert run(capsys, ["check", "--instance", inst, "--property", "poset-matroid", "--matroid", bad])[0] == 1


def test_dl_solvers_from_cli(tmp_path, capsys):
    inst = write(tmp_path / "i.json", {
        "domain": {"type": "dl", "poset": {"elements": 5, "covers": [[0, 1], [0, 2]]}},
        "function": {"family": "random_dr_dl", "params": {"seed": 3}}})
    mt = write(tmp_path / "u.json", {"kind": "uniform", "k": 2})
    code, out = run(capsys, ["solve", "--algo", "matroid-greedy", "--instance", inst, "--matroid", mt,
                             "--matroid", mt, "--trace", str(tmp_path / "t.json")])
    assert code == 0 and len(out["solution"]) <= 2
    assert replay(str(tmp_path / "t.json"))["valid"]
    code, out = run(capsys, ["solve", "--algo", "card-greedy", "--instance", inst, "--k", "3"])
    assert code == 0 and len(out["solution"]) == 3
    code, out = run(capsys, ["solve", "--algo", "dl-dg", "--instance", inst, "--trials", "5", "--seed", "7"])
    assert code == 0 and out["trials"] == 5 and out["seed"] == 7


def test_fig4_explicit_extension(tmp_path, capsys):
    inst = write(tmp_path / "fig4.json", FIG4_DL)
    code, out = run(capsys, ["solve", "--algo", "dl-dg", "--instance", inst, "--extension", "2,3,0,1",
                             "--trials", "20"])
    assert code == 0 and out["mean_value"] == 3
    assert main(["solve", "--algo", "dl-dg", "--instance", inst, "--extension", "1,0,2,3"]) == 2


def test_reduce_then_exact(tmp_path, capsys):
    h = write(tmp_path / "h.json", {"vertices": 3, "edges": [[0, 1], [1, 2]]})
    out_path = str(tmp_path / "red.json")
    code, out = run(capsys, ["reduce", "--hypergraph", h, "--k", "2", "--out", out_path])
    assert code == 0 and out["elements"] == 7
    saved = json.loads(open(out_path).read())
    assert saved["constraint"] == {"type": "knapsack", "weights": [1, 1, 1, 0, 0, 0, 0], "budget": 2}
    code, out = run(capsys, ["exact", "--instance", out_path])
    assert out["optimum"] == 4
    assert main(["reduce", "--hypergraph", h, "--k", "5", "--out", out_path]) == 2


def test_errors_exit_two(tmp_path, capsys, monkeypatch):
    assert main(["exact", "--instance", str(tmp_path / "missing.json")]) == 2
    bad = write(tmp_path / "bad.json", {"domain": {"type": "int_lattice", "n": 2, "C": 2},
                                        "function": {"family": "fig3"}})
    assert main(["exact", "--instance", bad]) == 2
    big = write(tmp_path / "big.json", {"domain": {"type": "int_lattice", "n": 3, "C": 2},
                                        "function": {"family": "fig3"}})
    monkeypatch.setenv("LATMAX_ENUM_LIMIT", "5")
    assert main(["exact", "--instance", big]) == 2
    assert "error" in capsys.readouterr().err


def test_experiment_reports_are_reproducible(tmp_path, capsys):
    cfg = {"algo": "rand-best", "name": "fig3-rb", "trials": 50, "base_seed": 3, "bound": 0.6,
           "instances": {"family": "fig3", "params": {"epsilon": 0.1}}}
    path = write(tmp_path / "cfg.json", cfg)
    texts = []
    for i in range(2):
        csv_p, json_p = tmp_path / f"r{i}.csv", tmp_path / f"r{i}.json"
        code, out = run(capsys, ["experiment", "--config", path, "--csv", str(csv_p), "--json", str(json_p)])
        assert code == 1  # the exact mean ratio is 1.505/3, below the bound
        texts.append((csv_p.read_bytes(), json_p.read_bytes()))
    assert texts[0] == texts[1]
    header = texts[0][0].decode().splitlines()[0]
    assert header == "instance,trial,seed,achieved,exact,ratio,queries"


def test_run_experiment_fig3_single_row():
    rep = run_experiment(ExperimentConfig("dg13", {"family": "fig3", "params": {"epsilon": 0.1}}))
    assert len(rep.rows) == 1 and rep.passed
    assert rep.rows[0]["ratio"] == pytest.approx(1.1 / 3, abs=1e-9)
    assert rep.verdicts[0]["name"].startswith("ratio >= 0.333333")


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("nope", {})
    with pytest.raises(ValueError):
        ExperimentConfig("card-greedy", {})
    with pytest.raises(ValueError):
        ExperimentConfig("dg13", {}, trials=0)
