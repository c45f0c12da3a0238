"""Command-line interface: artifacts, metadata echo, and exit codes."""

import csv
import json
import os

import pytest

from structim import load_network, node_importance
from structim.cli import main


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def synthetic_csv(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("gen") / "synth.csv")
    code = main([
        "gen", "synthetic", "--n", "30", "--communities", "2", "--hubs", "2",
        "--coupling", "-2.0", "--horizon", "8", "--seed", "4", "--out", path,
    ])
    assert code == 0
    return path


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "structim" in capsys.readouterr().out


def test_missing_required_argument_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["gen", "barbell"])  # no --out
    assert exc.value.code == 2


def test_gen_barbell_csv_and_sidecar(tmp_path):
    out = str(tmp_path / "barbell.csv")
    code = main(["gen", "barbell", "--repeats", "3", "--out", out])
    assert code == 0
    tn = load_network(out)
    assert tn.n_snapshots == 3
    assert tn.n_nodes == 11

    meta = _read_json(out + ".meta.json")
    assert meta["tool"] == "structim"
    assert meta["command"] == "gen barbell"
    assert meta["n_snapshots"] == 3 and meta["n_nodes"] == 11
    cfg = meta["config"]
    assert cfg["seed"] == 0  # defaults are echoed too
    assert cfg["n_left"] == 4 and cfg["bridge"] == 2 and cfg["n_right"] == 5
    assert cfg["out"] == out


def test_gen_synthetic_roundtrip(synthetic_csv):
    tn = load_network(synthetic_csv)
    assert tn.n_snapshots == 8
    assert tn.n_nodes <= 30
    meta = _read_json(synthetic_csv + ".meta.json")
    assert meta["command"] == "gen synthetic"
    assert meta["config"]["coupling"] == -2.0
    assert meta["config"]["seed"] == 4
    assert meta["n_edges_total"] == sum(s.n_edges for s in tn.snapshots)


def test_importance_csv_matches_library(tmp_path):
    net = str(tmp_path / "net.csv")
    main(["gen", "barbell", "--out", net])
    out = str(tmp_path / "imp.csv")
    code = main(["importance", net, "--scheme", "mb", "--out", out])
    assert code == 0

    rows = _read_csv(out)
    assert rows[0] == ["node", "scheme", "value", "eig_rank"]
    got = {int(r[0]): float(r[2]) for r in rows[1:]}
    ranks = {int(r[0]): int(r[3]) for r in rows[1:]}

    snap = load_network(net).snapshots[0]
    vec = node_importance(snap, "mb")
    assert got == {int(k): v for k, v in vec.values.items()}
    assert ranks == {int(k): v for k, v in vec.eig_rank.items()}
    assert os.path.exists(out + ".meta.json")


def test_importance_json_output(tmp_path):
    net = str(tmp_path / "net.csv")
    main(["gen", "barbell", "--out", net])
    out = str(tmp_path / "imp.json")
    code = main(["importance", net, "--scheme", "ma", "--out", out])
    assert code == 0
    doc = _read_json(out)
    assert doc["meta"]["command"] == "importance"
    assert doc["scheme"] == "ma"
    assert doc["snapshot"] == 0
    assert len(doc["values"]) == 11
    assert all(set(v) == {"node", "value", "eig_rank"} for v in doc["values"])
    assert doc["excluded_zero_strength"] == []


def test_importance_scheme_flag_mismatch(tmp_path, capsys):
    net = str(tmp_path / "net.csv")
    main(["gen", "barbell", "--out", net])
    out = str(tmp_path / "imp.csv")
    assert main(["importance", net, "--scheme", "directed", "--out", out]) == 2
    assert "requires --directed" in capsys.readouterr().err
    assert main(["importance", net, "--scheme", "ma", "--directed", "--out", out]) == 2
    assert "drop --directed" in capsys.readouterr().err


def test_importance_directed_scheme_runs(tmp_path):
    net = str(tmp_path / "net.csv")
    main(["gen", "barbell", "--out", net])
    out = str(tmp_path / "imp.csv")
    code = main(["importance", net, "--scheme", "directed", "--directed", "--out", out])
    assert code == 0
    assert len(_read_csv(out)) == 12  # header + 11 nodes


def test_importance_snapshot_out_of_range(tmp_path, capsys):
    net = str(tmp_path / "net.csv")
    main(["gen", "barbell", "--out", net])
    code = main(["importance", net, "--snapshot", "99", "--out", str(tmp_path / "x.csv")])
    assert code == 3
    assert "out of range" in capsys.readouterr().err


def test_missing_input_is_data_error(tmp_path, capsys):
    code = main(["importance", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "x.csv")])
    assert code == 3
    assert "data error" in capsys.readouterr().err


def test_analyze_artifacts(synthetic_csv, tmp_path):
    out = str(tmp_path / "analysis")
    code = main(["analyze", synthetic_csv, "--out", out])
    assert code == 0

    run = _read_json(os.path.join(out, "run.json"))
    assert run["command"] == "analyze"
    listed = set(run["artifacts"])
    assert set(os.listdir(out)) == listed | {"run.json"}

    spectra = _read_json(os.path.join(out, "spectra.json"))
    assert len(spectra["snapshots"]) == 8
    for entry in spectra["snapshots"]:
        assert entry["positive_count"] >= 1
        assert len(entry["eigenvalues"]) == entry["n_nodes"]

    mod = _read_csv(os.path.join(out, "modularity.csv"))
    assert mod[0] == ["snapshot", "modularity", "n_communities"]
    assert len(mod) == 9

    ranks = _read_csv(os.path.join(out, "eigen_ranks.csv"))
    assert ranks[0] == ["snapshot", "node", "eig_rank"]
    assert all(int(r[2]) >= 1 for r in ranks[1:])

    ttests = _read_json(os.path.join(out, "ttests.json"))
    assert ttests["bonferroni_alpha"] == pytest.approx(0.05 / 8)
    assert {t["measure"] for t in ttests["tests"]} == {
        "ma", "mb", "mc", "md", "eig_centrality", "pagerank", "degree", "community_size"
    }
    measured = _read_csv(os.path.join(out, "measures.csv"))
    assert measured[0] == ["snapshot", "node", "measure", "value", "next_present"]
    assert len(measured) > 1
    for name in ("violin_ma.svg", "violin_degree.svg", "modularity.svg"):
        assert name in listed


def test_analyze_format_restriction(synthetic_csv, tmp_path):
    out = str(tmp_path / "json_only")
    assert main(["analyze", synthetic_csv, "--format", "json", "--out", out]) == 0
    files = set(os.listdir(out))
    assert "spectra.json" in files and "ttests.json" in files
    assert not any(f.endswith(".csv") or f.endswith(".svg") for f in files)


def test_predict_artifacts(synthetic_csv, tmp_path, capsys):
    out = str(tmp_path / "pred")
    code = main([
        "predict", synthetic_csv, "--target", "presence", "--seed", "2",
        "--l2-grid", "0.1,1.0", "--trials", "30", "--bootstrap-iters", "100",
        "--out", out,
    ])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "target=presence" in stdout

    doc = _read_json(os.path.join(out, "prediction.json"))
    assert doc["meta"]["command"] == "predict"
    cfg = doc["meta"]["config"]
    assert cfg["seed"] == 2 and cfg["target"] == "presence"
    assert cfg["l2_grid"] == "0.1,1.0"
    assert doc["target"] == "presence"
    assert doc["report"]["auc"] is not None
    assert doc["report"]["null_prior"]["kind"] == "prior_predictor"
    assert doc["chosen_l2"] in (0.1, 1.0)

    coefs = _read_csv(os.path.join(out, "coefficients.csv"))
    assert coefs[0] == ["feature", "coef", "se", "pvalue", "ci_lo", "ci_hi"]
    assert len(coefs) == 2 + len(doc["columns"])  # header + intercept + features
    assert coefs[1][0] == "(intercept)"

    perm = _read_csv(os.path.join(out, "permutation_importance.csv"))
    assert {r[0] for r in perm[1:]} == set(doc["columns"])
    assert os.path.exists(os.path.join(out, "permutation_importance.svg"))

    shap_rows = _read_csv(os.path.join(out, "shap.csv"))
    assert shap_rows[0] == ["node", "feature", "phi"]
    assert len(shap_rows) - 1 == doc["split"]["test"] * len(doc["columns"])


def test_predict_regression_target(synthetic_csv, tmp_path, capsys):
    out = str(tmp_path / "reg")
    code = main([
        "predict", synthetic_csv, "--target", "rel_change", "--trials", "30", "--out", out,
    ])
    assert code == 0
    assert "heldout R2" in capsys.readouterr().out
    doc = _read_json(os.path.join(out, "prediction.json"))
    assert doc["report"] is None
    assert isinstance(doc["regression"]["r2_heldout"], float)
    files = set(os.listdir(out))
    assert "coefficients.csv" in files
    assert "permutation_importance.csv" not in files
    assert "shap.csv" not in files


def test_predict_bad_grid_is_usage_error(synthetic_csv, tmp_path, capsys):
    out = str(tmp_path / "bad")
    assert main(["predict", synthetic_csv, "--l2-grid", "abc", "--out", out]) == 2
    assert "cannot parse" in capsys.readouterr().err
    assert main(["predict", synthetic_csv, "--l2-grid=-1.0,2.0", "--out", out]) == 2
    assert "nonnegative" in capsys.readouterr().err


def test_predict_too_few_snapshots(tmp_path, capsys):
    net = str(tmp_path / "static.csv")
    main(["gen", "barbell", "--repeats", "4", "--out", net])
    code = main(["predict", net, "--out", str(tmp_path / "out")])
    assert code == 3
    assert "at least 5 snapshots" in capsys.readouterr().err
