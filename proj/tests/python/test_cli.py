import json
import subprocess


def run(cpf_bin, *args):
    return subprocess.run([cpf_bin, *args], capture_output=True, text=True)


def test_cluster_writes_labels_rowmap_and_report(cpf_bin, demo_csv, tmp_path):
    out = tmp_path / "labels.csv"
    report = tmp_path / "report.json"
    r = run(cpf_bin, "cluster", "--input", str(demo_csv), "--truth-col", "cls",
            "--k", "8", "--K", "15", "--out", str(out), "--report", str(report))
    assert r.returncode == 0, r.stderr

    text = out.read_text()
    assert text.endswith("\n")
    labels = [int(line) for line in text.splitlines()]
    assert len(labels) == 201  # one per input data row
    assert labels[200] == -1  # the dropped row

    rowmap = (tmp_path / "labels.csv.rowmap.csv").read_text().splitlines()
    assert rowmap[0] == "dataset_index,input_row"
    assert len(rowmap) == 1 + 200  # retained rows only
    assert rowmap[1] == "0,0"

    rep = json.loads(report.read_text())
    assert rep["schema"] == 1
    assert rep["input"]["rows"] == 201
    assert rep["input"]["rows_dropped"] == 1
    assert rep["clusters"] >= 2
    assert len(rep["components"]) >= 1
    assert "timings_ms" in rep
    for comp in rep["components"]:
        assert comp["beta_star"] >= 1


def test_evaluate_round_trip_matches_in_memory_indices(cpf_bin, cpf_module, demo_csv, tmp_path):
    out = tmp_path / "labels.csv"
    r = run(cpf_bin, "cluster", "--input", str(demo_csv), "--truth-col", "cls",
            "--k", "8", "--K", "15", "--out", str(out))
    assert r.returncode == 0, r.stderr

    r = run(cpf_bin, "evaluate", "--pred", str(out), "--input", str(demo_csv),
            "--truth-col", "cls")
    assert r.returncode == 0, r.stderr
    cli_indices = json.loads(r.stdout)

    result = cpf_module.cluster_file(str(demo_csv), truth_col="cls", k=8, K=15)
    used = result["used_rows"]
    pred = [result["labels"][i] for i in used]
    expected = cpf_module.evaluate(pred, result["truth"])
    for key in ("ari", "nmi", "purity", "f1", "ca"):
        assert abs(cli_indices[key] - expected[key]) < 1e-12


def test_components_and_decision_graph_outputs(cpf_bin, demo_csv, tmp_path):
    comp = tmp_path / "components.csv"
    edges = tmp_path / "edges.csv"
    r = run(cpf_bin, "components", "--input", str(demo_csv), "--truth-col", "cls",
            "--k", "8", "--out", str(comp), "--graph-out", str(edges))
    assert r.returncode == 0, r.stderr
    comp_lines = comp.read_text().splitlines()
    assert comp_lines[0] == "index,component_id"
    assert len(comp_lines) == 1 + 200

    edge_lines = edges.read_text().splitlines()
    assert edge_lines[0] == "i,j,distance"
    i, j, d = edge_lines[1].split(",")
    assert int(i) < int(j)
    assert float(d) >= 0.0

    dg = tmp_path / "dg.csv"
    r = run(cpf_bin, "decision-graph", "--input", str(demo_csv), "--truth-col", "cls",
            "--k", "8", "--K", "15", "--component", "0", "--out", str(dg))
    assert r.returncode == 0, r.stderr
    dg_lines = dg.read_text().splitlines()
    assert dg_lines[0] == "component,index,phi,omega,gamma"
    assert all(line.split(",")[0] == "0" for line in dg_lines[1:])
    # Rows of component 0 match the components listing.
    comp0 = sum(1 for line in comp_lines[1:] if line.split(",")[1] == "0")
    assert len(dg_lines) - 1 == comp0


def test_sweep_grid_rows_and_best(cpf_bin, demo_csv, tmp_path):
    out = tmp_path / "sweep.csv"
    report = tmp_path / "sweep.json"
    r = run(cpf_bin, "sweep", "--input", str(demo_csv), "--truth-col", "cls",
            "--k", "3:10", "--K", "10:30:5", "--out", str(out), "--report", str(report))
    assert r.returncode == 0, r.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == "k,K,clusters,outliers,ari,nmi,purity,f1,ca"
    assert len(lines) == 1 + 8 * 5
    best = json.loads(report.read_text())["best"]
    assert best["ari"]["value"] >= 0.9  # clean two-blob data
    stdout_best = json.loads(r.stdout)
    assert stdout_best["ari"]["value"] == best["ari"]["value"]


def test_exit_codes(cpf_bin, demo_csv, tmp_path):
    r = run(cpf_bin, "cluster", "--out", str(tmp_path / "x.csv"))
    assert r.returncode == 2  # missing --input

    r = run(cpf_bin, "cluster", "--input", str(demo_csv), "--k", "100000",
            "--out", str(tmp_path / "x.csv"))
    assert r.returncode == 3
    assert "k must be < n" in r.stderr

    r = run(cpf_bin, "cluster", "--input", str(tmp_path / "missing.csv"),
            "--out", str(tmp_path / "x.csv"))
    assert r.returncode == 3

    r = run(cpf_bin, "--help")
    assert r.returncode == 0
    assert "cluster" in r.stdout


def test_evaluate_two_label_files(cpf_bin, tmp_path):
    pred = tmp_path / "pred.csv"
    truth = tmp_path / "truth.csv"
    pred.write_text("0\n1\n0\n1\n")
    truth.write_text("0\n0\n1\n1\n")
    r = run(cpf_bin, "evaluate", "--pred", str(pred), "--truth", str(truth))
    assert r.returncode == 0, r.stderr
    assert abs(json.loads(r.stdout)["ari"] + 0.5) < 1e-12

    short = tmp_path / "short.csv"
    short.write_text("0\n1\n")
    r = run(cpf_bin, "evaluate", "--pred", str(pred), "--truth", str(short))
    assert r.returncode == 3
