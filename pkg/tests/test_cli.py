import json
from pathlib import Path

import pytest

from sanctionflow.cli import run
from conftest import FIXTURES


def read_data_lines(path):
    return [l for l in Path(path).read_text().splitlines()
            if l and not l.startswith("#")]


def test_build_institution_pair_fixture(tmp_path, capsys):
    out = tmp_path / "net.tsv"
    status = run(["build", "--level", "institution",
                  "--events", str(FIXTURES / "events_pair.csv"),
                  "--out", str(out)])
    assert status == 0
    lines = read_data_lines(out)
    assert lines == ["P", "Q", "P\tQ\t1"]
    assert "2 nodes, 1 edges" in capsys.readouterr().out


def test_decompose_reports_ratio(tmp_path, capsys):
    status = run(["decompose", "--net", str(FIXTURES / "ffw_triangle.tsv"),
                  "--mode", "mean", "--tol", "1e-10",
                  "--out", str(tmp_path / "hodge")])
    assert status == 0
    assert "gradient_ratio 0.8889" in capsys.readouterr().out
    summary = read_data_lines(tmp_path / "hodge" / "summary.csv")
    ratio = float(summary[1].split(",")[0])
    assert ratio == pytest.approx(8 / 9, abs=1e-10)


def test_communities_two_triangles(tmp_path, capsys):
    status = run(["communities", "--net", str(FIXTURES / "two_triangles.tsv"),
                  "--resolution", "1.0", "--seed", "1",
                  "--out", str(tmp_path / "comm.csv")])
    assert status == 0
    assert "2 communities, Q 0.5000" in capsys.readouterr().out


def test_outputs_carry_metadata_header(tmp_path):
    out = tmp_path / "net.tsv"
    run(["build", "--level", "institution",
         "--events", str(FIXTURES / "events_pair.csv"), "--out", str(out)])
    head = Path(out).read_text().splitlines()[:2]
    assert head[0].startswith("# sanctionflow ")
    assert "--level=institution" in head[1]


def test_ingest_round_trip(tmp_path, capsys):
    out = tmp_path / "canonical.csv"
    status = run(["ingest", "--events", str(FIXTURES / "events_small.csv"),
                  "--out", str(out)])
    assert status == 0
    assert "10 events, 4 issuers" in capsys.readouterr().out
    again = tmp_path / "again.csv"
    run(["ingest", "--events", str(out), "--out", str(again)])
    assert read_data_lines(out) == read_data_lines(again)


def test_synth_deterministic(tmp_path):
    (tmp_path / "r1").mkdir()
    (tmp_path / "r2").mkdir()
    a, b = tmp_path / "r1" / "ev.csv", tmp_path / "r2" / "ev.csv"
    for out in (a, b):
        assert run(["synth", "--issuers", "4", "--entities", "30",
                    "--copy-prob", "0.8", "--seed", "5",
                    "--out", str(out)]) == 0
    assert read_data_lines(a) == read_data_lines(b)


def test_module_error_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("issuer,list_id,entity_id,date\nEU,L1,X,2010-13-40\n")
    status = run(["ingest", "--events", str(bad),
                  "--out", str(tmp_path / "o.csv")])
    assert status == 1
    assert "2010-13-40" in capsys.readouterr().err


def test_argument_error_exits_two():
    with pytest.raises(SystemExit) as exc:
        run(["build", "--level", "bogus", "--events", "x", "--out", "y"])
    assert exc.value.code == 2


def test_full_pipeline(tmp_path, capsys):
    events = FIXTURES / "events_small.csv"
    net = tmp_path / "net.tsv"
    flow = tmp_path / "flow.tsv"
    hodge_dir = tmp_path / "hodge"
    comm = tmp_path / "comm.csv"
    pr = tmp_path / "pr.csv"
    lay = tmp_path / "layout.csv"
    rep = tmp_path / "report"
    for argv in (
        ["build", "--level", "institution", "--events", str(events),
         "--out", str(net)],
        ["symmetrize", "--net", str(net), "--mode", "mean",
         "--out", str(flow)],
        ["decompose", "--net", str(net), "--mode", "mean",
         "--out", str(hodge_dir)],
        ["communities", "--net", str(net), "--seed", "1", "--out", str(comm)],
        ["pagerank", "--net", str(net), "--out", str(pr)],
        ["layout", "--net", str(net),
         "--potentials", str(hodge_dir / "nodes.csv"), "--seed", "2",
         "--out", str(lay)],
        ["report", "--net", str(net), "--decomp", str(hodge_dir),
         "--pagerank", str(pr), "--partition", str(comm),
         "--layout", str(lay), "--graph-format", "json_graph",
         "--out", str(rep)],
    ):
        assert run(argv) == 0, argv
    obj = json.loads((rep / "graph.json").read_text())
    assert obj["nodes"]
    for node in obj["nodes"]:
        assert {"potential", "community", "x", "y"} <= set(node)
    assert (rep / "potential_table.csv").exists()
    assert (rep / "scatter.csv").exists()


def test_category_filtered_build(tmp_path, capsys):
    cmap = tmp_path / "cats.csv"
    cmap.write_text("list_id,label\nEU-TERR-1,terror\nUS-SDN-1,terror\n"
                    "JP-N-1,terror\nCH-1,terror\nEU-LIB-1,libya\n"
                    "US-LIB-1,libya\n")
    out = tmp_path / "net.tsv"
    status = run(["build", "--level", "institution",
                  "--events", str(FIXTURES / "events_small.csv"),
                  "--category-map", str(cmap), "--label", "libya",
                  "--out", str(out)])
    assert status == 0
    lines = read_data_lines(out)
    assert lines == ["EU", "US", "EU\tUS\t1"]
