"""End-to-end CLI tests: JSON report shapes, exit codes, artifact formats.

Each test drives main(argv) in-process and inspects stdout/stderr through
capsys, so the suite never shells out.
"""

import json

import pytest

from qss.cli import (
    EXIT_BUDGET,
    EXIT_DISAGREEMENT,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_PRECONDITION,
    main,
)
from qss.multigraph import Multigraph, parse_graph, rs747_fixture, serialize_graph


@pytest.fixture
def star_file(tmp_path):
    g = Multigraph(3, [[0, 1, 1], [1, 0, 0], [1, 0, 0]])
    path = tmp_path / "star.graph"
    path.write_text(serialize_graph(g))
    return str(path)


@pytest.fixture
def rs_file(tmp_path):
    path = tmp_path / "rs.graph"
    path.write_text(serialize_graph(rs747_fixture().graph))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def report(out):
    rep = json.loads(out)
    assert {"command", "inputs", "result", "seed", "wall_time"} <= set(rep)
    return rep


# --------------------------------------------------------------------- access


def test_access_full_set(capsys, star_file):
    code, out, _ = run(capsys, ["access", star_file, "--dealer", "0", "--set", "1,2"])
    assert code == EXIT_OK
    rep = report(out)
    assert rep["command"] == "access"
    assert rep["result"] == {
        "classical": "accessible",
        "quantum": "accessible",
        "pi": 1,
        "derivative": -1,
        "witness_d": {"1": 1},
        "witness_c": None,
    }
    assert rep["seed"] is None


def test_access_partial_and_empty_sets(capsys, star_file):
    code, out, _ = run(capsys, ["access", star_file, "--dealer", "0", "--set", "1"])
    assert code == EXIT_OK
    res = report(out)["result"]
    assert (res["classical"], res["quantum"]) == ("accessible", "partial")
    assert (res["pi"], res["derivative"]) == (1, 0)

    code, out, _ = run(capsys, ["access", star_file, "--dealer", "0", "--set", ""])
    assert code == EXIT_OK
    res = report(out)["result"]
    assert (res["classical"], res["quantum"]) == ("no_info", "no_info")
    assert (res["pi"], res["derivative"]) == (0, 1)
    assert res["witness_c"] == {"0": 1}


def test_access_reads_stdin(capsys, monkeypatch, star_file):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(open(star_file).read()))
    code, out, _ = run(capsys, ["access", "-", "--dealer", "0", "--set", "1,2"])
    assert code == EXIT_OK
    assert report(out)["result"]["derivative"] == -1


def test_access_strips_dealer_with_warning(capsys, star_file):
    code, out, err = run(capsys, ["access", star_file, "--dealer", "0", "--set", "0,1,2"])
    assert code == EXIT_OK
    assert "dealer 0 removed" in err
    rep = report(out)
    assert rep["inputs"]["set"] == [1, 2]
    assert rep["result"]["derivative"] == -1


def test_access_report_deterministic_modulo_wall_time(capsys, star_file):
    argv = ["access", star_file, "--dealer", "0", "--set", "1,2"]
    _, out1, _ = run(capsys, argv)
    _, out2, _ = run(capsys, argv)
    a, b = json.loads(out1), json.loads(out2)
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b


# ----------------------------------------------------------------- exit codes


def test_parse_errors_exit_1(capsys, star_file):
    code, _, err = run(capsys, ["access", star_file, "--dealer", "0", "--set", "1,x"])
    assert code == EXIT_PARSE
    assert "not comma-separated integers" in err

    code, _, err = run(capsys, ["no-such-command"])
    assert code == EXIT_PARSE
    assert "error:" in err

    code, _, err = run(capsys, ["access"])  # missing required arguments
    assert code == EXIT_PARSE


def test_precondition_errors_exit_2(capsys, star_file, tmp_path):
    code, _, err = run(capsys, ["access", star_file, "--dealer", "0", "--set", "9"])
    assert code == EXIT_PRECONDITION
    assert "leaves the range" in err

    code, _, err = run(capsys, ["access", str(tmp_path / "missing.graph"), "--dealer", "0", "--set", "1"])
    assert code == EXIT_PRECONDITION

    bad = tmp_path / "bad.graph"
    bad.write_text("q 4\nn 3\n")
    code, _, err = run(capsys, ["access", str(bad), "--dealer", "0", "--set", "1"])
    assert code == EXIT_PRECONDITION


def test_budget_errors_exit_3(capsys, star_file, rs_file):
    code, _, err = run(
        capsys,
        ["cq-round", star_file, "--dealer", "0", "--set", "1,2", "--seed", "4", "--budget", "8"],
    )
    assert code == EXIT_BUDGET
    assert "exceed the budget" in err

    code, _, err = run(
        capsys,
        ["oracle-verify", rs_file, "--dealer", "7", "--seed", "3", "--budget", "100"],
    )
    assert code == EXIT_BUDGET


# ------------------------------------------------------------------- scheme-k


def test_scheme_k_star(capsys, star_file):
    code, out, _ = run(capsys, ["scheme-k", star_file, "--dealer", "0"])
    assert code == EXIT_OK
    res = report(out)["result"]
    assert res == {
        "k": 2,
        "n_players": 2,
        "all_accessible_at_k": True,
        "worst_unauthorized": [1],
    }


def test_scheme_k_rs747(capsys, rs_file):
    code, out, _ = run(capsys, ["scheme-k", rs_file, "--dealer", "7"])
    assert code == EXIT_OK
    res = report(out)["result"]
    assert res["k"] == 4
    assert res["n_players"] == 7
    assert res["all_accessible_at_k"] is True


# --------------------------------------------------------------------- search


def test_search_exhausts_without_scheme(capsys):
    code, out, _ = run(capsys, ["search", "--n", "4", "--q", "2", "--k", "2"])
    assert code == EXIT_OK
    res = report(out)["result"]
    assert res["status"] == "exhausted"
    assert res["checked"] == 64
    assert res["graph_text"] is None and res["index"] is None


def test_search_finds_scheme(capsys):
    code, out, _ = run(capsys, ["search", "--n", "4", "--q", "3", "--k", "2"])
    assert code == EXIT_OK
    res = report(out)["result"]
    assert res["status"] == "found"
    assert (res["index"], res["checked"]) == (123, 124)
    found = parse_graph(res["graph_text"])
    assert found.q == 3 and found.n == 4


def test_search_budget_exit_and_checkpoint_resume(capsys, tmp_path):
    ckpt = str(tmp_path / "progress.ckpt")
    argv = ["search", "--n", "4", "--q", "3", "--k", "2", "--budget", "60", "--checkpoint", ckpt]
    code, out, _ = run(capsys, argv)
    assert code == EXIT_BUDGET
    first = report(out)["result"]
    assert first["status"] == "budget_exceeded"
    assert first["checked"] == 60

    code, out, _ = run(capsys, ["search", "--n", "4", "--q", "3", "--k", "2", "--checkpoint", ckpt])
    assert code == EXIT_OK
    second = report(out)["result"]
    assert second["status"] == "found"
    assert second["index"] == 123
    assert second["checked"] == 124 - 60  # resumed, not restarted


# --------------------------------------------------------------------- sample


def test_sample_frozen_summary(capsys):
    code, out, _ = run(
        capsys,
        ["sample", "--n", "6", "--q", "3", "--alpha", "0.8", "--trials", "300", "--seed", "77"],
    )
    assert code == EXIT_OK
    rep = report(out)
    assert rep["seed"] == 77
    assert rep["result"]["successes"] == 252
    assert rep["result"]["success_rate"] == pytest.approx(0.84)


def test_sample_worker_invariance(capsys):
    argv = ["sample", "--n", "5", "--q", "2", "--alpha", "0.6", "--trials", "100", "--seed", "8"]
    _, out1, _ = run(capsys, argv)
    _, out2, _ = run(capsys, argv + ["--workers", "3"])
    assert json.loads(out1)["result"] == json.loads(out2)["result"]


# --------------------------------------------------------------------- bounds


def test_bounds_csv_artifact(capsys):
    code, out, _ = run(capsys, ["bounds", "--qmin", "2", "--qmax", "7"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "q,alpha_lower,alpha_random_threshold"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["2", "3", "5", "7"]
    q2 = lines[1].split(",")
    assert float(q2[1]) == pytest.approx(0.5063762, abs=1e-6)
    assert float(q2[2]) == pytest.approx(0.8107104, abs=1e-6)


# -------------------------------------------------------------------- fixture


def test_fixture_round_trips(capsys):
    code, out, _ = run(capsys, ["fixture", "rs747"])
    assert code == EXIT_OK
    g = parse_graph(out)
    ref = rs747_fixture().graph
    assert g.q == ref.q and (g.gamma == ref.gamma).all()


def test_fixture_rejects_unknown_name(capsys):
    code, _, err = run(capsys, ["fixture", "petersen"])
    assert code == EXIT_PARSE


# -------------------------------------------------------------- oracle-verify


def test_oracle_verify_star_agrees(capsys, star_file):
    code, out, _ = run(capsys, ["oracle-verify", star_file, "--dealer", "0", "--seed", "3"])
    assert code == EXIT_OK
    res = report(out)["result"]
    assert res["disagreements"] == 0
    assert len(res["rows"]) == 4  # sizes 0..2 over two players
    for row in res["rows"]:
        assert row["verdict_graph"] == row["verdict_oracle"]


def test_oracle_verify_size_cap(capsys, star_file):
    code, out, _ = run(
        capsys, ["oracle-verify", star_file, "--dealer", "0", "--seed", "3", "--max-size", "1"]
    )
    assert code == EXIT_OK
    assert len(report(out)["result"]["rows"]) == 3


# ------------------------------------------------------------------- cq-round


def test_cq_round_authorized_rounds_agree(capsys, star_file):
    code, out, _ = run(
        capsys,
        ["cq-round", star_file, "--dealer", "0", "--set", "1,2", "--t", "1", "--rounds", "5", "--seed", "9"],
    )
    assert code == EXIT_OK
    res = report(out)["result"]
    assert res["total"] == 5 and res["agreements"] == 5
    assert all(r["s"] == r["m"] for r in res["rounds"])


def test_cq_round_unauthorized_raise_and_measure(capsys, star_file):
    code, _, err = run(
        capsys, ["cq-round", star_file, "--dealer", "0", "--set", "", "--seed", "4"]
    )
    assert code == EXIT_PRECONDITION
    assert "contract" in err

    code, out, _ = run(
        capsys,
        ["cq-round", star_file, "--dealer", "0", "--set", "", "--seed", "4",
         "--on-unauthorized", "measure", "--rounds", "6"],
    )
    assert code == EXIT_OK
    res = report(out)["result"]
    assert res["total"] == 6
    assert 0 <= res["agreements"] <= 6


# ------------------------------------------------------------------ qq-decode


def test_qq_decode_authorized(capsys, star_file):
    code, out, _ = run(
        capsys, ["qq-decode", star_file, "--dealer", "0", "--set", "1,2", "--seed", "5"]
    )
    assert code == EXIT_OK
    res = report(out)["result"]
    assert res["fidelity"] >= 1 - 1e-9
    assert res["syndrome"] == [1, 0]
    assert res["used_fallback"] is False
    assert len(res["secret_real"]) == 3 and len(res["secret_imag"]) == 3


def test_qq_decode_partial_set_fallback(capsys, star_file):
    code, out, _ = run(
        capsys, ["qq-decode", star_file, "--dealer", "0", "--set", "1", "--seed", "5"]
    )
    assert code == EXIT_OK
    res = report(out)["result"]
    assert res["used_fallback"] is True
    assert res["fidelity"] == pytest.approx(0.7122855504, abs=1e-9)
    assert res["fidelity"] < 1 - 1e-9


def test_exit_code_constants_are_distinct():
    codes = [EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_BUDGET, EXIT_DISAGREEMENT]
    assert codes == sorted(codes) == [0, 1, 2, 3, 4]
