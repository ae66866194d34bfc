import io
import json
import logging

import pytest

from hyperstack.canonical import canonical_graph
from hyperstack.cli import run_command
from hyperstack.models import CurveGraph


@pytest.fixture(autouse=True)
def restore_root_handlers():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def run(argv, monkeypatch, capsys, document=None):
    if document is not None:
        text = document if isinstance(document, str) else json.dumps(document)
        monkeypatch.setattr("sys.stdin", io.StringIO(text))
    status = run_command(argv)
    out = capsys.readouterr().out
    return status, json.loads(out) if out.strip() else None


def dump(model):
    return model.model_dump(mode="json")


def test_genus(two_elliptic_tails, monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps({"graph": dump(two_elliptic_tails)})))
    assert run_command(["genus"]) == 0
    assert capsys.readouterr().out == '{"genus":2}\n'


def test_stability_from_file(two_elliptic_tails, tmp_path, monkeypatch, capsys):
    path = tmp_path / "curve.json"
    path.write_text(json.dumps(dump(two_elliptic_tails)), encoding="utf-8")
    status, payload = run(["stability", "--input", str(path)], monkeypatch, capsys)
    assert status == 0
    assert payload["valid"] is True
    assert payload["reasons"] == []


def test_from_cover_builds_the_banana(pgl2_generic_cover, banana4, monkeypatch, capsys):
    status, payload = run(["from-cover", "--r", "1"], monkeypatch, capsys, {"cover": dump(pgl2_generic_cover)})
    assert status == 0
    assert payload["genus"] == 3
    assert canonical_graph(CurveGraph.model_validate(payload["curve"])) == canonical_graph(banana4)


def test_validate_cover_reports_b3(monkeypatch, capsys):
    cover = {"components": ["Z"], "deg2L": {"Z": -8}, "smooth_orders": {"Z": [3, 1, 1, 1, 1, 1]}}
    status, payload = run(["validate-cover", "--genus", "3", "--r", "1"], monkeypatch, capsys, cover)
    assert status == 1
    assert payload["valid"] is False
    assert any(reason.startswith("(b3)") for reason in payload["reasons"])


def test_to_cover_without_involution(three_tails, monkeypatch, capsys):
    status, payload = run(["to-cover"], monkeypatch, capsys, dump(three_tails))
    assert status == 1
    assert payload["error"] == "NotHyperellipticError"


def test_deformation_searches_for_the_involution(two_elliptic_tails, monkeypatch, capsys):
    status, payload = run(["deformation"], monkeypatch, capsys, dump(two_elliptic_tails))
    assert status == 0
    assert payload["hom"]["untwisted_total"] == 2
    assert payload["hom"]["twisted_total"] == 0
    assert payload["audit"]["certified"] is True


def test_cohomology(monkeypatch, capsys):
    bundle = {
        "components": ["X0", "X1"],
        "nodes": [{"id": "n0", "ends": ["X0", "X1"]}],
        "multidegree": {"X0": -1, "X1": 1},
    }
    status, payload = run(["cohomology"], monkeypatch, capsys, {"bundle": bundle})
    assert status == 0
    assert (payload["h0"], payload["h1"], payload["chi"]) == (1, 0, 1)
    assert payload["evaluation_surjective"] == {"X0": False, "X1": True}


def test_exist_decomposition_needs_both_vertices(banana3, monkeypatch, capsys):
    status, payload = run(["decompose", "--kind", "exist"], monkeypatch, capsys, {"graph": dump(banana3)})
    assert status == 2
    assert payload["error"] == "InputDocumentError"


def test_enumerate(monkeypatch, capsys):
    status, payload = run(["enumerate", "--genus", "2", "--r", "1"], monkeypatch, capsys)
    assert status == 0
    assert payload["effective_r"] == 1
    assert len(payload["graphs"]) == len(payload["covers"]) == len(payload["bijection"])


def test_enumerate_needs_a_genus(monkeypatch, capsys):
    status, _ = run(["enumerate"], monkeypatch, capsys)
    assert status == 2


def test_pretty_output(two_elliptic_tails, monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(dump(two_elliptic_tails))))
    assert run_command(["genus", "--pretty"]) == 0
    out = capsys.readouterr().out
    assert "\n  " in out
    assert json.loads(out) == {"genus": 2}


def test_malformed_json(monkeypatch, capsys):
    status, payload = run(["genus"], monkeypatch, capsys, "{not json")
    assert status == 2
    assert payload["error"] == "JSONDecodeError"


def test_invalid_graph_document(monkeypatch, capsys):
    status, payload = run(["genus"], monkeypatch, capsys, {"vertices": []})
    assert status == 2
    assert payload["error"] == "ValidationError"


def test_unknown_command(capsys):
    assert run_command(["no-such-command"]) == 2
    assert run_command(["--help"]) == 0


@pytest.mark.parametrize("value", ["abc", None, [3], 2.5])
def test_bad_option_value(two_elliptic_tails, value, monkeypatch, capsys):
    document = {"graph": dump(two_elliptic_tails), "r_max": value}
    status, payload = run(["stability"], monkeypatch, capsys, document)
    assert status == 2
    assert payload["error"] == "InputDocumentError"
    assert "r_max" in payload["message"]


def test_numeric_string_option(two_elliptic_tails, monkeypatch, capsys):
    status, payload = run(["stability"], monkeypatch, capsys, {"graph": dump(two_elliptic_tails), "r_max": "1"})
    assert status == 0
    assert payload["valid"] is True


def test_genus1_classify(monkeypatch, capsys):
    graph = {
        "vertices": [{"id": "e", "geom_genus": 1}, {"id": "l", "geom_genus": 0}],
        "points": [{"id": "p", "r": 1, "branches": [{"vertex": "e"}, {"vertex": "l"}]}],
        "markings": [{"id": "x", "vertex": "l"}, {"id": "y", "vertex": "l"}],
    }
    status, payload = run(["genus1-classify"], monkeypatch, capsys, {"graph": graph, "p1": "x", "p2": "y"})
    assert (status, payload) == (0, {"case": "b"})
    status, payload = run(["genus1-classify"], monkeypatch, capsys, {"graph": graph, "p1": "x"})
    assert (status, payload) == (0, {"case": "INVALID"})
