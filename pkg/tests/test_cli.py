"""Input parsing, command dispatch, report canonicalization, exit codes.

Golden files freeze full report bytes for one representative invocation
per command family; their payload values are asserted independently in
the module test suites, so the goldens only pin formatting and envelope
stability.
"""

import importlib.resources
import json

import pytest

from toricface.cli import (InputError, build_from_document, main,
                           parse_input, render_document, render_report,
                           run_command)

FIXDIR = importlib.resources.files("toricface") / "fixtures"
FIXTURES = ("fix-a", "fix-b", "fix-c", "stanley-r1", "octant-boundary")

GOLDEN = {
    "fix-b-cohomology-degree": ("fix-b", "cohomology",
                                {"degree": (0, -1), "char": 0}),
    "fix-c-fpure": ("fix-c", "fpure", {}),
    "fix-c-depth-char2": ("fix-c", "depth", {"char": 2}),
    "fix-a-presentation": ("fix-a", "presentation", {}),
    "fix-c-check": ("fix-c", "check", {}),
    "stanley-r1-cohomology-report": ("stanley-r1", "cohomology",
                                     {"report": True}),
    "octant-validate": ("octant-boundary", "validate", {}),
    "fix-b-oracle-degree": ("fix-b", "oracle", {"degree": (0, -1)}),
}


def fixture_text(name):
    return (FIXDIR / f"{name}.json").read_text()


def fixture_path(name):
    return str(FIXDIR / f"{name}.json")


def golden_text(name):
    with open(f"tests/golden/{name}.json") as fh:
        return fh.read()


def test_fixture_files_round_trip():
    for name in FIXTURES:
        text = fixture_text(name)
        doc = parse_input(text)
        assert render_document(doc) == text
        assert parse_input(render_document(doc)) == doc


def test_fixture_files_build():
    for name in FIXTURES:
        doc = parse_input(fixture_text(name))
        mcc, named = build_from_document(doc)
        assert mcc.ambient_dim == doc.dimension
        assert {k for _, k in named} == set(mcc.fan.maximal)
        if doc.monoids == "stanley":
            assert mcc.seminormal


def test_golden_reports_are_reproduced():
    for name, (fixture, command, options) in sorted(GOLDEN.items()):
        doc = parse_input(fixture_text(fixture))
        report = run_command(doc, command, options)
        assert render_report(report) == golden_text(name), name


def test_reports_are_deterministic():
    doc = parse_input(fixture_text("fix-c"))
    r1 = run_command(doc, "cohomology", {"report": True})
    r2 = run_command(doc, "cohomology", {"report": True})
    assert render_report(r1) == render_report(r2)


def test_input_hash_ignores_formatting():
    # reports hash the canonical rendering, so reformatting the same
    # document cannot change the output bytes
    text = fixture_text("fix-c")
    data = json.loads(text)
    reformatted = json.dumps(data, indent=7)
    r1 = run_command(parse_input(text), "fpure", {})
    r2 = run_command(parse_input(reformatted), "fpure", {})
    assert render_report(r1) == render_report(r2)


def test_main_end_to_end(capsys):
    code = main(["fpure", fixture_path("fix-c")])
    out = capsys.readouterr()
    assert code == 0
    assert out.out == golden_text("fix-c-fpure")
    assert out.err == ""
    payload = json.loads(out.out)["payload"]
    assert payload["excluded_primes"] == [2]


def test_main_negative_leading_degree(capsys):
    # a degree list may start with a negative coordinate; the two-token
    # spelling must work, and the command echo inside the report must
    # re-run to byte-identical output
    code = main(["cohomology", fixture_path("fix-c"), "--degree", "-7,-1"])
    out = capsys.readouterr()
    assert code == 0
    report = json.loads(out.out)
    assert report["payload"]["table"]["entries"] == [[2, 1]]

    echoed = report["command"].split()
    code = main(echoed + [fixture_path("fix-c")])
    second = capsys.readouterr()
    assert code == 0
    assert second.out == out.out


def test_main_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 2')
    assert main(["validate", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "line 1" in err

    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({
        "dimension": 1, "rays": {"p": [1]}, "cones": [],
        "monoids": {"stanley": True}}))
    assert main(["validate", str(empty)]) == 1
    assert "cones" in capsys.readouterr().err

    assert main(["depth", fixture_path("fix-b")]) == 1
    assert "seminormal" in capsys.readouterr().err

    assert main(["cohomology", fixture_path("fix-c"),
                 "--degree", "0,-1", "--report"]) == 1
    assert "conflict" in capsys.readouterr().err

    assert main(["nosuch", fixture_path("fix-c")]) == 1
    capsys.readouterr()

    assert main(["cohomology", fixture_path("fix-c"),
                 "--degree", "x,y"]) == 1
    assert "malformed integer list" in capsys.readouterr().err

    assert main(["validate", str(tmp_path / "missing.json")]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_main_bound_exhausted_exit(capsys):
    code = main(["oracle", fixture_path("fix-b"),
                 "--degree", "3,1", "--bound", "1"])
    out = capsys.readouterr().out
    assert code == 2
    report = json.loads(out)
    assert report["status"] == "bound-exhausted"
    assert report["payload"]["cap"] == 1

    code = main(["seminormalize", fixture_path("fix-b"), "--bound", "2"])
    out = capsys.readouterr().out
    assert code == 2
    report = json.loads(out)
    assert report["status"] == "bound-exhausted"
    assert report["payload"]["element"] == [3, 0]


def test_parse_diagnostics_name_the_field():
    good = json.loads(fixture_text("fix-c"))

    def expect(mutate, fragment):
        data = json.loads(json.dumps(good))
        mutate(data)
        with pytest.raises(InputError) as exc:
            parse_input(json.dumps(data))
        assert fragment in str(exc.value), str(exc.value)

    expect(lambda d: d.update(dimension="two"), "dimension")
    expect(lambda d: d.update(dimension=0), "dimension")
    expect(lambda d: d["rays"].update(x=[1]), "rays.x")
    expect(lambda d: d["rays"].update(x=[1, 2.5]), "rays.x")
    expect(lambda d: d["rays"].update(x=[1, True]), "rays.x")
    expect(lambda d: d["cones"][0]["generators"].append("w"), "unknown ray")
    expect(lambda d: d["cones"].append(dict(d["cones"][0])), "duplicate")
    expect(lambda d: d["monoids"].pop("C"), "monoids")
    expect(lambda d: d["monoids"].update(stanley=True), "monoids")
    expect(lambda d: d.update(options={"bounds": {"nope": 3}}),
           "unknown bound")
    expect(lambda d: d.update(options={"bounds": {"oracle": 0}}),
           "positive")
    expect(lambda d: d.update(extra=1), "unknown keys")
    expect(lambda d: d["cones"][0].pop("generators"), "cones[0]")


def test_non_maximal_cone_rejected():
    data = json.loads(fixture_text("fix-c"))
    data["cones"].append({"name": "edge", "generators": ["y"]})
    data["monoids"]["edge"] = [[0, 2]]
    with pytest.raises(InputError) as exc:
        build_from_document(parse_input(json.dumps(data)))
    assert "maximal" in str(exc.value)


def test_degree_validation():
    doc = parse_input(fixture_text("fix-c"))
    with pytest.raises(InputError):
        run_command(doc, "cohomology", {"degree": (1, 2, 3)})
    with pytest.raises(InputError):
        run_command(doc, "cohomology", {})
    with pytest.raises(InputError):
        run_command(doc, "frobenius", {"degree": (0, -1)})
    with pytest.raises(InputError):
        run_command(doc, "nosuch", {})
    with pytest.raises(InputError):
        run_command(doc, "cohomology", {"degree": (0, -1), "char": 6})


def test_oracle_box_scan_lists_nonzero_degrees():
    doc = parse_input(fixture_text("stanley-r1"))
    report = run_command(doc, "oracle", {"box": 2})
    payload = report["payload"]
    assert report["bounds"]["box"] == 2
    found = {tuple(h["degree"]): h["table"]["entries"]
             for h in payload["nonzero"]}
    assert found == {(-2,): [[1, 1]], (-1,): [[1, 1]], (0,): [[1, 1]],
                     (1,): [[1, 1]], (2,): [[1, 1]]}


def test_stanley_and_explicit_monoids_agree():
    data = json.loads(fixture_text("stanley-r1"))
    data["monoids"] = {"P": [[1]], "M": [[-1]]}
    explicit, _ = build_from_document(parse_input(json.dumps(data)))
    stanley, _ = build_from_document(parse_input(fixture_text("stanley-r1")))
    assert explicit.monoids == stanley.monoids
