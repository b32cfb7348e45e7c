import json
from fractions import Fraction
from importlib import resources

from ribetkit.checks import (CATALOG, HYPOTHESIS, PASS, RunOptions, canonical_json, inputs_hash, jsonable,
                             run_scenario)
from ribetkit.rings import RingSpec, ideal_in_ring, make_ring


def bundled(name):
    return json.loads(resources.files("ribetkit").joinpath("scenarios", name).read_text())


def test_bundled_scenarios_cover_the_catalog():
    seen = set()
    for p in resources.files("ribetkit").joinpath("scenarios").iterdir():
        if p.name.endswith(".json") and p.name != "schema.json":
            sc = json.loads(p.read_text())
            if sc["name"] == "formal_sweep":
                continue  # covered by cheaper scenarios of the same kind
            seen |= {c["id"] for c in run_scenario(sc)["checks"]}
    assert seen == set(CATALOG)


def test_report_structure():
    rep = run_scenario(bundled("dvr_step_two.json"))
    assert set(rep) == {"report_version", "scenario", "inputs_hash", "coverage", "checks", "summary",
                        "exit_code", "timings"}
    assert [c["id"] for c in rep["checks"]] == ["dvr_recursion", "dvr_lower_left_valuation",
                                                 "dvr_coboundary_crosscheck"]
    for c in rep["checks"]:
        assert set(c) == {"id", "status", "anchor", "inputs_hash", "details"}
        assert c["anchor"] == CATALOG[c["id"]].anchor
    det = rep["checks"][0]["details"]
    assert det["outcome"] == "nontrivial_cocycle" and det["step"] == 2 and det["digits"] == [1]


def test_inputs_hash_depends_on_seed_and_check():
    sc = bundled("numeric_random.json")
    a = run_scenario(sc, RunOptions(seed=1))
    b = run_scenario(sc, RunOptions(seed=2))
    assert a["inputs_hash"] != b["inputs_hash"]
    assert len({c["inputs_hash"] for c in a["checks"]}) == len(a["checks"])


def test_jsonable_and_canonical():
    R = make_ring(RingSpec.truncated_dvr(2, 3))
    obj = {"x": Fraction(1, 2), "i": ideal_in_ring(R, [2]), 3: (1, 2), "s": {2, 1}}
    js = jsonable(obj)
    assert js["x"] == "1/2" and js["3"] == [1, 2] and js["s"] == [1, 2]
    assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'
    assert inputs_hash({"a": 1}) == inputs_hash({"a": 1}) != inputs_hash({"a": 2})


def test_unexpected_recursion_outcome_fails():
    sc = bundled("dvr_step_two.json")
    sc["payload"]["expected"] = {"outcome": "nontrivial_cocycle", "step": 1}
    rep = run_scenario(sc)
    assert rep["checks"][0]["status"] == "fail" and rep["exit_code"] == 1


def test_degenerate_representation_flags_hypothesis():
    sc = {"name": "trivial", "kind": "numeric_ribet",
          "payload": {"representation": {"p": 2, "n": 3, "generators": [[[1, 0], [0, 1]]]}}}
    rep = run_scenario(sc)
    status = {c["id"]: c["status"] for c in rep["checks"]}
    assert status["irreducibility_proxy"] == HYPOTHESIS
    assert status["module_fitting_in_ideal"] == HYPOTHESIS
    assert rep["exit_code"] == 2
    rel = next(c for c in rep["checks"] if c["id"] == "relation_identities")
    assert rel["details"]["r"] == 0 and rel["details"]["fitting"] == [1]


def test_unfaithful_module_is_hypothesis_violation():
    sc = {"name": "unfaithful", "kind": "fitting_suite",
          "payload": {"instances": 1, "properties": [],
                      "faithful_quotient": {"p": 2, "n": 2, "m": 2, "betas": [[2, 0], [0, 2]], "ideal": [[2, 2]]}}}
    rep = run_scenario(sc)
    assert [c["status"] for c in rep["checks"]] == [HYPOTHESIS] and rep["exit_code"] == 2


def test_missing_characters_in_recursion():
    sc = {"name": "nochars", "kind": "dvr_recursion",
          "payload": {"representation": {"p": 2, "n": 3, "generators": [[[1, 2], [0, 1]]]}}}
    rep = run_scenario(sc)
    assert rep["checks"][0]["status"] == HYPOTHESIS


def test_koszul_with_options():
    sc = bundled("koszul_r2.json")
    rep = run_scenario(sc, RunOptions(primes=(5,), degree_bound=3))
    reg = next(c for c in rep["checks"] if c["id"] == "regular_sequence_exactness")
    assert reg["status"] == PASS
    assert {r["prime"] for r in reg["details"]["runs"]} == {5}
    assert all(r["degree_bound"] == 3 for r in reg["details"]["runs"])


def test_end_to_end_bridge_details():
    rep = run_scenario(bundled("end_to_end_borel.json"))
    bridge = next(c for c in rep["checks"] if c["id"] == "formal_numeric_bridge")
    assert bridge["status"] == PASS and bridge["details"]["proxy"] is True
    assert all(m["ok"] and m["a_in_I"] for m in bridge["details"]["matrices"])
