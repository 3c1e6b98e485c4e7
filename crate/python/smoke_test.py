"""Smoke test for the `gsos` extension module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`
or `pip install crates/py`.
"""

import json

import gsos


def main():
    spec = gsos.Spec.ccs()
    assert spec.labels == ["a", "a_bar", "tau"]
    assert ("par", 2) in spec.ops
    assert gsos.check("") and gsos.check("")[0][0] == "SyntaxError"
    bad = "labels a ; op f : 1 ; op g : 1 ; rule bad : premises x1 -[a]-> y1_1 ; conclusion f(g(x1)) -[a]-> y1_1 ;"
    assert [e[0] for e in gsos.check(bad)] == ["NonGsosSource"]

    steps = gsos.transitions(spec, "par(pref_a_bar(nil), pref_a(nil))")
    assert sorted(label for label, _, _ in steps) == ["a", "a_bar", "tau"]
    assert ("tau", "sync(pref@a_bar(term(nil)), pref@a(term(nil)))", "par(nil, nil)") in steps

    lts, frontier = gsos.reachable(spec, ["par(pref_a_bar(nil), pref_a(nil))"], 2)
    assert len(lts.states) == 4 and len(lts.edges) == 5 and frontier == []
    assert json.loads(lts.to_json())["states"] == lts.states

    assert gsos.bisimilar(spec, "sum(pref_a(nil), pref_a(nil))", "pref_a(nil)", 3)
    assert not gsos.bisimilar(spec, "pref_a(nil)", "pref_tau(nil)", 1)

    x = gsos.Lts.from_json(
        spec,
        json.dumps(
            {
                "labels": ["a", "a_bar", "tau"],
                "states": ["x1", "x2", "x3", "y1", "y2"],
                "edges": {
                    "a": [{"id": "e2", "src": "x3", "tgt": "y2"}],
                    "a_bar": [{"id": "e1", "src": "x1", "tgt": "y1"}],
                },
            }
        ),
    )
    d = gsos.decompose(spec, "sync(lpar(ax(e1), term(var(x2))), ax(e2))", x)
    assert d["shape"] == "sync(lpar(ax(a_bar), term(var(*))), ax(a))"
    assert len(d["arity"]["states"]) == 5
    assert d["filler"]["arg1/occ1"] == "x2"

    cert = gsos.certify(spec, "rsync(ax(a_bar), ax(a))")
    assert cert["verified"]
    assert [s["name"] for s in cert["steps"]] == ["arg1/prem1", "arg1/prem2"]

    labels = ["a", "a_bar", "tau"]
    cover = gsos.Lts.from_json(spec, json.dumps({"labels": labels, "states": ["u", "v"], "edges": {
        "a": [{"id": "g1", "src": "u", "tgt": "v"}, {"id": "g2", "src": "v", "tgt": "u"}]}}))
    loop = gsos.Lts.from_json(spec, json.dumps({"labels": labels, "states": ["y"], "edges": {
        "a": [{"id": "g", "src": "y", "tgt": "y"}]}}))
    lifted = gsos.lift(spec, cover, loop, {"u": "y", "v": "y"}, {"g1": "g", "g2": "g"},
                       "par(var(u), var(v))", "lpar(ax(g), term(var(y)))")
    assert lifted == "lpar(ax(g1), term(var(v)))"

    laws = gsos.monad_laws(spec, seed=3, cases=200, d=3)
    assert laws["checked"] == 200 and laws["failures"] == []

    pairs = [("sum(pref_a(nil), nil)", "pref_a(nil)")]
    contexts = ["var(hole)", "par(pref_a_bar(nil), var(hole))"]
    assert gsos.congruence(spec, pairs, contexts)["violations"] == []
    assert len(gsos.congruence(spec, pairs, contexts, mutate=True)["violations"]) == 1

    toy = gsos.Spec.toy()
    assert toy.ops == [("f", 1)]
    print("gsos smoke test passed:", spec, lts)


if __name__ == "__main__":
    main()
