"""Smoke test for the `qfa` extension module.

Build and install first:

    pip install maturin
    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import json
import math
from fractions import Fraction

import qfa


def check_qcfa_witness():
    w = qfa.qcfa_witness(2, 2)
    assert (w.kind, w.d) == ("qcfa", 7)
    assert len(w.etas) == 128
    report = w.verify()
    assert report["passed"], report
    assert report["max_value_deviation"] <= 1e-10
    prefixes, tests = w.grid()
    a = w.automaton
    f = a.acceptance(prefixes[0] + " " + tests[0])
    assert abs(f - (0.5 + w.t * w.etas[0][0])) <= 1e-10

    signs = qfa.sign_matrix(a, prefixes, tests)
    assert signs == qfa.complete_shattering(7)
    return w


def check_moqfa_pipeline():
    w = qfa.moqfa_witness(2)
    assert w.verify()["passed"]
    gfa = qfa.linearize(w.automaton)
    assert (gfa.model, gfa.states) == ("gfa", 4)
    pfa, report = qfa.stochasticize(gfa, 0.5)
    assert pfa.states == 14 and report["output_states"] == 14
    prefixes, tests = w.grid()
    for x in prefixes:
        for y in tests:
            assert w.automaton.accepts(f"{x} {y}") == pfa.accepts(f"{x} {y}", "1/2")
    agreement = qfa.sign_agreement(w.automaton, 0.5, pfa, max_len=3)
    assert agreement["agrees"], agreement

    real = qfa.realization(w.automaton, prefixes, tests)
    assert real["rank"] <= 4
    assert qfa.orthant_certificate(real["matrix"])["holds"]

    restored = qfa.Automaton.from_json(pfa.to_json())
    assert abs(restored.acceptance(["p:1", "tau:+-"]) - pfa.acceptance("p:1 tau:+-")) < 1e-15


def check_exact_conversion():
    doc = {
        "format": 1,
        "model": "gfa",
        "scalar_mode": "exact",
        "alphabet": ["a"],
        "states": 1,
        "initial": ["1"],
        "transitions": [[["2"]]],
        "final": ["1"],
    }
    gfa = qfa.Automaton.from_json(json.dumps(doc))
    pfa, report = qfa.stochasticize(gfa, "3", exact=True)
    assert pfa.states == 8
    assert Fraction(pfa.exact_acceptance("a a")) > Fraction(1, 2)
    assert Fraction(pfa.exact_acceptance("a")) < Fraction(1, 2)
    assert pfa.accepts("a a") and not pfa.accepts("a")
    assert qfa.verify_exact_conversion(gfa, "3", 6)["holds"]


def check_signrank():
    h = qfa.sylvester_hadamard(16)
    f = qfa.forster_bound(h)
    assert abs(f["bound"] - 4.0) < 1e-9 and abs(f["cap"] - 4.0) < 1e-12
    c = qfa.complete_shattering(5)
    assert qfa.numerical_rank([[float(s) for s in row] for row in c]) == 5
    assert abs(qfa.spectral_norm(c) - 2 ** 2.5) < 1e-9
    try:
        qfa.forster_bound(c)
    except ValueError as e:
        assert "square" in str(e)
    else:
        raise AssertionError("rectangular input accepted")
    for n in (2, 3, 4):
        r, s = n // 2, math.ceil(n / 2)
        assert qfa.orbit_jacobian_rank(n) == 2 * r * s


def check_errors():
    for bad in (lambda: qfa.moqfa_witness(1), lambda: qfa.qcfa_witness(2, 2, eta="sample:0")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("invalid parameters accepted")


if __name__ == "__main__":
    check_qcfa_witness()
    check_moqfa_pipeline()
    check_exact_conversion()
    check_signrank()
    check_errors()
    print("python smoke test: ok")
